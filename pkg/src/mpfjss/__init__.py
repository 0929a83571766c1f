"""Multi-resource flexible job-shop scheduling on a difference-logic core."""

from .model import (
    Instance,
    InstanceError,
    InstanceViolation,
    Job,
    Operation,
    ParseError,
    Resource,
    SemanticError,
    Task,
    instance_from_json,
    instance_to_json,
    load_instance,
    loads_instance,
    parse_instance,
    save_instance,
    serialize_instance,
    tasks,
    validate_instance,
)
from .dl import AVAILABLE_BACKENDS, DLConflict, DLConstraint, DLEngine, DLVar
from .schedule import (
    Allocation,
    Assignment,
    Schedule,
    build_schedule,
    schedule_from_json,
    schedule_to_json,
)
from .validate import Violation, check_schedule, total_tardiness
from .solver import (
    OptimizeResult,
    SolveTimeout,
    UnsolvableInstanceError,
    conflict_pairs,
    decide,
    optimize,
    start_times_from_order,
)
from .bounds import (
    BoundResult,
    Probe,
    SolveReport,
    StrategyConfig,
    exponential_bound,
    incremental_bound,
    report_to_json,
    single_shot_bound,
    solve_with_strategy,
)
from .generate import GenParams, generate, split_day
from .oracle import (
    BudgetExceeded,
    OracleBudget,
    brute_force_min_cap,
    brute_force_optimal,
)

__version__ = "0.1.0"
