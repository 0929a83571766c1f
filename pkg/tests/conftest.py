import pathlib

import pytest

from mpfjss.model import load_instance, parse_instance

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def example_instance():
    """The small three-job shop instance used throughout the tests."""
    return load_instance(DATA / "example.lp")


def random_tiny_instance(rng):
    """A random instance small enough for the exhaustive oracle.

    Two or three jobs over at most four operation types, two workers, one
    machine that covers whatever demands it; every operation keeps at least
    one capable worker so the instance is always solvable.
    """
    names = ["a", "b", "c", "d"][: rng.randint(2, 4)]
    dur = {o: rng.randint(1, 3) for o in names}
    m_need = {o for o in names if rng.random() < 0.4}
    lines = [f"op({o},{dur[o]})." for o in names]
    for o in names:
        lines.append(f"needs({o},w).")
        if o in m_need:
            lines.append(f"needs({o},m).")
    for o in names:
        for i in rng.sample([1, 2], rng.randint(1, 2)):
            lines.append(f"res(w,{i},{o}).")
    for o in sorted(m_need):
        lines.append(f"res(m,1,{o}).")
    for nj in range(1, rng.randint(2, 3) + 1):
        job = f"j{nj}"
        ops = sorted(rng.sample(names, rng.randint(1, min(3, len(names)))))
        lines.append(f"job({job},{rng.randint(0, 6)}).")
        for o in ops:
            lines.append(f"recipe({job},{o}).")
        for i in range(len(ops)):
            for k in range(i + 1, len(ops)):
                if rng.random() < 0.35:
                    lines.append(f"prec({job},{ops[i]},{ops[k]}).")
    return parse_instance("\n".join(lines))


@pytest.fixture
def tiny_factory():
    return random_tiny_instance
