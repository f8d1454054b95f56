import math
import sys

import numpy as np
import pytest
from hypothesis import settings

from morrey_embed.seqnorm import CoeffSequence

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_seq(rng: np.random.Generator, J_max: int = 4, d: int = 1, width: int = 2, density: float = 0.4,
               signed: bool = True) -> CoeffSequence:
    """Random finitely supported sequence with cells spread over [-width, width)^d."""
    entries = []
    for j in range(J_max + 1):
        n = width << j
        for m in np.ndindex(*([2 * n] * d)):
            if rng.random() < density:
                v = rng.uniform(0.05, 1.0) * (rng.choice([-1, 1]) if signed else 1)
                entries.append(((j, tuple(int(x) - n for x in m)), float(v)))
    if not entries:
        entries.append(((0, (0,) * d), 1.0))
    return CoeffSequence(d, entries)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rel_close(a, b, tol):
    if a == b:
        return True
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def log2(x):
    return math.log2(x)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
