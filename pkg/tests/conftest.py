import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from exoretarget.kinematics import DHRow, KinematicChain, PassiveCoupling, UnitQuaternion  # noqa: E402


def random_quat(rng) -> UnitQuaternion:
    v = rng.normal(size=4)
    return UnitQuaternion(*(v / np.linalg.norm(v)))


def random_chain(rng, n, *, with_fixed=False, with_passive=False, limit_span=(0.5, 3.0)) -> KinematicChain:
    rows, couplings = [], []
    for _ in range(n):
        if with_fixed and rng.random() < 0.3:
            rows.append(DHRow(rng.uniform(-0.3, 0.3), rng.uniform(-math.pi, math.pi), rng.uniform(-0.3, 0.3),
                              rng.uniform(-math.pi, math.pi), "fixed"))
        if with_passive and rng.random() < 0.3:
            couplings.append(PassiveCoupling(len(couplings), int(rng.integers(n)), rng.uniform(-1, 1), rng.uniform(-0.3, 0.3)))
            rows.append(DHRow(rng.uniform(-0.3, 0.3), rng.uniform(-math.pi, math.pi), rng.uniform(-0.3, 0.3),
                              rng.uniform(-math.pi, math.pi), "revolute-passive"))
        rows.append(DHRow(rng.uniform(-0.3, 0.3), rng.uniform(-math.pi, math.pi), rng.uniform(-0.3, 0.3),
                          rng.uniform(-math.pi, math.pi)))
    limits = tuple((-rng.uniform(*limit_span), rng.uniform(*limit_span)) for _ in range(n))
    return KinematicChain(tuple(rows), limits, "random", tuple(couplings))


def chain_rows(chain):
    return [{"a": r.a, "alpha": r.alpha, "d": r.d, "theta_offset": r.theta_offset, "kind": r.kind.value} for r in chain.rows]


def chain_couplings(chain):
    return [(c.active_index, c.gain, c.offset) for c in chain.passive_couplings]


@pytest.fixture
def rng():
    return np.random.default_rng(20251014)


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
