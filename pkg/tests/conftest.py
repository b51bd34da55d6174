import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lassokit.instances import KINDS, generate, lambda_grid  # noqa: E402
from lassokit.larspath import lars_path  # noqa: E402

ACCEPTANCE = {}


def record(number, name, passed, detail=""):
    ACCEPTANCE[number] = (name, bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        name, passed, detail = ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} [{status}] {name}: {detail}")


class SweepCase:
    def __init__(self, kind, n, p, seed, X, y, lambdas, path):
        self.kind, self.n, self.p, self.seed = kind, n, p, seed
        self.X, self.y, self.lambdas, self.path = X, y, lambdas, path

    def __repr__(self):
        return f"{self.kind}(n={self.n}, p={self.p}, seed={self.seed})"


def build_sweep(count=100, seed=20120901, n_range=(5, 20), p_range=(2, 40), n_lambda=5):
    """Seeded instances cycling through every generator kind, with their paths."""
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < count:
        kind = KINDS[len(cases) % len(KINDS)]
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        lo = 4 if kind == "averaged-column" else p_range[0]
        p = int(rng.integers(lo, p_range[1] + 1))
        s = int(rng.integers(2 ** 31))
        X, y = generate(kind, n, p, s)
        lams = lambda_grid(X, y, n_lambda, rng)
        cases.append(SweepCase(kind, n, p, s, X, y, lams, lars_path(X, y)))
    return cases


@pytest.fixture(scope="session")
def sweep():
    return build_sweep()
