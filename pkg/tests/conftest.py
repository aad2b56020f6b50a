import math

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("repo", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("repo")

PI2 = math.pi / 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unitary(rng, eig_one=False):
    """Haar-ish random 2x2 unitary; with ``eig_one`` it has eigenvalue +1."""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    if eig_one:
        a = rng.uniform(-math.pi, math.pi)
        return q @ np.diag([1.0, np.exp(1j * a)]) @ q.conj().T
    return q


# -- acceptance report ----------------------------------------------------------------

ACCEPTANCE: dict = {}
SUITE_BUDGET = 60.0


def pytest_sessionstart(session):
    session.config._started = __import__("time").perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    elapsed = __import__("time").perf_counter() - config._started
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    tr.write_line(f"suite runtime: {elapsed:.1f} s (budget {SUITE_BUDGET:.0f} s): "
                  f"{'PASS' if elapsed < SUITE_BUDGET else 'FAIL'}")
