"""Shared fixtures plus the acceptance-criteria summary printer."""

import re

import numpy as np
import pytest

from horograph.kernels import PointState

CRITERIA = {
    1: "oracle residuals vanish at 1000 random states (exact derivatives)",
    2: "sub/supersolution residual signs are strict at 1000 random states",
    3: "manufactured-solution convergence order in [1.9, 2.1], <= 12 iters, <= 60 s",
    4: "length pinching f_min < g < barrier radius on the continuation suite",
    5: "homotopy endpoints: trivial branch exact, eps descent gaps decrease",
    6: "existence-hypothesis checker reproduces the width-2/width-10/shift facts",
    7: "global gradient bound holds; Gaussian-ramp identities to 1e-10",
    8: "barrier constants satisfy their conditions; collar signs certified",
    9: "translation covariance exact; rescaling covariance at state and field level",
    10: "Euclidean extension: affine data exact, maximum principle holds",
}

_results: dict[int, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if m:
        _results[int(m.group(1))] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for k in sorted(_results):
        label = "PASS" if _results[k] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {k:2d}: {label}  {CRITERIA[k]}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_state(rng, n=None, eps=None) -> PointState:
    """A generic valid point state for property sweeps."""
    n = n if n is not None else int(rng.integers(2, 5))
    g = float(rng.uniform(0.2, 3.0))
    grad = rng.normal(0.0, 1.0, size=n)
    h = rng.normal(0.0, 1.0, size=(n, n))
    hess = 0.5 * (h + h.T)
    eps = float(rng.uniform(0.0, 1.0)) if eps is None else eps
    return PointState(n=n, g=g, grad=grad, hess=hess, eps=eps)


@pytest.fixture
def make_state():
    return random_state
