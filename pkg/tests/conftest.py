import numpy as np
import pytest

from airfoilgan import _pykernels, kernels

try:
    from airfoilgan import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request, monkeypatch):
    """Run a test once per available kernel implementation."""
    monkeypatch.setattr(kernels, "_impl", request.param)
    return request.param


@pytest.fixture
def nprng():
    return np.random.default_rng(20240101)


def central_diff(f, x, h=1e-6):
    """Central finite-difference gradient of scalar ``f`` at array ``x``."""
    x = np.array(x, dtype=np.float64)
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        fp = f(x)
        flat[i] = old - h
        fm = f(x)
        flat[i] = old
        gf[i] = (fp - fm) / (2 * h)
    return g


_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(criterion, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}"
        _ACCEPTANCE.append(line + (f": {detail}" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
