import numpy as np
import pytest

from gsav_ns import kernels
from gsav_ns.grid import GridSpec, ScalarField, VelocityField


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=kernels.BACKENDS)
def backend(request):
    previous = kernels.active_backend()
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


def random_velocity(grid: GridSpec, rng, conforming=True, integer=False):
    if integer:
        u = rng.integers(-64, 64, grid.u_shape).astype(float)
        v = rng.integers(-64, 64, grid.v_shape).astype(float)
    else:
        u = rng.standard_normal(grid.u_shape)
        v = rng.standard_normal(grid.v_shape)
    w = VelocityField(grid, u, v)
    return w.with_zero_boundary() if conforming else w


def random_scalar(grid: GridSpec, rng, integer=False):
    if integer:
        return ScalarField(grid, rng.integers(-64, 64, grid.p_shape).astype(float))
    return ScalarField(grid, rng.standard_normal(grid.p_shape))


_SWEEPS = {}


def reference_sweep(example: str, nu: float, nx: int = 250):
    """Default 250x250 sweep (dt = 1/10 ... 1/80, T = 1, K0 = 1), cached per session."""
    from gsav_ns.harness import SweepConfig, run_sweep

    key = (example, nu, nx)
    if key not in _SWEEPS:
        _SWEEPS[key] = run_sweep(SweepConfig(example=example, nu=nu, nx=nx))
    return _SWEEPS[key]


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, title: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES[number] = f"criterion {number}: {status}  {title}" + (f"  [{detail}]" if detail else "")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
