"""First-order consistent-splitting time stepping with a generalised SAV.

One step, in order:

1. predict ``u~``:  (u~ - u~_n)/dt - nu lap u~ = f - (u_n . grad) u_n - grad p_n
2. update ``R``:    (R - R_n)/dt = R/(E(u~) + K0) * (-nu |grad u~|^2 + (f, u~))
3. relax:           xi = R/(E(u~) + K0), eta = 1 - (1 - xi)^2, u = eta u~
4. pressure:        (grad p, grad q) = (f - (u . grad) u - nu curl curl u~, grad q)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

from .grid import GridSpec, ScalarField, VelocityField, inner_product_velocity
from .linsolve import DEFAULT_TOL, solve_helmholtz, solve_poisson_neumann
from .mms import eval_exact, eval_forcing
from .operators import advect, curl_curl, gradient, grad_norm


class SavDenominatorError(ArithmeticError):
    """``1 - dt * g <= 0`` in the closed-form R update.

    Signals that the stability hypotheses (bounded forcing, large enough K0)
    are violated for this run.
    """


class StepFailure(RuntimeError):
    def __init__(self, n: int, cause: BaseException):
        super().__init__(f"step {n} failed: {cause}")
        self.n = n


class RunAborted(RuntimeError):
    """A step failed; carries the state before the failure and the partial trace."""

    def __init__(self, failure: StepFailure, state, records):
        super().__init__(str(failure))
        self.failure = failure
        self.state = state
        self.records = records


@dataclass(frozen=True)
class SavState:
    r: float
    k0: float
    xi: float = 1.0
    eta: float = 1.0


@dataclass(frozen=True)
class StepRecord:
    n: int
    t: float
    r: float
    xi: float
    eta: float
    energy: float
    grad_norm: float
    # dissipation-minus-work rate; R decreases iff g < 0
    g: float = 0.0


@dataclass(frozen=True, eq=False)
class FlowState:
    t: float
    u: VelocityField
    u_tilde: VelocityField
    p: ScalarField
    sav: SavState


ForcingFn = Callable[[float], VelocityField]


@dataclass(frozen=True)
class SolverConfig:
    grid: GridSpec
    nu: float
    dt: float
    t_final: float
    k0: float = 1.0
    lin_tol: float = DEFAULT_TOL
    forcing: Optional[ForcingFn] = None
    preconditioner: str = "spectral"

    def __post_init__(self):
        if not (self.nu > 0 and self.dt > 0 and self.t_final >= 0 and self.k0 > 0):
            raise ValueError("need nu > 0, dt > 0, t_final >= 0, k0 > 0")
        if not self.lin_tol > 0:
            raise ValueError("lin_tol must be positive")
        ratio = self.t_final / self.dt
        if abs(ratio - round(ratio)) > 1e-12 * max(1.0, ratio):
            raise ValueError(f"t_final/dt = {ratio!r} is not a whole number of steps")
        if self.k0 < 1.0:
            warnings.warn(f"K0 = {self.k0} < 1: energy-stability hypothesis may not hold",
                          stacklevel=3)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def forcing_at(self, t: float) -> VelocityField:
        if self.forcing is None:
            return VelocityField.zeros(self.grid)
        return self.forcing(t)


def energy(w: VelocityField) -> float:
    return 0.5 * inner_product_velocity(w, w)


def predict_velocity(state: FlowState, f_next: VelocityField, cfg: SolverConfig) -> VelocityField:
    inv_dt = 1.0 / cfg.dt
    rhs = inv_dt * state.u_tilde + f_next - advect(state.u) - gradient(state.p)
    u_tilde, _ = solve_helmholtz(inv_dt, cfg.nu, rhs, tol=cfg.lin_tol,
                                 preconditioner=cfg.preconditioner)
    return u_tilde


def sav_rate(u_tilde: VelocityField, f_next: VelocityField, nu: float, k0: float) -> float:
    """``(-nu |grad u~|^2 + (f, u~)) / (E(u~) + K0)``."""
    gn = grad_norm(u_tilde)
    return (-nu * gn * gn + inner_product_velocity(f_next, u_tilde)) / (energy(u_tilde) + k0)


def advance_r(r: float, g: float, dt: float) -> float:
    """Closed-form solution of ``(R' - R)/dt = R' g``."""
    denom = 1.0 - dt * g
    if not denom > 0.0:
        raise SavDenominatorError(f"SAV denominator nonpositive: 1 - dt*g = {denom:.6g}")
    return r / denom


def update_sav(sav: SavState, u_tilde_next: VelocityField, f_next: VelocityField,
               dt: float, nu: float) -> SavState:
    if not sav.r > 0:
        raise SavDenominatorError(f"R must stay positive, got {sav.r}")
    g = sav_rate(u_tilde_next, f_next, nu, sav.k0)
    r = advance_r(sav.r, g, dt)
    xi = r / (energy(u_tilde_next) + sav.k0)
    return SavState(r=r, k0=sav.k0, xi=xi, eta=1.0 - (1.0 - xi) ** 2)


def relax(sav_next: SavState, u_tilde_next: VelocityField) -> VelocityField:
    return sav_next.eta * u_tilde_next


def update_pressure(u_next: VelocityField, u_tilde_next: VelocityField,
                    f_next: VelocityField, cfg: SolverConfig) -> ScalarField:
    data = f_next - advect(u_next) - cfg.nu * curl_curl(u_tilde_next)
    p, _ = solve_poisson_neumann(data, tol=cfg.lin_tol, preconditioner=cfg.preconditioner)
    return p


def step(state: FlowState, cfg: SolverConfig, n: int | None = None):
    """Advance one time step; returns ``(new_state, StepRecord)``."""
    n = int(round(state.t / cfg.dt)) + 1 if n is None else n
    t_next = state.t + cfg.dt
    try:
        f_next = cfg.forcing_at(t_next)
        u_tilde = predict_velocity(state, f_next, cfg)
        g = sav_rate(u_tilde, f_next, cfg.nu, state.sav.k0)
        sav = update_sav(state.sav, u_tilde, f_next, cfg.dt, cfg.nu)
        u = relax(sav, u_tilde)
        p = update_pressure(u, u_tilde, f_next, cfg)
    except Exception as exc:
        raise StepFailure(n, exc) from exc
    rec = StepRecord(n=n, t=t_next, r=sav.r, xi=sav.xi, eta=sav.eta,
                     energy=energy(u_tilde), grad_norm=grad_norm(u_tilde), g=g)
    if not all(math.isfinite(x) for x in (rec.r, rec.xi, rec.energy, rec.grad_norm)):
        raise StepFailure(n, FloatingPointError("non-finite monitor values"))
    return FlowState(t=t_next, u=u, u_tilde=u_tilde, p=p, sav=sav), rec


def run(cfg: SolverConfig, init: FlowState, callback=None):
    """Integrate ``cfg.n_steps`` steps from ``init``.

    ``callback(state, record)`` is invoked after every step. On failure a
    :class:`RunAborted` carrying the partial trace is raised.
    """
    state = init
    records: list[StepRecord] = []
    for k in range(cfg.n_steps):
        try:
            state, rec = step(state, cfg, n=k + 1)
        except StepFailure as exc:
            raise RunAborted(exc, state, records) from exc
        # keep t on the exact grid of step times
        state = replace(state, t=(k + 1) * cfg.dt)
        records.append(rec)
        if callback is not None:
            callback(state, rec)
    return state, records


def initialize(cfg: SolverConfig, u0: VelocityField) -> FlowState:
    """Start from ``u0`` (wall faces forced to zero) with ``xi = eta = 1``.

    ``R0 = E(u0) + K0`` and ``p0`` comes from the scheme's own pressure
    equation with the forcing at ``t = 0``.
    """
    u0 = u0.with_zero_boundary()
    sav = SavState(r=energy(u0) + cfg.k0, k0=cfg.k0)
    p0 = update_pressure(u0, u0, cfg.forcing_at(0.0), cfg)
    return FlowState(t=0.0, u=u0, u_tilde=u0, p=p0, sav=sav)


def mms_config(ex, grid: GridSpec, nu: float, dt: float, t_final: float, **kw) -> SolverConfig:
    """Solver configuration forced by a manufactured solution."""
    return SolverConfig(grid=grid, nu=nu, dt=dt, t_final=t_final,
                        forcing=lambda t: eval_forcing(ex, nu, t, grid), **kw)


def initialize_exact(cfg: SolverConfig, ex) -> FlowState:
    """:func:`initialize` from the sampled exact velocity at ``t = 0``."""
    u0, _ = eval_exact(ex, 0.0, cfg.grid)
    return initialize(cfg, u0)
