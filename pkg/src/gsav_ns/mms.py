"""Manufactured solutions, their forcing, and error norms against a numerical state.

Forcing is derived symbolically, ``f = u_t + (u . grad) u - nu lap u + grad p``,
and compiled to numpy with ``sympy.lambdify``; it is never obtained by
differencing sampled fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy as sp

from .grid import (GridSpec, ScalarField, VelocityField, l2_norm_scalar,
                   l2_norm_velocity)
from .operators import grad_norm, interior_face_gradient_norm

X, Y, T, NU = sp.symbols("x y t nu", real=True)


@dataclass(frozen=True)
class ExactSolution:
    """Closed-form velocity/pressure pair on the unit square.

    Build with :meth:`from_expressions`; the numeric evaluators take
    ``(x, y, t)`` and the forcing evaluators ``(x, y, t, nu)``.
    """

    name: str
    u1_expr: sp.Expr
    u2_expr: sp.Expr
    p_expr: sp.Expr
    f1_expr: sp.Expr
    f2_expr: sp.Expr
    u1: Callable = field(repr=False, compare=False)
    u2: Callable = field(repr=False, compare=False)
    p: Callable = field(repr=False, compare=False)
    f1: Callable = field(repr=False, compare=False)
    f2: Callable = field(repr=False, compare=False)

    @classmethod
    def from_expressions(cls, name: str, u1, u2, p) -> ExactSolution:
        """Accepts sympy expressions (or strings) in ``x, y, t``."""
        loc = {"x": X, "y": Y, "t": T, "nu": NU, "pi": sp.pi}
        u1, u2, p = (sp.sympify(e, locals=loc) for e in (u1, u2, p))
        f1, f2 = momentum_forcing(u1, u2, p)
        lam3 = lambda e: sp.lambdify((X, Y, T), e, "numpy")
        lam4 = lambda e: sp.lambdify((X, Y, T, NU), e, "numpy")
        return cls(name, u1, u2, p, f1, f2,
                   lam3(u1), lam3(u2), lam3(p), lam4(f1), lam4(f2))

    def divergence_expr(self) -> sp.Expr:
        return sp.simplify(sp.diff(self.u1_expr, X) + sp.diff(self.u2_expr, Y))


def momentum_forcing(u1, u2, p):
    def lap(e):
        return sp.diff(e, X, 2) + sp.diff(e, Y, 2)

    f1 = (sp.diff(u1, T) + u1 * sp.diff(u1, X) + u2 * sp.diff(u1, Y)
          - NU * lap(u1) + sp.diff(p, X))
    f2 = (sp.diff(u2, T) + u1 * sp.diff(u2, X) + u2 * sp.diff(u2, Y)
          - NU * lap(u2) + sp.diff(p, Y))
    return sp.expand(f1), sp.expand(f2)


EXAMPLE1 = ExactSolution.from_expressions(
    "example1",
    -T * X**2 * (X - 1)**2 * Y * (Y - 1) * (2 * Y - 1),
    T * Y**2 * (Y - 1)**2 * X * (X - 1) * (2 * X - 1),
    T * (X**3 - sp.Rational(1, 4)),
)

EXAMPLE2 = ExactSolution.from_expressions(
    "example2",
    sp.sin(T) * sp.sin(sp.pi * X)**2 * sp.sin(2 * sp.pi * Y),
    -sp.sin(T) * sp.sin(2 * sp.pi * X) * sp.sin(sp.pi * Y)**2,
    sp.sin(T) * (sp.sin(sp.pi * Y) - 2 / sp.pi),
)

_REGISTRY: dict[str, ExactSolution] = {"example1": EXAMPLE1, "example2": EXAMPLE2}


def register_example(sol: ExactSolution) -> None:
    _REGISTRY[sol.name] = sol


def get_example(key) -> ExactSolution:
    """Look up by name, or by the integers 1 and 2 for the built-in cases."""
    name = f"example{key}" if str(key).isdigit() else str(key)
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown example {key!r}; known: {sorted(_REGISTRY)}") from None


def eval_exact(ex: ExactSolution, t: float, grid: GridSpec):
    """Velocity at face centres and pressure at cell centres at time ``t``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    vel = VelocityField.from_functions(grid, lambda x, y: ex.u1(x, y, t),
                                       lambda x, y: ex.u2(x, y, t))
    p = ScalarField.from_function(grid, lambda x, y: ex.p(x, y, t))
    return vel, p


def eval_forcing(ex: ExactSolution, nu: float, t: float, grid: GridSpec) -> VelocityField:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return VelocityField.from_functions(grid, lambda x, y: ex.f1(x, y, t, nu),
                                        lambda x, y: ex.f2(x, y, t, nu))


@dataclass(frozen=True)
class ErrorNorms:
    e_u: float
    grad_e_u: float
    e_p: float
    grad_e_p: float


def error_norms(state, ex: ExactSolution, t: float) -> ErrorNorms:
    """Spatial error norms of ``state.u`` and ``state.p`` against ``ex`` at ``t``.

    The discrete pressure is mean-shifted before comparison.
    """
    grid = state.u.grid
    u_ex, p_ex = eval_exact(ex, t, grid)
    eu = state.u - u_ex
    p = state.p
    ep = ScalarField(grid, p.values - p.mean()) - p_ex
    return ErrorNorms(
        e_u=l2_norm_velocity(eu),
        grad_e_u=grad_norm(eu),
        e_p=l2_norm_scalar(ep),
        grad_e_p=interior_face_gradient_norm(ep),
    )
