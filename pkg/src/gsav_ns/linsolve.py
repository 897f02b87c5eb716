"""Conjugate-gradient solvers for the two SPD systems of each time step.

* velocity Helmholtz ``(alpha - nu lap) w = rhs`` with ``w = 0`` on the walls;
* pure-Neumann pressure Poisson ``div grad p = div g`` on the zero-mean subspace.

Preconditioners: ``"none"``, ``"jacobi"`` and ``"spectral"``. The spectral
one applies the exact inverse of the constant-coefficient stencil through
fast sine/cosine transforms (the stencils are diagonalised by DST-I/DST-II
for the velocity components and DCT-II for cell-centred pressure), so CG
terminates in one or two sweeps on uniform grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft

from . import kernels
from .grid import GridSpec, ScalarField, VelocityField


DEFAULT_TOL = 1e-11
PRECONDITIONERS = ("none", "jacobi", "spectral")


@dataclass(frozen=True)
class SolveStats:
    iterations: int
    final_relative_residual: float
    converged: bool


class SolverError(RuntimeError):
    """CG failed to reach the requested tolerance."""

    def __init__(self, message: str, stats: SolveStats):
        super().__init__(f"{message} (iterations={stats.iterations}, "
                         f"relative residual={stats.final_relative_residual:.3e})")
        self.stats = stats


def default_maxiter(grid: GridSpec) -> int:
    return 10 * (grid.nx + grid.ny)


def _pcg(apply_a, b, precond, tol, maxiter, project=None):
    """Preconditioned CG from a zero initial guess.

    Convergence is declared on the recomputed residual ``b - A x`` rather
    than the recurrence residual. Returns ``(x, iterations, relres)``.
    """
    bnorm = np.sqrt(b @ b)
    x = np.zeros_like(b)
    if bnorm == 0.0:
        return x, 0, 0.0
    r = b.copy()
    z = precond(r)
    if project is not None:
        z = project(z)
    d = z.copy()
    rz = r @ z
    relres = 1.0
    for it in range(1, maxiter + 1):
        ad = apply_a(d)
        dad = d @ ad
        if not dad > 0.0:
            break
        alpha = rz / dad
        x += alpha * d
        r -= alpha * ad
        if project is not None:
            x = project(x)
            r = project(r)
        if np.sqrt(r @ r) <= tol * bnorm:
            r = b - apply_a(x)
            if project is not None:
                r = project(r)
            relres = np.sqrt(r @ r) / bnorm
            if relres <= tol:
                return x, it, relres
        z = precond(r)
        if project is not None:
            z = project(z)
        rz_new = r @ z
        d = z + (rz_new / rz) * d
        rz = rz_new
    r = b - apply_a(x)
    if project is not None:
        r = project(r)
    return x, maxiter, np.sqrt(r @ r) / bnorm


# -- velocity Helmholtz -------------------------------------------------------

def _split(vec, grid):
    nu_int = (grid.nx - 1) * grid.ny
    return (vec[:nu_int].reshape(grid.nx - 1, grid.ny),
            vec[nu_int:].reshape(grid.nx, grid.ny - 1))


def _pack(ui, vi):
    return np.concatenate((ui.ravel(), vi.ravel()))


def _embed(ui, vi, grid):
    u = np.zeros(grid.u_shape)
    v = np.zeros(grid.v_shape)
    u[1:-1] = ui
    v[:, 1:-1] = vi
    return u, v


def _eig_dirichlet(n, h):
    # DST-I modes of the n-1 interior nodes of a Dirichlet segment
    k = np.arange(1, n)
    return (2.0 - 2.0 * np.cos(np.pi * k / n)) / (h * h)


def _eig_ghost(n, h):
    # DST-II modes of n cells with antisymmetric ghosts
    k = np.arange(1, n + 1)
    return (2.0 - 2.0 * np.cos(np.pi * k / n)) / (h * h)


def _eig_neumann(n, h):
    # DCT-II modes of n cells with zero-flux ends
    k = np.arange(n)
    return (2.0 - 2.0 * np.cos(np.pi * k / n)) / (h * h)


@lru_cache(maxsize=32)
def _helmholtz_symbols(grid: GridSpec, alpha: float, nu: float):
    lam_u = alpha + nu * (_eig_dirichlet(grid.nx, grid.hx)[:, None]
                          + _eig_ghost(grid.ny, grid.hy)[None, :])
    lam_v = alpha + nu * (_eig_ghost(grid.nx, grid.hx)[:, None]
                          + _eig_dirichlet(grid.ny, grid.hy)[None, :])
    return lam_u, lam_v


def _helmholtz_diagonal(grid, alpha, nu):
    cx = 1.0 / grid.hx ** 2
    cy = 1.0 / grid.hy ** 2
    du = np.full((grid.nx - 1, grid.ny), alpha + nu * (2 * cx + 2 * cy))
    du[:, 0] += nu * cy
    du[:, -1] += nu * cy
    dv = np.full((grid.nx, grid.ny - 1), alpha + nu * (2 * cx + 2 * cy))
    dv[0] += nu * cx
    dv[-1] += nu * cx
    return _pack(du, dv)


def _helmholtz_preconditioner(kind, grid, alpha, nu):
    if kind == "none":
        return lambda r: r.copy()
    if kind == "jacobi":
        diag = _helmholtz_diagonal(grid, alpha, nu)
        return lambda r: r / diag
    if kind == "spectral":
        lam_u, lam_v = _helmholtz_symbols(grid, alpha, nu)

        def apply(r):
            ru, rv = _split(r, grid)
            su = fft.dst(fft.dst(ru, type=1, axis=0, norm="ortho"), type=2, axis=1, norm="ortho")
            sv = fft.dst(fft.dst(rv, type=2, axis=0, norm="ortho"), type=1, axis=1, norm="ortho")
            su /= lam_u
            sv /= lam_v
            zu = fft.idst(fft.idst(su, type=2, axis=1, norm="ortho"), type=1, axis=0, norm="ortho")
            zv = fft.idst(fft.idst(sv, type=1, axis=1, norm="ortho"), type=2, axis=0, norm="ortho")
            return _pack(zu, zv)

        return apply
    raise ValueError(f"unknown preconditioner {kind!r}; expected one of {PRECONDITIONERS}")


def helmholtz_apply(alpha: float, nu: float, w: VelocityField) -> VelocityField:
    """``(alpha - nu lap) w`` at interior faces; wall faces set to zero."""
    g = w.grid
    w0 = w.with_zero_boundary()
    lu = kernels.laplacian_u(w0.u, g.hx, g.hy)
    lv = kernels.laplacian_v(w0.v, g.hx, g.hy)
    return VelocityField(g, alpha * w0.u - nu * lu, alpha * w0.v - nu * lv)


def solve_helmholtz(alpha: float, nu: float, rhs: VelocityField, tol: float = DEFAULT_TOL,
                    maxiter: int | None = None, preconditioner: str = "spectral"):
    """Solve ``(alpha - nu lap) w = rhs`` for ``w`` vanishing on the walls.

    Only interior-face entries of ``rhs`` are used. Returns ``(w, SolveStats)``
    and raises :class:`SolverError` when CG does not converge.
    """
    if not (alpha > 0 and nu >= 0 and tol > 0):
        raise ValueError(f"need alpha > 0, nu >= 0, tol > 0 (got {alpha}, {nu}, {tol})")
    if not rhs.is_finite():
        raise ValueError("non-finite entries in Helmholtz right-hand side")
    grid = rhs.grid
    maxiter = default_maxiter(grid) if maxiter is None else maxiter
    hx, hy = grid.hx, grid.hy

    def apply_a(vec):
        u, v = _embed(*_split(vec, grid), grid)
        au = alpha * u - nu * kernels.laplacian_u(u, hx, hy)
        av = alpha * v - nu * kernels.laplacian_v(v, hx, hy)
        return _pack(au[1:-1], av[:, 1:-1])

    b = _pack(rhs.u[1:-1], rhs.v[:, 1:-1])
    precond = _helmholtz_preconditioner(preconditioner, grid, float(alpha), float(nu))
    x, its, relres = _pcg(apply_a, b, precond, tol, maxiter)
    stats = SolveStats(its, float(relres), bool(relres <= tol))
    if not stats.converged:
        raise SolverError("Helmholtz CG did not converge", stats)
    u, v = _embed(*_split(x, grid), grid)
    return VelocityField(grid, u, v), stats


# -- pressure Poisson ---------------------------------------------------------

@lru_cache(maxsize=32)
def _neumann_symbol(grid: GridSpec):
    lam = _eig_neumann(grid.nx, grid.hx)[:, None] + _eig_neumann(grid.ny, grid.hy)[None, :]
    inv = np.zeros_like(lam)
    inv[lam > 0] = 1.0 / lam[lam > 0]
    return inv


def _neumann_diagonal(grid):
    cx = np.full(grid.nx, 2.0 / grid.hx ** 2)
    cx[0] = cx[-1] = 1.0 / grid.hx ** 2
    cy = np.full(grid.ny, 2.0 / grid.hy ** 2)
    cy[0] = cy[-1] = 1.0 / grid.hy ** 2
    return (cx[:, None] + cy[None, :]).ravel()


def _poisson_preconditioner(kind, grid):
    if kind == "none":
        return lambda r: r.copy()
    if kind == "jacobi":
        diag = _neumann_diagonal(grid)
        return lambda r: r / diag
    if kind == "spectral":
        inv = _neumann_symbol(grid)
        shape = grid.p_shape

        def apply(r):
            s = fft.dctn(r.reshape(shape), type=2, norm="ortho")
            return fft.idctn(s * inv, type=2, norm="ortho").ravel()

        return apply
    raise ValueError(f"unknown preconditioner {kind!r}; expected one of {PRECONDITIONERS}")


def divergence_with_flux(g: VelocityField) -> ScalarField:
    """Right-hand side of the Neumann problem ``lap p = div g``, ``dp/dn = g.n``.

    The wall-face values of ``g`` are the Neumann data. They enter the cell
    divergence and the boundary flux with opposite signs, so only the
    interior faces survive and the result telescopes to zero total.
    """
    grid = g.grid
    gi = g.with_zero_boundary()
    return ScalarField(grid, kernels.divergence(gi.u, gi.v, grid.hx, grid.hy))


def solve_poisson_neumann(g: VelocityField, tol: float = DEFAULT_TOL,
                          maxiter: int | None = None, preconditioner: str = "spectral"):
    """Find zero-mean ``p`` with ``(grad p, grad q) = (g, grad q)`` for all cell fields ``q``.

    Returns ``(p, SolveStats)``; raises :class:`SolverError` on non-convergence
    and ``ValueError`` on non-finite data.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not g.is_finite():
        raise ValueError("non-finite entries in Poisson data")
    grid = g.grid
    maxiter = default_maxiter(grid) if maxiter is None else maxiter
    hx, hy = grid.hx, grid.hy
    shape = grid.p_shape

    def apply_a(vec):
        # negated so the operator is positive semidefinite
        return -kernels.neumann_laplacian(vec.reshape(shape), hx, hy).ravel()

    def project(vec):
        return vec - vec.mean()

    b = -divergence_with_flux(g).values.ravel()
    b = project(b)
    precond = _poisson_preconditioner(preconditioner, grid)
    x, its, relres = _pcg(apply_a, b, precond, tol, maxiter, project=project)
    stats = SolveStats(its, float(relres), bool(relres <= tol))
    if not stats.converged:
        raise SolverError("Neumann Poisson CG did not converge", stats)
    return ScalarField(grid, x.reshape(shape)), stats
