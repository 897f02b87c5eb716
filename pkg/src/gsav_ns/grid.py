"""Staggered (MAC) grid layout, field containers and discrete L2 geometry.

Layout on the rectangle (0, lx) x (0, ly), indices are ``[i, j]``:

    p[i, j]   cell centers      ((i + 1/2) hx, (j + 1/2) hy)   shape (nx, ny)
    u[i, j]   vertical faces    (i hx, (j + 1/2) hy)           shape (nx + 1, ny)
    v[i, j]   horizontal faces  ((i + 1/2) hx, j hy)           shape (nx, ny + 1)

Boundary faces are ``u[0, :]``, ``u[nx, :]``, ``v[:, 0]`` and ``v[:, ny]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GridMismatchError(ValueError):
    """Raised when fields living on different grids are combined."""


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise ValueError("cell counts must be integers")
        if self.nx < 4 or self.ny < 4:
            raise ValueError(f"need at least 4x4 cells, got {self.nx}x{self.ny}")
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError("domain extents must be positive")

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        x = (np.arange(self.nx) + 0.5) * self.hx
        y = (np.arange(self.ny) + 0.5) * self.hy
        return np.meshgrid(x, y, indexing="ij")

    def u_faces(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.nx + 1) * self.hx
        y = (np.arange(self.ny) + 0.5) * self.hy
        return np.meshgrid(x, y, indexing="ij")

    def v_faces(self) -> tuple[np.ndarray, np.ndarray]:
        x = (np.arange(self.nx) + 0.5) * self.hx
        y = np.arange(self.ny + 1) * self.hy
        return np.meshgrid(x, y, indexing="ij")

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.nx + 1) * self.hx
        y = np.arange(self.ny + 1) * self.hy
        return np.meshgrid(x, y, indexing="ij")

    @property
    def u_shape(self) -> tuple[int, int]:
        return (self.nx + 1, self.ny)

    @property
    def v_shape(self) -> tuple[int, int]:
        return (self.nx, self.ny + 1)

    @property
    def p_shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatchError(f"{a.grid} vs {b.grid}")


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Cell-centred samples."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.p_shape:
            raise ValueError(f"scalar field shape {values.shape} != {self.grid.p_shape}")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec) -> ScalarField:
        return cls(grid, np.zeros(grid.p_shape))

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> ScalarField:
        x, y = grid.cell_centers()
        return cls(grid, np.broadcast_to(func(x, y), grid.p_shape).copy())

    def mean(self) -> float:
        return float(self.values.mean())

    def __add__(self, other):
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return ScalarField(self.grid, c * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class VelocityField:
    """Face-centred velocity: ``u`` on vertical faces, ``v`` on horizontal faces."""

    grid: GridSpec
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != self.grid.u_shape:
            raise ValueError(f"u shape {u.shape} != {self.grid.u_shape}")
        if v.shape != self.grid.v_shape:
            raise ValueError(f"v shape {v.shape} != {self.grid.v_shape}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def zeros(cls, grid: GridSpec) -> VelocityField:
        return cls(grid, np.zeros(grid.u_shape), np.zeros(grid.v_shape))

    @classmethod
    def from_functions(cls, grid: GridSpec, fu, fv) -> VelocityField:
        xu, yu = grid.u_faces()
        xv, yv = grid.v_faces()
        u = np.broadcast_to(fu(xu, yu), grid.u_shape).copy()
        v = np.broadcast_to(fv(xv, yv), grid.v_shape).copy()
        return cls(grid, u, v)

    def boundary_max(self) -> float:
        """Largest normal component on the wall faces."""
        return float(max(
            np.abs(self.u[0]).max(), np.abs(self.u[-1]).max(),
            np.abs(self.v[:, 0]).max(), np.abs(self.v[:, -1]).max(),
        ))

    def is_dirichlet_conforming(self, atol: float = 0.0) -> bool:
        return self.boundary_max() <= atol

    def with_zero_boundary(self) -> VelocityField:
        u = self.u.copy()
        v = self.v.copy()
        u[0] = u[-1] = 0.0
        v[:, 0] = v[:, -1] = 0.0
        return VelocityField(self.grid, u, v)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.u).all() and np.isfinite(self.v).all())

    def __add__(self, other):
        _check_same_grid(self, other)
        return VelocityField(self.grid, self.u + other.u, self.v + other.v)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return VelocityField(self.grid, self.u - other.u, self.v - other.v)

    def __neg__(self):
        return VelocityField(self.grid, -self.u, -self.v)

    def __mul__(self, c):
        return VelocityField(self.grid, c * self.u, c * self.v)

    __rmul__ = __mul__


def _face_weights(n: int) -> np.ndarray:
    # trapezoid weights along the normal direction of a face family
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    return w


def inner_product_scalar(a: ScalarField, b: ScalarField) -> float:
    _check_same_grid(a, b)
    return float(a.grid.cell_area * np.sum(a.values * b.values))


def l2_norm_scalar(f: ScalarField) -> float:
    """Midpoint-rule L2 norm ``sqrt(hx hy sum f^2)``."""
    return float(np.sqrt(f.grid.cell_area * np.sum(f.values * f.values)))


def inner_product_velocity(a: VelocityField, b: VelocityField) -> float:
    """Face-weighted inner product; wall faces carry weight 1/2."""
    _check_same_grid(a, b)
    g = a.grid
    wu = _face_weights(g.nx)[:, None]
    wv = _face_weights(g.ny)[None, :]
    s = np.sum(wu * a.u * b.u) + np.sum(wv * a.v * b.v)
    return float(g.cell_area * s)


def l2_norm_velocity(w: VelocityField) -> float:
    return float(np.sqrt(max(inner_product_velocity(w, w), 0.0)))
