"""Matrix-free MAC differential operators with no-slip ghost cells."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import GridSpec, ScalarField, VelocityField


@dataclass(frozen=True, eq=False)
class NodeField:
    """Samples at cell corners ``(i hx, j hy)``; holds the discrete vorticity."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        shape = (self.grid.nx + 1, self.grid.ny + 1)
        if values.shape != shape:
            raise ValueError(f"node field shape {values.shape} != {shape}")
        object.__setattr__(self, "values", values)


def laplacian_velocity(w: VelocityField) -> VelocityField:
    """5-point Laplacian at interior faces; wall-face outputs are zero.

    Normal-direction neighbours on the wall are read directly, tangential
    neighbours outside the wall are the reflected ghosts ``-w``.
    """
    g = w.grid
    return VelocityField(
        g,
        kernels.laplacian_u(w.u, g.hx, g.hy),
        kernels.laplacian_v(w.v, g.hx, g.hy),
    )


def divergence(w: VelocityField) -> ScalarField:
    g = w.grid
    return ScalarField(g, kernels.divergence(w.u, w.v, g.hx, g.hy))


def gradient(p: ScalarField) -> VelocityField:
    """Face-normal pressure differences; wall faces are left at zero."""
    g = p.grid
    gu, gv = kernels.gradient(p.values, g.hx, g.hy)
    return VelocityField(g, gu, gv)


def vorticity(w: VelocityField) -> NodeField:
    """``dv/dx - du/dy`` at every node, wall nodes included via ghosts."""
    g = w.grid
    return NodeField(g, kernels.vorticity(w.u, w.v, g.hx, g.hy))


def curl_curl(w: VelocityField) -> VelocityField:
    """``curl curl w = (d omega/dy, -d omega/dx)`` at all faces, wall faces included."""
    g = w.grid
    cu, cv = kernels.curl_of_vorticity(vorticity(w).values, g.hx, g.hy)
    return VelocityField(g, cu, cv)


def advect(w: VelocityField) -> VelocityField:
    """Convective term ``(w . grad) w`` with centred differences.

    Transverse velocities are four-point averages of the neighbouring faces.
    """
    g = w.grid
    return VelocityField(
        g,
        kernels.advect_u(w.u, w.v, g.hx, g.hy),
        kernels.advect_v(w.u, w.v, g.hx, g.hy),
    )


def grad_norm(w: VelocityField) -> float:
    """Discrete H1 seminorm with ``(-lap w, w) = grad_norm(w)**2`` for no-slip ``w``."""
    g = w.grid
    return float(np.sqrt(max(kernels.grad_norm_sq(w.u, w.v, g.hx, g.hy), 0.0)))


def neumann_laplacian(p: ScalarField) -> ScalarField:
    """Cell-centred 5-point Laplacian with zero-flux walls (``div grad``)."""
    g = p.grid
    return ScalarField(g, kernels.neumann_laplacian(p.values, g.hx, g.hy))


def interior_face_gradient_norm(p: ScalarField) -> float:
    """L2 norm of the face gradient over interior faces."""
    g = p.grid
    gu, gv = kernels.gradient(p.values, g.hx, g.hy)
    return float(np.sqrt(g.cell_area * (np.sum(gu * gu) + np.sum(gv * gv))))
