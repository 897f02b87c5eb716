"""Vectorised numpy stencils on raw MAC arrays.

Tangential no-slip ghosts are the reflection ``w_ghost = -w_interior``.
"""

import numpy as np


def _ghost_pad_y(a):
    # pad the second axis with antisymmetric ghosts
    return np.concatenate((-a[:, :1], a, -a[:, -1:]), axis=1)


def _ghost_pad_x(a):
    return np.concatenate((-a[:1], a, -a[-1:]), axis=0)


def laplacian_u(u, hx, hy):
    out = np.zeros_like(u)
    up = _ghost_pad_y(u)
    c = u[1:-1]
    out[1:-1] = (
        (u[2:] - 2.0 * c + u[:-2]) / (hx * hx)
        + (up[1:-1, 2:] - 2.0 * c + up[1:-1, :-2]) / (hy * hy)
    )
    return out


def laplacian_v(v, hx, hy):
    out = np.zeros_like(v)
    vp = _ghost_pad_x(v)
    c = v[:, 1:-1]
    out[:, 1:-1] = (
        (vp[2:, 1:-1] - 2.0 * c + vp[:-2, 1:-1]) / (hx * hx)
        + (v[:, 2:] - 2.0 * c + v[:, :-2]) / (hy * hy)
    )
    return out


def divergence(u, v, hx, hy):
    return (u[1:] - u[:-1]) / hx + (v[:, 1:] - v[:, :-1]) / hy


def gradient(p, hx, hy):
    nx, ny = p.shape
    gu = np.zeros((nx + 1, ny))
    gv = np.zeros((nx, ny + 1))
    gu[1:-1] = (p[1:] - p[:-1]) / hx
    gv[:, 1:-1] = (p[:, 1:] - p[:, :-1]) / hy
    return gu, gv


def neumann_laplacian(p, hx, hy):
    gu, gv = gradient(p, hx, hy)
    return divergence(gu, gv, hx, hy)


def vorticity(u, v, hx, hy):
    up = _ghost_pad_y(u)
    vp = _ghost_pad_x(v)
    return (vp[1:] - vp[:-1]) / hx - (up[:, 1:] - up[:, :-1]) / hy


def curl_of_vorticity(w, hx, hy):
    cu = (w[:, 1:] - w[:, :-1]) / hy
    cv = -(w[1:] - w[:-1]) / hx
    return cu, cv


def advect_u(u, v, hx, hy):
    out = np.zeros_like(u)
    up = _ghost_pad_y(u)
    vbar = 0.25 * (v[:-1, :-1] + v[1:, :-1] + v[:-1, 1:] + v[1:, 1:])
    dudx = (u[2:] - u[:-2]) / (2.0 * hx)
    dudy = (up[1:-1, 2:] - up[1:-1, :-2]) / (2.0 * hy)
    out[1:-1] = u[1:-1] * dudx + vbar * dudy
    return out


def advect_v(u, v, hx, hy):
    out = np.zeros_like(v)
    vp = _ghost_pad_x(v)
    ubar = 0.25 * (u[:-1, :-1] + u[1:, :-1] + u[:-1, 1:] + u[1:, 1:])
    dvdx = (vp[2:, 1:-1] - vp[:-2, 1:-1]) / (2.0 * hx)
    dvdy = (v[:, 2:] - v[:, :-2]) / (2.0 * hy)
    out[:, 1:-1] = ubar * dvdx + v[:, 1:-1] * dvdy
    return out


def grad_norm_sq(u, v, hx, hy):
    """Discrete H1 seminorm squared, summation-by-parts partner of the Laplacians."""
    area = hx * hy
    wu = np.ones(u.shape[0])
    wu[0] = wu[-1] = 0.5
    du_x = np.sum((u[1:] - u[:-1]) ** 2) / (hx * hx)
    du_y = (
        np.sum(wu[:, None] * (u[:, 1:] - u[:, :-1]) ** 2)
        + 2.0 * np.sum(wu * (u[:, 0] ** 2 + u[:, -1] ** 2))
    ) / (hy * hy)
    wv = np.ones(v.shape[1])
    wv[0] = wv[-1] = 0.5
    dv_y = np.sum((v[:, 1:] - v[:, :-1]) ** 2) / (hy * hy)
    dv_x = (
        np.sum(wv[None, :] * (v[1:] - v[:-1]) ** 2)
        + 2.0 * np.sum(wv * (v[0] ** 2 + v[-1] ** 2))
    ) / (hx * hx)
    return area * (du_x + du_y + dv_x + dv_y)
