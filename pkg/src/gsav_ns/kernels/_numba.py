"""Loop-fused numba stencils; same contracts as the numpy backend."""

import numpy as np
from numba import njit


@njit(cache=True)
def laplacian_u(u, hx, hy):
    nxp, ny = u.shape
    out = np.zeros_like(u)
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    for i in range(1, nxp - 1):
        for j in range(ny):
            c = u[i, j]
            s = -u[i, j] if j == 0 else u[i, j - 1]
            n = -u[i, j] if j == ny - 1 else u[i, j + 1]
            out[i, j] = (u[i + 1, j] - 2.0 * c + u[i - 1, j]) * ihx2 + (n - 2.0 * c + s) * ihy2
    return out


@njit(cache=True)
def laplacian_v(v, hx, hy):
    nx, nyp = v.shape
    out = np.zeros_like(v)
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    for i in range(nx):
        for j in range(1, nyp - 1):
            c = v[i, j]
            w = -v[i, j] if i == 0 else v[i - 1, j]
            e = -v[i, j] if i == nx - 1 else v[i + 1, j]
            out[i, j] = (e - 2.0 * c + w) * ihx2 + (v[i, j + 1] - 2.0 * c + v[i, j - 1]) * ihy2
    return out


@njit(cache=True)
def divergence(u, v, hx, hy):
    nx, ny = v.shape[0], u.shape[1]
    out = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            out[i, j] = (u[i + 1, j] - u[i, j]) / hx + (v[i, j + 1] - v[i, j]) / hy
    return out


@njit(cache=True)
def gradient(p, hx, hy):
    nx, ny = p.shape
    gu = np.zeros((nx + 1, ny))
    gv = np.zeros((nx, ny + 1))
    for i in range(1, nx):
        for j in range(ny):
            gu[i, j] = (p[i, j] - p[i - 1, j]) / hx
    for i in range(nx):
        for j in range(1, ny):
            gv[i, j] = (p[i, j] - p[i, j - 1]) / hy
    return gu, gv


@njit(cache=True)
def neumann_laplacian(p, hx, hy):
    nx, ny = p.shape
    out = np.empty((nx, ny))
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    for i in range(nx):
        for j in range(ny):
            c = p[i, j]
            s = 0.0
            if i > 0:
                s += (p[i - 1, j] - c) * ihx2
            if i < nx - 1:
                s += (p[i + 1, j] - c) * ihx2
            if j > 0:
                s += (p[i, j - 1] - c) * ihy2
            if j < ny - 1:
                s += (p[i, j + 1] - c) * ihy2
            out[i, j] = s
    return out


@njit(cache=True)
def vorticity(u, v, hx, hy):
    nx, ny = v.shape[0], u.shape[1]
    w = np.empty((nx + 1, ny + 1))
    for i in range(nx + 1):
        for j in range(ny + 1):
            ve = -v[nx - 1, j] if i == nx else v[i, j]
            vw = -v[0, j] if i == 0 else v[i - 1, j]
            un = -u[i, ny - 1] if j == ny else u[i, j]
            us = -u[i, 0] if j == 0 else u[i, j - 1]
            w[i, j] = (ve - vw) / hx - (un - us) / hy
    return w


@njit(cache=True)
def curl_of_vorticity(w, hx, hy):
    nxp, nyp = w.shape
    cu = np.empty((nxp, nyp - 1))
    cv = np.empty((nxp - 1, nyp))
    for i in range(nxp):
        for j in range(nyp - 1):
            cu[i, j] = (w[i, j + 1] - w[i, j]) / hy
    for i in range(nxp - 1):
        for j in range(nyp):
            cv[i, j] = -(w[i + 1, j] - w[i, j]) / hx
    return cu, cv


@njit(cache=True)
def advect_u(u, v, hx, hy):
    nxp, ny = u.shape
    out = np.zeros_like(u)
    for i in range(1, nxp - 1):
        for j in range(ny):
            s = -u[i, j] if j == 0 else u[i, j - 1]
            n = -u[i, j] if j == ny - 1 else u[i, j + 1]
            vbar = 0.25 * (v[i - 1, j] + v[i, j] + v[i - 1, j + 1] + v[i, j + 1])
            out[i, j] = (u[i, j] * (u[i + 1, j] - u[i - 1, j]) / (2.0 * hx)
                         + vbar * (n - s) / (2.0 * hy))
    return out


@njit(cache=True)
def advect_v(u, v, hx, hy):
    nx, nyp = v.shape
    out = np.zeros_like(v)
    for i in range(nx):
        for j in range(1, nyp - 1):
            w = -v[i, j] if i == 0 else v[i - 1, j]
            e = -v[i, j] if i == nx - 1 else v[i + 1, j]
            ubar = 0.25 * (u[i, j - 1] + u[i + 1, j - 1] + u[i, j] + u[i + 1, j])
            out[i, j] = (ubar * (e - w) / (2.0 * hx)
                         + v[i, j] * (v[i, j + 1] - v[i, j - 1]) / (2.0 * hy))
    return out


@njit(cache=True)
def grad_norm_sq(u, v, hx, hy):
    nxp, ny = u.shape
    nx, nyp = v.shape
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    total = 0.0
    for i in range(nxp):
        wi = 0.5 if (i == 0 or i == nxp - 1) else 1.0
        for j in range(ny):
            if i < nxp - 1:
                d = u[i + 1, j] - u[i, j]
                total += d * d * ihx2
            if j < ny - 1:
                d = u[i, j + 1] - u[i, j]
                total += wi * d * d * ihy2
        total += wi * 2.0 * (u[i, 0] ** 2 + u[i, ny - 1] ** 2) * ihy2
    for j in range(nyp):
        wj = 0.5 if (j == 0 or j == nyp - 1) else 1.0
        for i in range(nx):
            if j < nyp - 1:
                d = v[i, j + 1] - v[i, j]
                total += d * d * ihy2
            if i < nx - 1:
                d = v[i + 1, j] - v[i, j]
                total += wj * d * d * ihx2
        total += wj * 2.0 * (v[0, j] ** 2 + v[nx - 1, j] ** 2) * ihx2
    return total * hx * hy
