"""Stencil kernel dispatch.

The backend is chosen at import time from ``GSAV_NS_BACKEND`` (``numba`` or
``numpy``). Without the variable, numba is used when it imports cleanly.
``use_backend`` switches at runtime, which the benchmark and the
backend-agreement tests rely on.
"""

import importlib
import os

BACKENDS = ("numba", "numpy")

_impl = None


def _load(name):
    return importlib.import_module(f"{__name__}._{name}")


def use_backend(name: str) -> None:
    global _impl
    if name not in BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; expected one of {BACKENDS}")
    _impl = _load(name)


def active_backend() -> str:
    return _impl.__name__.rsplit("._", 1)[-1]


def _default_backend():
    requested = os.environ.get("GSAV_NS_BACKEND", "").strip().lower()
    if requested:
        return requested
    try:
        importlib.import_module("numba")
    except ImportError:
        return "numpy"
    return "numba"


use_backend(_default_backend())


def laplacian_u(u, hx, hy):
    return _impl.laplacian_u(u, hx, hy)


def laplacian_v(v, hx, hy):
    return _impl.laplacian_v(v, hx, hy)


def divergence(u, v, hx, hy):
    return _impl.divergence(u, v, hx, hy)


def gradient(p, hx, hy):
    return _impl.gradient(p, hx, hy)


def neumann_laplacian(p, hx, hy):
    return _impl.neumann_laplacian(p, hx, hy)


def vorticity(u, v, hx, hy):
    return _impl.vorticity(u, v, hx, hy)


def curl_of_vorticity(w, hx, hy):
    return _impl.curl_of_vorticity(w, hx, hy)


def advect_u(u, v, hx, hy):
    return _impl.advect_u(u, v, hx, hy)


def advect_v(u, v, hx, hy):
    return _impl.advect_v(u, v, hx, hy)


def grad_norm_sq(u, v, hx, hy):
    return float(_impl.grad_norm_sq(u, v, hx, hy))
