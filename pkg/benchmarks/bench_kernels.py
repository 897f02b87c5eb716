"""Compare the numba and numpy stencil backends.

Times each kernel on random fields and one full time step of Example 1.

    python benchmarks/bench_kernels.py --nx 250 --repeat 50
"""

import argparse
import time

import numpy as np

from gsav_ns import kernels
from gsav_ns.grid import GridSpec
from gsav_ns.mms import EXAMPLE1
from gsav_ns.stepper import initialize_exact, mms_config, step


def bench(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nx", type=int, default=250)
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args()

    g = GridSpec(args.nx, args.nx)
    rng = np.random.default_rng(0)
    u = rng.standard_normal(g.u_shape)
    v = rng.standard_normal(g.v_shape)
    p = rng.standard_normal(g.p_shape)
    w = rng.standard_normal((g.nx + 1, g.ny + 1))
    h = g.hx
    cases = {
        "laplacian_u": lambda: kernels.laplacian_u(u, h, h),
        "laplacian_v": lambda: kernels.laplacian_v(v, h, h),
        "divergence": lambda: kernels.divergence(u, v, h, h),
        "gradient": lambda: kernels.gradient(p, h, h),
        "neumann_laplacian": lambda: kernels.neumann_laplacian(p, h, h),
        "vorticity": lambda: kernels.vorticity(u, v, h, h),
        "curl_of_vorticity": lambda: kernels.curl_of_vorticity(w, h, h),
        "advect_u": lambda: kernels.advect_u(u, v, h, h),
        "advect_v": lambda: kernels.advect_v(u, v, h, h),
        "grad_norm_sq": lambda: kernels.grad_norm_sq(u, v, h, h),
    }
    cfg = mms_config(EXAMPLE1, g, 1.0, 0.1, 1.0)

    results = {}
    for backend in kernels.BACKENDS:
        kernels.use_backend(backend)
        times = {name: bench(fn, args.repeat) for name, fn in cases.items()}
        state = initialize_exact(cfg, EXAMPLE1)
        times["full step"] = bench(lambda: step(state, cfg), max(1, args.repeat // 10))
        results[backend] = times

    print(f"grid {g.nx}x{g.ny}, mean seconds per call")
    print(f"{'kernel':<20}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name in results["numba"]:
        a, b = results["numba"][name], results["numpy"][name]
        print(f"{name:<20}{a:12.3e}{b:12.3e}{b / a:10.2f}")


if __name__ == "__main__":
    main()
