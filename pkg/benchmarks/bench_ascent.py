"""Time the compiled ascent kernel against the numpy fallback.

Both kernels get the same reduced pencils and start points, so the outputs
are compared as well as the wall-clock times.

Usage::

    python3 benchmarks/bench_ascent.py --restarts 200 --repeat 3
"""

import argparse
import sys
import time

import numpy as np

from rovir._ascent_py import ascend_batch as ascend_python
from rovir.oracle import OracleConfig, start_point

try:
    from rovir._ascent import ascend_batch as ascend_cython
except ImportError:
    ascend_cython = None


def random_pencil(rng, nc):
    G = rng.standard_normal((nc, nc)) + 1j * rng.standard_normal((nc, nc))
    H = rng.standard_normal((nc, nc)) + 1j * rng.standard_normal((nc, nc))
    return G @ G.conj().T, H @ H.conj().T + 0.1 * np.eye(nc)


def best_time(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nc", type=int, nargs="+", default=[4, 8])
    parser.add_argument("--nv", type=int, default=2)
    parser.add_argument("--restarts", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if ascend_cython is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`")
        return 1

    cfg = OracleConfig(restarts=args.restarts)
    rng = np.random.default_rng(args.seed)
    print(f"{'nc':>4} {'nv':>3} {'numpy [s]':>10} {'cython [s]':>11} {'speedup':>8} {'max |df|':>9}")
    for nc in args.nc:
        A, B = random_pencil(rng, nc)
        W0 = np.stack([start_point(args.seed, r, nc, args.nv) for r in range(cfg.restarts)])
        call = (A, B, W0, 0.0, 0.0, cfg.max_iters, cfg.step, cfg.rel_tol)
        t_py, (_, f_py, _) = best_time(lambda: ascend_python(*call), args.repeat)
        t_cy, (_, f_cy, _) = best_time(lambda: ascend_cython(*call), args.repeat)
        diff = float(np.max(np.abs(f_py - f_cy)))
        print(f"{nc:>4} {args.nv:>3} {t_py:>10.4f} {t_cy:>11.4f} {t_py / t_cy:>7.1f}x {diff:>9.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
