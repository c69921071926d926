"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--points 10201]

Prints best-of-N wall time per kernel and backend, plus the largest
absolute difference between the two backends' results.
"""
import argparse
import math
import time

import numpy as np

from pacs import _kernels_py
from pacs.fock import coherent_state

try:
    from pacs import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(points, cutoff):
    rng = np.random.default_rng(0)
    c = rng.normal(size=(cutoff + 1, cutoff + 1)) + 1j * rng.normal(size=(cutoff + 1, cutoff + 1))
    c /= np.linalg.norm(c)
    side = int(math.isqrt(points))
    xs = np.linspace(-6, 6, side)
    betas = ((xs[:, None] + 1j * xs[None, :]) / math.sqrt(2)).ravel()
    vec = coherent_state(1.0).amplitudes[None, :]
    m_max = 200
    return {
        f"beam_splitter_apply (N={cutoff})": lambda k: k.beam_splitter_apply(c, 0.3, cutoff),
        f"displaced_parity ({betas.size} pts, M={m_max})": lambda k: k.displaced_parity(vec, betas, m_max),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--points", type=int, default=10201)
    ap.add_argument("--cutoff", type=int, default=120)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the numpy fallback is available")
    print(f"{'kernel':<42}{'numpy s':>10}{'compiled s':>12}{'speedup':>9}{'max |diff|':>12}")
    for name, run in cases(args.points, args.cutoff).items():
        t_py, r_py = best_of(lambda: run(_kernels_py), args.repeat)
        if _kernels is None:
            print(f"{name:<42}{t_py:>10.3f}")
            continue
        t_c, r_c = best_of(lambda: run(_kernels), args.repeat)
        r_py = r_py if isinstance(r_py, tuple) else (r_py,)
        r_c = r_c if isinstance(r_c, tuple) else (r_c,)
        diff = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) for a, b in zip(r_py, r_c))
        print(f"{name:<42}{t_py:>10.3f}{t_c:>12.3f}{t_py / t_c:>8.1f}x{diff:>12.2e}")


if __name__ == "__main__":
    main()
