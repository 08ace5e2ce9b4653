"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--batch 2000]

Both implementations are imported directly, so the DISTCHAOS_BACKEND flag
does not matter here.  Numba compile time is excluded by a warm-up call.
"""

import argparse
import time

import numpy as np

from distchaos import kernels
from distchaos.kernels import _numba_impl, _numpy_impl
from distchaos.ode import ProcessParams
from distchaos.segments import segment_u, segment_w
from distchaos.shift import all_words, build_pi_shift


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_advance_sets(impl, repeat):
    pi = build_pi_shift()
    mat = all_words(5, 8)
    lengths = np.full(mat.shape[0], 8, dtype=np.int64)
    starts = np.full(mat.shape[0], pi.all_vertices, dtype=np.uint64)
    impl.advance_sets(starts[:10], mat[:10], lengths[:10], pi.trans)
    return best_of(lambda: impl.advance_sets(starts, mat, lengths, pi.trans), repeat)


def bench_first_diff(impl, repeat):
    rng = np.random.default_rng(0)
    x = rng.integers(0, 2, 1 << 18)
    y = x.copy()
    y[rng.integers(0, x.size, 500)] ^= 1
    impl.first_diff_distances(x[:10], y[:10], 5)
    return best_of(lambda: impl.first_diff_distances(x, y, x.size), repeat)


def bench_track(impl, repeat, batch):
    p = ProcessParams()
    rng = np.random.default_rng(1)
    z0 = 0.9 * (rng.uniform(-1, 1, batch) + 1j * rng.uniform(-1, 1, batch))
    uk, up = segment_u(p).kernel_spec
    wk, wp = segment_w(p).kernel_spec

    def run(z):
        n = z.size
        return impl.track(z, np.zeros(n), np.full(n, p.period), np.full(n, 1e-2),
                          p.period / 1000, int(uk), kernels._params(up), int(wk),
                          kernels._params(wp), False, p.kappa, p.n_param, 1e-9, p.hmax,
                          10.0, 10_000_000)

    run(z0[:4])
    return best_of(lambda: run(z0), repeat)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--batch", type=int, default=2000, help="trajectories per track call")
    args = ap.parse_args(argv)
    rows = [
        ("advance_sets (5^8 words)", lambda m: bench_advance_sets(m, args.repeat)),
        ("first_diff_distances (2^18)", lambda m: bench_first_diff(m, args.repeat)),
        (f"track ({args.batch} orbits, 1 period)", lambda m: bench_track(m, args.repeat, args.batch)),
    ]
    print(f"{'kernel':34s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, fn in rows:
        a = fn(_numba_impl)
        b = fn(_numpy_impl)
        print(f"{name:34s} {a:10.4f} {b:10.4f} {b / a:8.1f}x")


if __name__ == "__main__":
    main()
