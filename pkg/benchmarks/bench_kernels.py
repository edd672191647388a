"""Compare the numba and pure-numpy kernel paths.

    python benchmarks/bench_kernels.py [--repeat 5]

numpy.linalg.eigh (LAPACK) is timed alongside as a reference point.
"""

import argparse
import time

import numpy as np

from puritylens import _kernels


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_jacobi(dims, repeat):
    rng = np.random.default_rng(0)
    print(f"{'dim':>5} {'numba [ms]':>12} {'numpy [ms]':>12} {'lapack [ms]':>12} {'max |dlambda|':>14}")
    for n in dims:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = 0.5 * (g + g.conj().T)

        def run(kernel):
            a = h.copy()
            v = np.eye(n, dtype=np.complex128)
            kernel(a, v, 60)
            return np.sort(a.diagonal().real)

        lam_numba = run(_kernels.jacobi_numba)
        lam_numpy = run(_kernels._jacobi_numpy)
        t_numba = _best(lambda: run(_kernels.jacobi_numba), repeat)
        t_numpy = _best(lambda: run(_kernels._jacobi_numpy), repeat)
        t_lapack = _best(lambda: np.linalg.eigh(h), repeat)
        diff = np.max(np.abs(lam_numba - lam_numpy))
        print(f"{n:>5} {1e3 * t_numba:>12.3f} {1e3 * t_numpy:>12.3f} {1e3 * t_lapack:>12.3f} {diff:>14.2e}")


def bench_cos_series(sizes, repeat):
    print(f"{'points':>8} {'terms':>6} {'numba [ms]':>12} {'numpy [ms]':>12}")
    for points, terms in sizes:
        times = np.linspace(0.0, 30.0, points)
        weights = 0.25 ** np.arange(1, terms + 1)
        freqs = np.arange(1, terms + 1, dtype=float)
        out = np.empty(points)
        t_numba = _best(lambda: _kernels.cos_series_numba(times, weights, freqs, out), repeat)
        t_numpy = _best(lambda: _kernels._cos_series_numpy(times, weights, freqs, out), repeat)
        print(f"{points:>8} {terms:>6} {1e3 * t_numba:>12.3f} {1e3 * t_numpy:>12.3f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    # trigger compilation outside the timed region
    _kernels.jacobi_numba(np.eye(2, dtype=np.complex128), np.eye(2, dtype=np.complex128), 1)
    _kernels.cos_series_numba(np.zeros(1), np.zeros(1), np.zeros(1), np.zeros(1))
    print("Hermitian Jacobi eigensolver")
    bench_jacobi([4, 8, 16, 32, 64], args.repeat)
    print()
    print("weighted cosine series")
    bench_cos_series([(3000, 8), (3000, 40), (100000, 40)], args.repeat)


if __name__ == "__main__":
    main()
