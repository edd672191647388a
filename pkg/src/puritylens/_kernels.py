"""
Hot numeric kernels.

Each kernel exists twice: a scalar-loop version compiled with numba ``@njit``
and a pure-numpy version that vectorizes the inner loops with slices. The
module-level names (``jacobi_hermitian``, ``cos_series``) point at the numba
build unless numba is missing or ``PURITYLENS_DISABLE_NUMBA`` is set.

Both Jacobi versions apply the same rotations in the same order, so they agree
to rounding.
"""

import math

import numpy as np

from ._config import numba_disabled

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        return decorator


_TINY = 1e-290
_EPS = 2.220446049250313e-16


def _jacobi_loops(a, v, max_sweeps):
    # Cyclic complex Jacobi on a (n, n) Hermitian array, in place.
    # Accumulates the rotations into v. Returns the sweep count, or -1 when
    # max_sweeps ran out before a rotation-free sweep.
    n = a.shape[0]
    for sweep in range(max_sweeps):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                mag = abs(g)
                if mag <= _TINY:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                if mag <= _EPS * math.sqrt(abs(app) * abs(aqq)):
                    continue
                rotated += 1
                e = g / mag
                ec = e.conjugate()
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                se = s * e
                sec = s * ec
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - sec * akq
                    a[k, q] = se * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - se * aqk
                    a[q, k] = sec * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - sec * vkq
                    v[k, q] = se * vkp + c * vkq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
        if rotated == 0:
            return sweep + 1
    return -1


def _jacobi_numpy(a, v, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                mag = abs(g)
                if mag <= _TINY:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                if mag <= _EPS * math.sqrt(abs(app) * abs(aqq)):
                    continue
                rotated += 1
                e = g / mag
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0)), theta)
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                se = s * e
                sec = s * e.conjugate()
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - sec * col_q
                a[:, q] = se * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - se * row_q
                a[q, :] = sec * row_p + c * row_q
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - sec * vq
                v[:, q] = se * vp + c * vq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
        if rotated == 0:
            return sweep + 1
    return -1


def _cos_series_loops(times, weights, freqs, out):
    # out[i] = sum_n weights[n] * cos(freqs[n] * times[i])
    for i in range(times.shape[0]):
        acc = 0.0
        t = times[i]
        for n in range(weights.shape[0]):
            acc += weights[n] * math.cos(freqs[n] * t)
        out[i] = acc


def _cos_series_numpy(times, weights, freqs, out):
    out[:] = np.cos(np.outer(times, freqs)) @ weights


jacobi_numba = njit(cache=True)(_jacobi_loops)
cos_series_numba = njit(cache=True)(_cos_series_loops)


def backend() -> str:
    return "numpy" if numba_disabled() or not NUMBA_AVAILABLE else "numba"


def jacobi_hermitian(a, v, max_sweeps):
    if backend() == "numba":
        return jacobi_numba(a, v, max_sweeps)
    return _jacobi_numpy(a, v, max_sweeps)


def cos_series(times, weights, freqs):
    times = np.ascontiguousarray(times, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    out = np.empty(times.shape[0])
    if backend() == "numba":
        cos_series_numba(times, weights, freqs, out)
    else:
        _cos_series_numpy(times, weights, freqs, out)
    return out
