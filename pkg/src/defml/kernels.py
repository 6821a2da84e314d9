"""Hot numeric loops: monic recurrence evaluation and symmetric tridiagonal spectra.

Each kernel has a numba version (``*_nb``) and a numpy version (``*_np``).
The unsuffixed names dispatch to one of them according to
:data:`defml._accel.USE_NUMBA`.  The tridiagonal matrices here always have
a zero diagonal; off-diagonal entries are passed as ``b`` (the square
roots of the recurrence coefficients).
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, njit

BACKEND = "numba" if USE_NUMBA else "numpy"

_EPS = np.finfo(np.float64).eps
_TINY = np.finfo(np.float64).tiny


class EigenConvergenceError(RuntimeError):
    pass


# monic three-term recurrence ---------------------------------------------------

def monic_values_np(x: np.ndarray, beta: np.ndarray, n_max: int) -> np.ndarray:
    """Rows ``p_0..p_{n_max}`` of ``p_{k+1} = x p_k - beta[k-1] p_{k-1}``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for k in range(1, n_max):
        out[k + 1] = x * out[k] - beta[k - 1] * out[k - 1]
    return out


@njit
def _monic_values_loop(x, beta, n_max):
    m = x.shape[0]
    out = np.empty((n_max + 1, m))
    for j in range(m):
        xj = x[j]
        p0 = 1.0
        out[0, j] = p0
        if n_max >= 1:
            p1 = xj
            out[1, j] = p1
            for k in range(1, n_max):
                p2 = xj * p1 - beta[k - 1] * p0
                out[k + 1, j] = p2
                p0 = p1
                p1 = p2
    return out


def monic_values_nb(x: np.ndarray, beta: np.ndarray, n_max: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(x.reshape(-1))
    out = _monic_values_loop(flat, np.ascontiguousarray(beta, dtype=np.float64), n_max)
    return out.reshape((n_max + 1,) + x.shape)


# implicit QL --------------------------------------------------------------------

def _tridiag_ql_impl(d, e, max_iter):
    # Implicit-shift QL on (d, e); e[i] couples rows i and i+1, e[n-1] unused.
    # Tracks only the first row of the eigenvector matrix.
    n = d.shape[0]
    d = d.copy()
    e = e.copy()
    z = np.zeros(n)
    z[0] = 1.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 2.220446049250313e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                return d, z, False
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, z, True


_tridiag_ql_jit = njit(_tridiag_ql_impl)


def _ql_prepare(b: np.ndarray, n: int):
    d = np.zeros(n)
    e = np.zeros(n)
    e[: n - 1] = b[: n - 1]
    return d, e


def _ql_finish(d, z, ok):
    if not ok:
        raise EigenConvergenceError("implicit QL iteration did not converge")
    order = np.argsort(d, kind="stable")
    return d[order], z[order] ** 2


def tridiag_ql_np(b: np.ndarray, n: int, max_iter: int = 60):
    """Eigenvalues (ascending) and squared first eigenvector components."""
    d, e = _ql_prepare(np.asarray(b, dtype=np.float64), n)
    return _ql_finish(*_tridiag_ql_impl(d, e, max_iter))


def tridiag_ql_nb(b: np.ndarray, n: int, max_iter: int = 60):
    d, e = _ql_prepare(np.asarray(b, dtype=np.float64), n)
    return _ql_finish(*_tridiag_ql_jit(d, e, max_iter))


# Sturm bisection ----------------------------------------------------------------

def _gershgorin(b: np.ndarray, n: int) -> float:
    r = np.zeros(n)
    r[: n - 1] += np.abs(b[: n - 1])
    r[1:] += np.abs(b[: n - 1])
    return float(r.max()) if n else 0.0


def sturm_count_np(b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each entry of ``x``."""
    x = np.asarray(x, dtype=np.float64)
    n = b.shape[0] + 1
    q = -x.copy()
    q[q == 0.0] = -_TINY
    count = (q < 0).astype(np.int64)
    with np.errstate(over="ignore"):
        # an infinite pivot is a valid Sturm sign
        for i in range(1, n):
            q = -x - b[i - 1] ** 2 / q
            q[q == 0.0] = -_TINY
            count += q < 0
    return count


def bisect_eigvals_np(b: np.ndarray, n: int) -> np.ndarray:
    """All eigenvalues by simultaneous vectorised bisection on Sturm counts."""
    b = np.asarray(b, dtype=np.float64)[: n - 1]
    if n == 1:
        return np.zeros(1)
    bound = _gershgorin(b, n) * (1 + 4 * _EPS) + _TINY
    lo = np.full(n, -bound)
    hi = np.full(n, bound)
    idx = np.arange(n)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = sturm_count_np(b, mid) > idx
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.all(hi - lo <= 2 * _EPS * np.maximum(np.abs(lo), np.abs(hi)) + _TINY):
            break
    return 0.5 * (lo + hi)


@njit
def _sturm_count_scalar(b, n, x):
    q = -x
    if q == 0.0:
        q = -2.2250738585072014e-308
    count = 1 if q < 0 else 0
    for i in range(1, n):
        q = -x - b[i - 1] * b[i - 1] / q
        if q == 0.0:
            q = -2.2250738585072014e-308
        if q < 0:
            count += 1
    return count


@njit
def _bisect_loop(b, n, bound):
    out = np.empty(n)
    eps = 2.220446049250313e-16
    for k in range(n):
        lo = -bound
        hi = bound
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _sturm_count_scalar(b, n, mid) > k:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 2 * eps * max(abs(lo), abs(hi)) + 2.2250738585072014e-308:
                break
        out[k] = 0.5 * (lo + hi)
    return out


def bisect_eigvals_nb(b: np.ndarray, n: int) -> np.ndarray:
    b = np.ascontiguousarray(np.asarray(b, dtype=np.float64)[: n - 1])
    if n == 1:
        return np.zeros(1)
    bound = _gershgorin(b, n) * (1 + 4 * _EPS) + _TINY
    return _bisect_loop(b, n, bound)


if USE_NUMBA:
    monic_values = monic_values_nb
    tridiag_ql = tridiag_ql_nb
    bisect_eigvals = bisect_eigvals_nb
else:
    monic_values = monic_values_np
    tridiag_ql = tridiag_ql_np
    bisect_eigvals = bisect_eigvals_np

BACKENDS = {
    "numpy": {
        "monic_values": monic_values_np,
        "tridiag_ql": tridiag_ql_np,
        "bisect_eigvals": bisect_eigvals_np,
    },
    "numba": {
        "monic_values": monic_values_nb,
        "tridiag_ql": tridiag_ql_nb,
        "bisect_eigvals": bisect_eigvals_nb,
    },
}
