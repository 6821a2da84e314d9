"""Weight y/sinh(pi y/h): moments, quadrature, Jacobi spectra and orthogonality checks.

All routines here need ``h > 0``.  Negative ``h`` gives the same
polynomials (only ``h**2`` appears), so callers may pass ``abs(h)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from . import kernels
from .exact import BivarPoly, poly_eval, substitute_iy
from .families import g_by_recurrence
from .kernels import EigenConvergenceError
from .report import VerificationReport


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, estimate=None):
        super().__init__(message)
        self.estimate = estimate


def _check_h(h) -> float:
    h = float(h)
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    return h


# weight and moments ----------------------------------------------------------

def weight_eval(y, h):
    """y / sinh(pi y / h), equal to h/pi at y = 0.  Vectorised over ``y``."""
    h = _check_h(h)
    a = math.pi / h
    ay = np.abs(np.asarray(y, dtype=np.float64))
    safe = np.where(ay > 0, ay, 1.0)
    # 2|y| e^{-a|y|} / (1 - e^{-2a|y|}) avoids overflow for large |y|
    w = np.where(ay > 0, 2.0 * ay * np.exp(-a * ay) / -np.expm1(-2.0 * a * safe), 1.0 / a)
    return w if np.ndim(w) else float(w)


@lru_cache(maxsize=None)
def _bernoulli(n: int) -> Fraction:
    # B_1 = -1/2 convention; only even indices are used
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(math.comb(m + 1, j) * b[j] for j in range(m)) / (m + 1))
    return b[n]


@lru_cache(maxsize=None)
def moment_coefficient(k: int) -> Fraction:
    """Rational ``c_k`` with ``mu_k(h) = c_k * h**(k+2)``.

    For ``k = 2m`` the moment is ``4 (2m+1)! (1 - 2^-(2m+2)) zeta(2m+2) (h/pi)^(2m+2)``;
    the even zeta value is rational times ``pi^(2m+2)`` through the Bernoulli
    numbers, leaving ``2 (2^s - 1) |B_s| / s`` with ``s = 2m + 2``.
    """
    if k < 0:
        raise ValueError("moment index must be non-negative")
    if k % 2:
        return Fraction(0)
    s = k + 2
    return 2 * (2**s - 1) * abs(_bernoulli(s)) / s


def weight_moment_exact(k: int, h) -> Fraction:
    return moment_coefficient(k) * Fraction(h) ** (k + 2)


def weight_moment(k: int, h) -> float:
    h = _check_h(h)
    return float(moment_coefficient(k)) * h ** (k + 2)


def total_mass(h) -> float:
    return weight_moment(0, h)


# tanh-sinh quadrature on [-Y, Y] -------------------------------------------------

_T_MAX = 3.5
_HALF_PI = 0.5 * math.pi


def _ts_nodes(t: np.ndarray, Y: float):
    u = _HALF_PI * np.sinh(t)
    x = Y * np.tanh(u)
    w = Y * _HALF_PI * np.cosh(t) / np.cosh(u) ** 2
    return x, w


def _paired(F: Callable, x: np.ndarray) -> np.ndarray:
    # F(x) + F(-x) so odd integrands cancel exactly
    return F(x) + F(-x)


def _tanh_sinh_symmetric(F: Callable, Y: float, tol: float, max_level: int, min_level: int = 3):
    """Integrate ``F`` over ``[-Y, Y]``; returns (value, L1 estimate, level)."""
    def absF(x):
        return np.abs(F(x))

    x0 = np.zeros(1)
    f0 = F(x0)[..., 0] * (Y * _HALF_PI)
    a0 = np.abs(f0)
    # level 0: step 1
    j = np.arange(1, int(_T_MAX) + 1, dtype=np.float64)
    x, w = _ts_nodes(j, Y)
    s_val = f0 + (_paired(F, x) * w).sum(axis=-1)
    s_abs = a0 + ((absF(x) + absF(-x)) * w).sum(axis=-1)
    prev = s_val * 1.0
    step = 1.0
    for level in range(1, max_level + 1):
        step *= 0.5
        t = np.arange(step, _T_MAX + step / 2, 2 * step)
        x, w = _ts_nodes(t, Y)
        s_val = s_val + (_paired(F, x) * w).sum(axis=-1)
        s_abs = s_abs + ((absF(x) + absF(-x)) * w).sum(axis=-1)
        cur = s_val * step
        l1 = s_abs * step
        if level >= min_level and np.all(np.abs(cur - prev) <= tol * l1):
            return cur, l1, level
        prev = cur
    raise NonConvergenceError(
        f"tanh-sinh did not reach tol={tol} in {max_level} levels", estimate=prev
    )


def _ts_fixed(F: Callable, lo: float, hi: float, level: int = 6) -> np.ndarray:
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    step = 2.0**-level
    t = np.arange(-_T_MAX, _T_MAX + step / 2, step)
    x, w = _ts_nodes(t, half)
    return (F(mid + x) * w).sum(axis=-1) * step


def _growth(f: Callable, Y: float):
    """Per-component sup of |f| near +-Y and a crude polynomial degree estimate."""
    pts = np.array([Y, 1.25 * Y, 1.5 * Y, 1.75 * Y])
    far = 2.0 * pts
    near_v = np.maximum(np.abs(f(pts)), np.abs(f(-pts))).max(axis=-1)
    far_v = np.maximum(np.abs(f(far)), np.abs(f(-far))).max(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(near_v > 0, np.ceil(np.log2(np.maximum(far_v, near_v) / near_v)), 0.0)
    sup = np.maximum(near_v, far_v / 2.0 ** np.maximum(d, 0))
    return sup, np.clip(d, 0, 400)


def _as_array_integrand(f: Callable) -> Callable:
    def g(x):
        v = np.asarray(f(x), dtype=np.float64)
        if v.shape[-1:] != x.shape:
            v = v[..., None] * np.ones_like(x)
        return v
    return g


def truncation_point(f: Callable, h: float, tol: float) -> float:
    """Smallest doubling of ``h`` whose two-sided tail bound is below tol/10 of ∫|f|w."""
    a = math.pi / h
    Y = h
    for _ in range(40):
        F, d = _growth(f, Y)
        if np.all(a * Y > 2 * (d + 1)):
            bound = 4.0 * F * Y * math.exp(-a * Y) / ((-math.expm1(-2 * a * Y)) * (a - (d + 1) / Y))
            fw = lambda x: f(x) * weight_eval(x, h)
            l1 = np.abs(_ts_fixed(lambda x: np.abs(fw(x)), -Y, Y, level=3))
            if np.all(bound <= tol * l1 / 10):
                return Y
        Y *= 2.0
    raise NonConvergenceError("no truncation point found for the weighted integral")


def integrate_weighted(f: Callable, h, tol: float = 1e-10, *, max_level: int = 14):
    """∫ f(y) y/sinh(pi y/h) dy over the real line.

    ``f`` maps a 1-d array of points to an array whose last axis runs over
    the points; leading axes give a vector of integrals computed at once.
    ``tol`` is relative to ∫|f| w, component by component.  The interval is
    cut at ``|y| <= Y`` from a tail bound, then integrated by tanh-sinh with
    step halving; ``Y`` is doubled if the measured tail on ``[Y, 2Y]`` is
    too large.
    """
    h = _check_h(h)
    if not tol > 0:
        raise ValueError("tol must be positive")
    f = _as_array_integrand(f)

    def fw(x):
        return f(x) * weight_eval(x, h)

    Y = truncation_point(f, h, tol)
    for _ in range(6):
        value, l1, _level = _tanh_sinh_symmetric(fw, Y, tol, max_level)
        tail = _ts_fixed(lambda x: np.abs(fw(x)) + np.abs(fw(-x)), Y, 2 * Y, level=4)
        if np.all(tail <= tol * l1 / 10):
            return value if np.ndim(value) else float(value)
        Y *= 2.0
    raise NonConvergenceError("tail did not fall below tolerance", estimate=value)


# Jacobi matrix, zeros, Gauss rules ---------------------------------------------------

@dataclass(frozen=True)
class JacobiMatrix:
    n: int
    alpha: np.ndarray
    beta: np.ndarray
    mu0: float

    @property
    def offdiag(self) -> np.ndarray:
        return np.sqrt(self.beta)

    def dense(self) -> np.ndarray:
        b = self.offdiag
        return np.diag(self.alpha) + np.diag(b, 1) + np.diag(b, -1)


def recurrence_beta(count: int, h) -> np.ndarray:
    """beta_k = h^2 k (k+1) / 4 for k = 1..count."""
    k = np.arange(1, count + 1, dtype=np.float64)
    return float(h) ** 2 * k * (k + 1) / 4.0


def jacobi_matrix(n: int, h) -> JacobiMatrix:
    h = _check_h(h)
    if n < 1:
        raise ValueError("n must be at least 1")
    return JacobiMatrix(n=n, alpha=np.zeros(n), beta=recurrence_beta(n - 1, h), mu0=total_mass(h))


def _symmetrize(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x - x[::-1])


def phi_zeros(n: int, h, *, method: str = "ql") -> np.ndarray:
    """Zeros of the monic phi polynomial of degree ``n``, ascending."""
    J = jacobi_matrix(n, h)
    if method == "ql":
        x, _ = kernels.tridiag_ql(J.offdiag, n)
    elif method == "bisect":
        x = kernels.bisect_eigvals(J.offdiag, n)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _symmetrize(np.sort(x))


def g_zeros(n: int, h) -> np.ndarray:
    """Zeros of g_n, with multiplicity, as complex numbers ordered by imaginary part.

    They are 0 together with ``i*r`` for every zero ``r`` of the degree
    ``n-1`` phi polynomial, so for even ``n`` the origin is a double zero.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rs = [0.0] if n == 1 else sorted([0.0, *phi_zeros(n - 1, h)])
    return np.array([complex(0.0, r) for r in rs])


def scaled_residual(p: BivarPoly, z, h, dps: int = 50) -> float:
    """|p(z)| / (|p'(z)| max(1, |z|)) evaluated at high precision."""
    v = abs(poly_eval(p, z, float(h), extended=True, dps=dps))
    dv = abs(poly_eval(p.derivative_y(), z, float(h), extended=True, dps=dps))
    if v == 0:
        return 0.0
    scale = dv * max(1.0, abs(z))
    return float(v / scale) if scale else math.inf


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)

    def apply(self, f: Callable) -> float:
        """Sum w_i f(x_i) with mirrored nodes paired, so odd ``f`` gives exactly 0."""
        v = np.asarray(f(self.nodes), dtype=np.float64)
        n = len(self.nodes)
        m = n // 2
        total = np.sum(self.weights[:m] * (v[:m] + v[::-1][:m]))
        if n % 2:
            total += self.weights[m] * v[m]
        return float(total)

    def moment(self, k: int) -> float:
        """Rule applied to ``y**k``; odd powers cancel exactly on the mirrored nodes."""
        return self.apply(lambda t: np.sign(t) * np.abs(t) ** k if k % 2 else np.abs(t) ** k)


def gauss_rule(n: int, h) -> QuadratureRule:
    """n-point Gauss rule for the weight, from the Jacobi matrix spectrum."""
    J = jacobi_matrix(n, h)
    x, z2 = kernels.tridiag_ql(J.offdiag, n)
    w = J.mu0 * z2
    return QuadratureRule(nodes=_symmetrize(x), weights=0.5 * (w + w[::-1]))


# orthogonality -------------------------------------------------------------------

def phi_values(x: np.ndarray, n_max: int, h, *, monic: bool = False) -> np.ndarray:
    """phi_0..phi_{n_max} (or the monic versions) at the points ``x``."""
    beta = recurrence_beta(max(n_max, 1), h)
    vals = kernels.monic_values(x, beta, n_max)
    if monic:
        return vals
    scale = np.array([2.0 ** (k + 1) / math.factorial(k + 1) for k in range(n_max + 1)])
    return vals * scale.reshape((-1,) + (1,) * np.ndim(x))


def phi_diagonal_constants(n: int, h) -> tuple[float, float]:
    """(printed, derived) values of ∫ phi_n^2 w: 2h^(2n)/(n+1) and 2h^(2n+2)/(n+1)."""
    h = float(h)
    return 2 * h ** (2 * n) / (n + 1), 2 * h ** (2 * n + 2) / (n + 1)


def gram_matrix(n_max: int, h, tol: float = 1e-12, *, monic: bool = False) -> np.ndarray:
    """Matrix of ∫ phi_n phi_m w for n, m <= n_max."""
    h = _check_h(h)

    def f(x):
        v = phi_values(x, n_max, h, monic=monic)
        return v[:, None, :] * v[None, :, :]

    return np.asarray(integrate_weighted(f, h, tol))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a - b)


def _match(measured: float, printed: float, derived: float, tol: float) -> str:
    p, d = _rel(measured, printed) <= tol, _rel(measured, derived) <= tol
    return "both" if p and d else "paper" if p else "derived" if d else "none"


def orthogonality_matrix(n_max: int, h, tol: float = 1e-8, *, quad_tol: float | None = None):
    """Reports for every cell of the phi Gram matrix.

    Diagonal cells pass when they match the derived constant
    ``2 h^(2n+2)/(n+1)`` within ``tol`` (relative); the printed constant is
    reported alongside.  Off-diagonal cells pass when
    ``|I_nm| < tol * max(I_nn, I_mm)``.
    """
    h = _check_h(h)
    if quad_tol is None:
        quad_tol = max(min(tol * 1e-2, 1e-10), 1e-13)
    G = gram_matrix(n_max, h, quad_tol)
    rows = []
    for n in range(n_max + 1):
        row = []
        for m in range(n_max + 1):
            params = {"n": n, "m": m, "h": h}
            val = float(G[n, m])
            if n == m:
                printed, derived = phi_diagonal_constants(n, h)
                rel = _rel(val, derived)
                row.append(VerificationReport(
                    identity="phi-orthogonality-diagonal",
                    params=params,
                    measured=val,
                    claimed_paper=repr(printed),
                    claimed_derived=repr(derived),
                    abs_dev=abs(val - derived),
                    rel_dev=rel,
                    passed=rel <= tol,
                    tol=tol,
                    matched=_match(val, printed, derived, tol),
                ))
            else:
                ref = max(G[n, n], G[m, m])
                row.append(VerificationReport(
                    identity="phi-orthogonality-offdiagonal",
                    params=params,
                    measured=val,
                    claimed_paper="0",
                    claimed_derived="0",
                    abs_dev=abs(val),
                    rel_dev=abs(val) / ref,
                    passed=abs(val) < tol * ref,
                    tol=tol,
                    matched="both" if abs(val) < tol * ref else "none",
                ))
        rows.append(row)
    return rows


def g_orthogonality_integrand(n: int, m: int, g_seq=None) -> tuple[BivarPoly, BivarPoly]:
    """(re, im) of g_n(iy) g_m(-iy) / y^2 as exact polynomials in (y, h)."""
    if g_seq is None:
        g_seq = g_by_recurrence(max(n, m))
    a, b = substitute_iy(g_seq[n], 1)
    c, d = substitute_iy(g_seq[m], -1)
    re = (a * c - b * d).divide_monomial(deg_y=2)
    im = (a * d + b * c).divide_monomial(deg_y=2)
    return re, im


def g_orthogonality_reports(n_max: int, h, tol: float = 1e-8, *, quad_tol: float | None = None):
    """Check ∫ g_n(iy) g_m(-iy) dy / (y sinh(pi y/h)) for 1 <= n, m <= n_max.

    The integrand is built from the exact g polynomials, independently of
    the phi recurrence.  Diagonal claims: printed ``2h^(2n-2)/n``, derived
    ``2h^(2n)/n``.
    """
    h_f = _check_h(h)
    h_q = Fraction(h).limit_denominator(10**12) if not isinstance(h, Fraction) else h
    if quad_tol is None:
        quad_tol = max(min(tol * 1e-2, 1e-10), 1e-13)
    g_seq = g_by_recurrence(n_max)
    idx = list(range(1, n_max + 1))
    coeffs = []
    for n in idx:
        for m in idx:
            re, im = g_orthogonality_integrand(n, m, g_seq)
            for part in (re, im):
                cs = [float(c) for c in part.y_coefficients(h_q)] or [0.0]
                coeffs.append(cs[::-1])

    def f(x):
        return np.stack([np.polyval(c, x) for c in coeffs])

    vals = np.asarray(integrate_weighted(f, h_f, quad_tol)).reshape(len(idx), len(idx), 2)
    out = []
    for i, n in enumerate(idx):
        for j, m in enumerate(idx):
            re, im = vals[i, j]
            params = {"n": n, "m": m, "h": h_f}
            if n == m:
                printed, derived = 2 * h_f ** (2 * n - 2) / n, 2 * h_f ** (2 * n) / n
                rel = _rel(re, derived)
                ok = rel <= tol and abs(im) <= tol * abs(derived)
                out.append(VerificationReport(
                    "g-orthogonality-diagonal", params, float(re), repr(printed), repr(derived),
                    abs(re - derived), ok, tol, rel, _match(re, printed, derived, tol),
                ))
            else:
                ref = max(2 * h_f ** (2 * n) / n, 2 * h_f ** (2 * m) / m)
                dev = math.hypot(re, im)
                ok = dev < tol * ref
                out.append(VerificationReport(
                    "g-orthogonality-offdiagonal", params, float(dev), "0", "0",
                    dev, ok, tol, dev / ref, "both" if ok else "none",
                ))
    return out


def monic_norms(n_max: int, h) -> np.ndarray:
    """mu0 * prod_{k<=n} beta_k, the squared norms implied by the recurrence."""
    beta = recurrence_beta(max(n_max, 1), h)
    out = np.empty(n_max + 1)
    out[0] = total_mass(h)
    for n in range(1, n_max + 1):
        out[n] = out[n - 1] * beta[n - 1]
    return out



__all__ = [
    "EigenConvergenceError",
    "JacobiMatrix",
    "NonConvergenceError",
    "QuadratureRule",
    "g_orthogonality_reports",
    "g_zeros",
    "gauss_rule",
    "gram_matrix",
    "integrate_weighted",
    "jacobi_matrix",
    "monic_norms",
    "orthogonality_matrix",
    "phi_zeros",
    "scaled_residual",
    "weight_eval",
    "weight_moment",
    "weight_moment_exact",
]
