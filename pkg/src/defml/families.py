"""The deformed Mittag-Leffler families g, g-monic, phi and phi-monic.

Every family is built with ``h`` symbolic.  Each has a recurrence
generator and independent generating-function oracles that must agree
exactly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    BivarPoly,
    InexactDivisionError,
    PowerSeries,
    XPower,
    poly_parity_y,
    series_divide_exact,
    series_exp,
    series_mul,
    substitute_iy,
)
from .powers import PowerVariant, deformed_exp_series, generalized_power_symbolic

Y = BivarPoly.y()
H2 = BivarPoly.monomial(1, 0, 2)


class FamilyKind(enum.Enum):
    G = "g"
    G_MONIC = "g-monic"
    PHI = "phi"
    PHI_MONIC = "phi-monic"

    @classmethod
    def parse(cls, text: str) -> "FamilyKind":
        key = text.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown family {text!r}")

    @property
    def is_monic(self) -> bool:
        return self in (FamilyKind.G_MONIC, FamilyKind.PHI_MONIC)


def monic_scale(kind: FamilyKind, n: int) -> Fraction:
    """Factor ``c_n`` with ``monic_n = c_n * member_n``."""
    if kind is FamilyKind.G:
        return Fraction(math.factorial(n), 2**n)
    if kind is FamilyKind.PHI:
        return Fraction(math.factorial(n + 1), 2 ** (n + 1))
    raise ValueError(f"{kind.value} is already monic")


class ConsistencyError(ArithmeticError):
    """An exact oracle disagreed with the construction it checks."""


@dataclass(frozen=True)
class FamilySequence:
    kind: FamilyKind
    members: tuple[BivarPoly, ...]
    provenance: str

    @property
    def n_max(self) -> int:
        return len(self.members) - 1

    def __getitem__(self, n: int) -> BivarPoly:
        return self.members[n]

    def __len__(self) -> int:
        return len(self.members)

    def invariant_violations(self) -> list[str]:
        """Degree, h-evenness and y-parity checks; empty list when all hold."""
        bad = []
        for n, p in enumerate(self.members):
            if p.deg_y != n:
                bad.append(f"deg_y(member {n}) = {p.deg_y}")
            if not p.h_powers_even():
                bad.append(f"member {n} has odd powers of h")
            want = "even" if n % 2 == 0 else "odd"
            if poly_parity_y(p) != want:
                bad.append(f"member {n} is not {want} in y")
        return bad


# g family --------------------------------------------------------------------

def g_by_recurrence(n_max: int) -> FamilySequence:
    """(n+1) g_{n+1} = 2y g_n + h^2 (n-1) g_{n-1}, applied from n = 1."""
    members = [BivarPoly.const(1)]
    if n_max >= 1:
        members.append(2 * Y)
    for n in range(1, n_max):
        nxt = (2 * Y * members[n] + H2 * members[n - 1] * (n - 1)) * Fraction(1, n + 1)
        members.append(nxt)
    return FamilySequence(FamilyKind.G, tuple(members[: n_max + 1]), "recurrence")


def g_by_convolution(n: int) -> BivarPoly:
    """(1/n!) sum_m C(n, m) y^(m,h) y^[n-m,h]."""
    acc = BivarPoly()
    for m in range(n + 1):
        term = generalized_power_symbolic(m, PowerVariant.FALLING) * generalized_power_symbolic(
            n - m, PowerVariant.RISING
        )
        acc = acc + term * math.comb(n, m)
    return acc * Fraction(1, math.factorial(n))


def g_convolution_sequence(n_max: int) -> FamilySequence:
    return FamilySequence(
        FamilyKind.G, tuple(g_by_convolution(n) for n in range(n_max + 1)), "convolution"
    )


def g_by_genfun(n_max: int) -> FamilySequence:
    prod = series_mul(deformed_exp_series(n_max, 1), deformed_exp_series(n_max, -1))
    return FamilySequence(FamilyKind.G, prod.coeffs, "genfun")


def pochhammer(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= a + j
    return out


def g_hypergeometric(n: int, y, h) -> Fraction:
    """2 y h^(n-1) 2F1(1-n, 1-y/h; 2 | 2) as a terminating rational sum."""
    if n < 1:
        raise ValueError("the hypergeometric form needs n >= 1")
    y, h = Fraction(y), Fraction(h)
    if h == 0:
        raise ZeroDivisionError("the hypergeometric form divides by h; h must be non-zero")
    b = 1 - y / h
    total = Fraction(0)
    for k in range(n):
        total += (
            pochhammer(Fraction(1 - n), k)
            * pochhammer(b, k)
            / pochhammer(Fraction(2), k)
            * Fraction(2**k, math.factorial(k))
        )
    return 2 * y * h ** (n - 1) * total


def to_monic(seq: FamilySequence) -> FamilySequence:
    if seq.kind is FamilyKind.G:
        kind = FamilyKind.G_MONIC
    elif seq.kind is FamilyKind.PHI:
        kind = FamilyKind.PHI_MONIC
    else:
        raise ValueError(f"to_monic expects g or phi, got {seq.kind.value}")
    members = tuple(p * monic_scale(seq.kind, n) for n, p in enumerate(seq.members))
    return FamilySequence(kind, members, seq.provenance)


def g_monic_by_recurrence(n_max: int) -> FamilySequence:
    """ĝ_{n+1} = y ĝ_n + h^2 n(n-1)/4 ĝ_{n-1}."""
    members = [BivarPoly.const(1), Y]
    for n in range(1, n_max):
        members.append(Y * members[n] + H2 * members[n - 1] * Fraction(n * (n - 1), 4))
    return FamilySequence(FamilyKind.G_MONIC, tuple(members[: n_max + 1]), "recurrence")


# phi family ------------------------------------------------------------------

def phi_by_recurrence(n_max: int) -> FamilySequence:
    """(n+2) phi_{n+1} = 2y phi_n - h^2 n phi_{n-1}; phi_0 = 2, phi_1 = 2y."""
    members = [BivarPoly.const(2), 2 * Y]
    for n in range(1, n_max):
        members.append((2 * Y * members[n] - H2 * members[n - 1] * n) * Fraction(1, n + 2))
    return FamilySequence(FamilyKind.PHI, tuple(members[: n_max + 1]), "recurrence")


def phi_from_g(g_seq: FamilySequence, n: int) -> BivarPoly:
    """g_{n+1}(iy) / (i^(n+1) y), exact."""
    if g_seq.kind is not FamilyKind.G:
        raise ValueError("phi_from_g needs the g family")
    if n + 1 > g_seq.n_max:
        raise ValueError(f"g sequence stops at {g_seq.n_max}, need index {n + 1}")
    re, im = substitute_iy(g_seq[n + 1])
    # divide by i^(n+1): multiply by (-i)^(n+1) on the (re, im) pair
    for _ in range((n + 1) % 4):
        re, im = im, -re
    if im:
        raise ConsistencyError(f"phi_{n} has imaginary residue {im}")
    try:
        return re.divide_monomial(deg_y=1)
    except InexactDivisionError as exc:
        raise ConsistencyError(f"g_{n + 1}(iy) is not divisible by y") from exc


def phi_transform_sequence(n_max: int, g_seq: FamilySequence | None = None) -> FamilySequence:
    if g_seq is None:
        g_seq = g_by_recurrence(n_max + 1)
    return FamilySequence(
        FamilyKind.PHI, tuple(phi_from_g(g_seq, n) for n in range(n_max + 1)), "transform"
    )


def arctan_series(order: int, scale: Fraction = Fraction(1)) -> PowerSeries:
    """Series of (2y/h) arctan(scale*h*x) = 2y sum (-1)^k scale^(2k+1) h^(2k) x^(2k+1)/(2k+1)."""
    coeffs = [BivarPoly()] * (order + 1)
    for k in range((order - 1) // 2 + 1):
        e = 2 * k + 1
        if e > order:
            break
        c = Fraction((-1) ** k, e) * scale**e * 2
        coeffs[e] = BivarPoly.monomial(c, 1, 2 * k)
    return PowerSeries(coeffs, order)


def phi_by_genfun(n_max: int) -> FamilySequence:
    """Expand (exp((2y/h) arctan(hx)) - 1) / (x y)."""
    e = series_exp(arctan_series(n_max + 1))
    try:
        q = series_divide_exact(series_divide_exact(e - 1, XPower(1)), Y)
    except InexactDivisionError as exc:
        raise ConsistencyError(f"phi generating function does not divide exactly: {exc}") from exc
    return FamilySequence(FamilyKind.PHI, q.coeffs, "genfun")


def phi_monic_by_recurrence(n_max: int) -> FamilySequence:
    """φ̂_{n+1} = y φ̂_n - (h^2/4) n(n+1) φ̂_{n-1}."""
    members = [BivarPoly.const(1), Y]
    for n in range(1, n_max):
        members.append(Y * members[n] - H2 * members[n - 1] * Fraction(n * (n + 1), 4))
    return FamilySequence(FamilyKind.PHI_MONIC, tuple(members[: n_max + 1]), "recurrence")


def phi_monic_egf_series(order: int) -> PowerSeries:
    """exp((2y/h) arctan(hx/2)) / (1 + h^2 x^2 / 4) as an ordinary series in x."""
    num = series_exp(arctan_series(order, Fraction(1, 2)))
    den = PowerSeries([1, 0, BivarPoly.monomial(Fraction(1, 4), 0, 2)], order)
    return series_divide_exact(num, den)


def phi_monic_genfun(n_max: int) -> FamilySequence:
    s = phi_monic_egf_series(n_max)
    members = tuple(c * math.factorial(n) for n, c in enumerate(s.coeffs))
    return FamilySequence(FamilyKind.PHI_MONIC, members, "genfun")


def printed_phi_monic_egf_at_zero(h: float) -> float:
    """Value at x = 0 of (4 + h^2 x^2)^(-1/h^2) exp(...), the closed form as printed.

    A valid exponential generating function of a family with leading member 1
    must give 1 here.
    """
    return 4.0 ** (-1.0 / (h * h))


def family(kind: FamilyKind, n_max: int) -> FamilySequence:
    """Recurrence-built members 0..n_max of any family."""
    if kind is FamilyKind.G:
        return g_by_recurrence(n_max)
    if kind is FamilyKind.G_MONIC:
        return g_monic_by_recurrence(n_max)
    if kind is FamilyKind.PHI:
        return phi_by_recurrence(n_max)
    return phi_monic_by_recurrence(n_max)
