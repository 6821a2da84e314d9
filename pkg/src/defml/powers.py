"""Generalized integer powers, the h-difference operator and the deformed exponential."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import BivarPoly, PowerSeries


class DomainError(ValueError):
    pass


class PowerVariant(enum.Enum):
    FALLING = "falling"  # z (z - h) ... (z - (n-1) h)
    RISING = "rising"  # z (z + h) ... (z + (n-1) h)

    @property
    def step_sign(self) -> int:
        return -1 if self is PowerVariant.FALLING else 1


def generalized_power_numeric(z, n: int, h, variant: PowerVariant):
    """Product of ``n`` factors ``z + s*k*h`` for ``k = 0..n-1``; ``s = -1`` falling.

    Works for ints, Fractions, floats and complex numbers alike.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    s = variant.step_sign
    out = 1
    for k in range(n):
        out = out * (z + s * k * h)
    return out


def generalized_power_symbolic(n: int, variant: PowerVariant) -> BivarPoly:
    if n < 0:
        raise ValueError("n must be non-negative")
    s = variant.step_sign
    out = BivarPoly.const(1)
    for k in range(n):
        out = out * BivarPoly({(1, 0): 1, (0, 1): s * k})
    return out


def shift_h(p: BivarPoly) -> BivarPoly:
    """``p(y + h, h)``."""
    return p.shift_y(1)


def h_difference(p: BivarPoly) -> BivarPoly:
    """``(p(y+h) - p(y)) / h``, exact in the polynomial ring."""
    return (p.shift_y(1) - p).divide_monomial(deg_h=1)


@dataclass(frozen=True)
class DeformedExpPoint:
    x: float | complex
    y: float
    h: float

    def __post_init__(self):
        if self.h == 0:
            raise DomainError("deformation parameter h must be non-zero")
        if 1 + self.h * self.x == 0:
            raise DomainError(f"pole of the deformed exponential at x = -1/h = {-1 / self.h}")


def deformed_exp_eval(pt: DeformedExpPoint):
    """``(1 + h x) ** (y / h)`` computed as ``exp((y/h) log(1 + h x))``.

    Real ``x`` requires ``1 + h x > 0``; pass a complex ``x`` for the
    principal branch elsewhere.
    """
    base = 1 + pt.h * pt.x
    expo = pt.y / pt.h
    if isinstance(base, complex):
        return cmath.exp(expo * cmath.log(base))
    if base <= 0:
        raise DomainError(f"1 + h*x = {base} is not positive; real mode is undefined")
    return math.exp(expo * math.log(base))


def deformed_exp_series(order: int, sign: int = 1) -> PowerSeries:
    """Series of ``e_h`` (``sign=+1``, falling powers) or ``e_{-h}`` (``sign=-1``, rising)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    variant = PowerVariant.FALLING if sign == 1 else PowerVariant.RISING
    coeffs = []
    p = BivarPoly.const(1)
    for n in range(order + 1):
        if n:
            p = p * BivarPoly({(1, 0): 1, (0, 1): variant.step_sign * (n - 1)})
        coeffs.append(p * Fraction(1, math.factorial(n)))
    return PowerSeries(coeffs, order)
