"""Exact rational polynomials in (y, h) and truncated power series over them.

Scalars are :class:`fractions.Fraction`.  A :class:`BivarPoly` stores a sparse
map ``(deg_y, deg_h) -> Fraction``; a :class:`PowerSeries` is a tuple of
``BivarPoly`` coefficients indexed by the power of ``x`` together with an
explicit truncation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Union

Rational = Fraction
Scalar = Union[int, Fraction]


class InexactDivisionError(ArithmeticError):
    """Raised when a division that must be exact leaves a remainder."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, _RationalABC)):
        return Fraction(c)
    raise TypeError(f"exact coefficient expected, got {type(c).__name__}")


class BivarPoly:
    """Immutable polynomial in ``y`` and ``h`` with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], Scalar] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        if terms:
            for (a, b), c in terms.items():
                if a < 0 or b < 0:
                    raise ValueError(f"negative exponent ({a}, {b})")
                c = _as_fraction(c)
                if c:
                    clean[(int(a), int(b))] = c
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[tuple[int, int], Fraction]) -> "BivarPoly":
        # trusted constructor: caller guarantees Fraction values
        obj = cls.__new__(cls)
        obj._terms = {k: v for k, v in terms.items() if v}
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Scalar) -> "BivarPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, c: Scalar, deg_y: int = 0, deg_h: int = 0) -> "BivarPoly":
        return cls({(deg_y, deg_h): c})

    @classmethod
    def y(cls) -> "BivarPoly":
        return cls({(1, 0): 1})

    @classmethod
    def h(cls) -> "BivarPoly":
        return cls({(0, 1): 1})

    @property
    def terms(self) -> Mapping[tuple[int, int], Fraction]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def deg_y(self) -> int:
        """Degree in ``y``; ``-1`` for the zero polynomial."""
        return max((a for a, _ in self._terms), default=-1)

    @property
    def deg_h(self) -> int:
        return max((b for _, b in self._terms), default=-1)

    def coeff(self, deg_y: int, deg_h: int = 0) -> Fraction:
        return self._terms.get((deg_y, deg_h), Fraction(0))

    def y_coeff(self, deg_y: int) -> "BivarPoly":
        """Coefficient of ``y**deg_y`` as a polynomial in ``h`` alone."""
        return BivarPoly._raw({(0, b): c for (a, b), c in self._terms.items() if a == deg_y})

    def leading_y_coeff(self) -> "BivarPoly":
        return self.y_coeff(self.deg_y)

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self._terms)

    def constant_term(self) -> Fraction:
        return self.coeff(0, 0)

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "BivarPoly | None":
        if isinstance(other, BivarPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return BivarPoly.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return BivarPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "BivarPoly":
        return BivarPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return BivarPoly()
            return BivarPoly._raw({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, BivarPoly):
            return NotImplemented
        out: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return BivarPoly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of BivarPoly by zero")
            return self * (1 / Fraction(other))
        if isinstance(other, BivarPoly):
            return self.exact_div(other)
        return NotImplemented

    def __pow__(self, n: int) -> "BivarPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = BivarPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # substitutions --------------------------------------------------------

    def scale_y(self, s: Scalar) -> "BivarPoly":
        """Return ``p(s*y, h)``."""
        s = _as_fraction(s)
        return BivarPoly._raw({(a, b): c * s**a for (a, b), c in self._terms.items()})

    def scale_h(self, s: Scalar) -> "BivarPoly":
        """Return ``p(y, s*h)``."""
        s = _as_fraction(s)
        return BivarPoly._raw({(a, b): c * s**b for (a, b), c in self._terms.items()})

    def shift_y(self, steps: int = 1) -> "BivarPoly":
        """Return ``p(y + steps*h, h)``."""
        out: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in self._terms.items():
            for j in range(a + 1):
                k = (j, b + a - j)
                out[k] = out.get(k, 0) + c * math.comb(a, j) * Fraction(steps) ** (a - j)
        return BivarPoly._raw(out)

    def specialize_h(self, h: Scalar) -> "BivarPoly":
        """Substitute a rational value for ``h``; the result has ``deg_h <= 0``."""
        h = _as_fraction(h)
        out: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in self._terms.items():
            out[(a, 0)] = out.get((a, 0), 0) + c * h**b
        return BivarPoly._raw(out)

    def divide_monomial(self, deg_y: int = 0, deg_h: int = 0) -> "BivarPoly":
        out = {}
        for (a, b), c in self._terms.items():
            if a < deg_y or b < deg_h:
                raise InexactDivisionError(
                    f"term y^{a} h^{b} not divisible by y^{deg_y} h^{deg_h}"
                )
            out[(a - deg_y, b - deg_h)] = c
        return BivarPoly._raw(out)

    def exact_div(self, divisor: "BivarPoly") -> "BivarPoly":
        """Exact quotient by lexicographic (y, then h) leading-term division."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead = max(divisor._terms)
        lc = divisor._terms[lead]
        rem = dict(self._terms)
        quot: dict[tuple[int, int], Fraction] = {}
        while rem:
            top = max(rem)
            da, db = top[0] - lead[0], top[1] - lead[1]
            if da < 0 or db < 0:
                raise InexactDivisionError(f"{self} is not divisible by {divisor}")
            q = rem[top] / lc
            quot[(da, db)] = q
            for (a, b), c in divisor._terms.items():
                k = (a + da, b + db)
                v = rem.get(k, 0) - q * c
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        return BivarPoly._raw(quot)

    def derivative_y(self) -> "BivarPoly":
        return BivarPoly._raw({(a - 1, b): c * a for (a, b), c in self._terms.items() if a})

    # structure --------------------------------------------------------------

    def h_powers_even(self) -> bool:
        return all(b % 2 == 0 for _, b in self._terms)

    def y_coefficients(self, h: Scalar) -> list[Fraction]:
        """Coefficients in ascending powers of ``y`` at a rational ``h``."""
        p = self.specialize_h(h)
        out = [Fraction(0)] * (p.deg_y + 1)
        for (a, _), c in p._terms.items():
            out[a] = c
        return out

    def __iter__(self):
        return iter(sorted(self._terms.items(), reverse=True))

    def __repr__(self) -> str:
        return f"BivarPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self._terms.items(), key=lambda t: (-t[0][0], t[0][1])):
            factors = []
            if a:
                factors.append("y" if a == 1 else f"y^{a}")
            if b:
                factors.append("h" if b == 1 else f"h^{b}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def poly_eval(p: BivarPoly, y, h, *, extended: bool = False, dps: int = 50):
    """Evaluate ``p`` at ``(y, h)`` by nested Horner in ``h`` then ``y``.

    Exact rationals in give an exact ``Fraction`` out.  Floats give a float
    and any complex input gives a complex.  ``extended=True`` switches to
    mpmath at ``dps`` decimal digits.
    """
    if extended:
        import mpmath

        with mpmath.workdps(dps):
            conv = mpmath.mpc if isinstance(y, complex) or isinstance(h, complex) else mpmath.mpf
            yy = conv(y) if not isinstance(y, Fraction) else mpmath.mpf(y.numerator) / y.denominator
            hh = conv(h) if not isinstance(h, Fraction) else mpmath.mpf(h.numerator) / h.denominator
            return _horner(p, yy, hh, lambda c: mpmath.mpf(c.numerator) / c.denominator)
    if isinstance(y, (int, Fraction)) and isinstance(h, (int, Fraction)):
        return _horner(p, Fraction(y), Fraction(h), lambda c: c)
    if isinstance(y, complex) or isinstance(h, complex):
        return complex(_horner(p, complex(y), complex(h), float))
    return float(_horner(p, float(y), float(h), float))


def _horner(p: BivarPoly, y, h, conv: Callable):
    if p.is_zero():
        return conv(Fraction(0))
    by_y: dict[int, dict[int, Fraction]] = {}
    for (a, b), c in p.terms.items():
        by_y.setdefault(a, {})[b] = c
    zero = conv(Fraction(0))
    acc = zero
    for a in range(p.deg_y, -1, -1):
        row = by_y.get(a)
        ch = zero
        if row:
            for b in range(max(row), -1, -1):
                ch = ch * h + (conv(row[b]) if b in row else zero)
        acc = acc * y + ch
    return acc


def poly_parity_y(p: BivarPoly) -> str:
    """Classify ``p`` as ``"even"``, ``"odd"`` or ``"neither"`` in ``y``.

    The zero polynomial is reported as even.
    """
    degs = {a % 2 for a, _ in p.terms}
    if degs <= {0}:
        return "even"
    if degs == {1}:
        return "odd"
    return "neither"


def substitute_iy(p: BivarPoly, sign: int = 1) -> tuple[BivarPoly, BivarPoly]:
    """Return ``(re, im)`` with ``p(sign*i*y, h) == re + i*im`` exactly.

    Powers of ``i`` are tracked on the 4-cycle ``1, i, -1, -i``.
    """
    re: dict[tuple[int, int], Fraction] = {}
    im: dict[tuple[int, int], Fraction] = {}
    for (a, b), c in p.terms.items():
        r = (a * (1 if sign > 0 else 3)) % 4
        if r == 0:
            re[(a, b)] = c
        elif r == 1:
            im[(a, b)] = c
        elif r == 2:
            re[(a, b)] = -c
        else:
            im[(a, b)] = -c
    return BivarPoly._raw(re), BivarPoly._raw(im)


# power series -----------------------------------------------------------------

ZERO = BivarPoly()
ONE = BivarPoly.const(1)


class PowerSeries:
    """Truncated power series in ``x`` with :class:`BivarPoly` coefficients.

    ``order`` is the highest retained power of ``x`` and is always explicit.
    Binary operations truncate to the smaller operand order.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable[BivarPoly | Scalar], order: int | None = None):
        cs = [c if isinstance(c, BivarPoly) else BivarPoly.const(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("series order must be non-negative")
        cs = cs[: order + 1] + [ZERO] * (order + 1 - len(cs))
        self.order = order
        self.coeffs: tuple[BivarPoly, ...] = tuple(cs)

    @classmethod
    def one(cls, order: int) -> "PowerSeries":
        return cls([ONE], order)

    @classmethod
    def x(cls, order: int) -> "PowerSeries":
        return cls([ZERO, ONE], order)

    def __getitem__(self, n: int) -> BivarPoly:
        return self.coeffs[n]

    def __len__(self) -> int:
        return self.order + 1

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*x^{n}" for n, c in enumerate(self.coeffs) if c)
        return f"PowerSeries({body or '0'}, order={self.order})"

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise ValueError("cannot raise the order of a truncated series")
        return PowerSeries(self.coeffs[: order + 1], order)

    def map(self, fn: Callable[[BivarPoly], BivarPoly]) -> "PowerSeries":
        return PowerSeries([fn(c) for c in self.coeffs], self.order)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, BivarPoly)):
            other = PowerSeries([other], self.order)
        if not isinstance(other, PowerSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return PowerSeries([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self) -> "PowerSeries":
        return self.map(lambda c: -c)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, BivarPoly)):
            other = PowerSeries([other], self.order)
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, other)
        if isinstance(other, (int, Fraction, BivarPoly)):
            return self.map(lambda c: c * other)
        return NotImplemented

    __rmul__ = __mul__

    def times_x(self) -> "PowerSeries":
        """Multiply by ``x`` keeping the same order."""
        return PowerSeries((ZERO,) + self.coeffs[:-1], self.order)

    def derivative(self) -> "PowerSeries":
        """d/dx; the result has order ``self.order - 1``."""
        if self.order == 0:
            return PowerSeries([ZERO], 0)
        return PowerSeries([self.coeffs[k] * k for k in range(1, self.order + 1)], self.order - 1)


@dataclass(frozen=True)
class XPower:
    """Divisor ``x**k`` for :func:`series_divide_exact`."""

    k: int


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    n = min(a.order, b.order)
    out = []
    for k in range(n + 1):
        acc = ZERO
        for j in range(k + 1):
            if a.coeffs[j] and b.coeffs[k - j]:
                acc = acc + a.coeffs[j] * b.coeffs[k - j]
        out.append(acc)
    return PowerSeries(out, n)


def series_exp(a: PowerSeries) -> PowerSeries:
    """Formal exponential via ``n*b_n = sum_k k*a_k*b_{n-k}``."""
    if a.coeffs[0]:
        raise ValueError("series_exp requires zero constant term")
    b = [ONE]
    for n in range(1, a.order + 1):
        acc = ZERO
        for k in range(1, n + 1):
            if a.coeffs[k]:
                acc = acc + a.coeffs[k] * b[n - k] * k
        b.append(acc * Fraction(1, n))
    return PowerSeries(b, a.order)


def series_divide_exact(
    a: PowerSeries, divisor: XPower | BivarPoly | PowerSeries
) -> PowerSeries:
    """Exact quotient of ``a`` by ``x**k``, a coefficient polynomial, or a series.

    A series divisor must have a non-zero rational constant term; it is
    inverted as a geometric series and the result has order
    ``min(a.order, divisor.order)``.  Dividing by ``x**k`` lowers the order
    by ``k``.
    """
    if isinstance(divisor, XPower):
        k = divisor.k
        if k > a.order:
            raise ValueError(f"cannot divide an order-{a.order} series by x^{k}")
        for i in range(k):
            if a.coeffs[i]:
                raise InexactDivisionError(
                    f"coefficient of x^{i} is {a.coeffs[i]}, not divisible by x^{k}", i
                )
        return PowerSeries(a.coeffs[k:], a.order - k)
    if isinstance(divisor, BivarPoly):
        out = []
        for i, c in enumerate(a.coeffs):
            try:
                out.append(c.exact_div(divisor))
            except InexactDivisionError as exc:
                raise InexactDivisionError(
                    f"coefficient of x^{i} ({c}) is not divisible by {divisor}", i
                ) from exc
        return PowerSeries(out, a.order)
    if isinstance(divisor, PowerSeries):
        d0 = divisor.coeffs[0]
        if not d0.is_constant() or not d0:
            raise InexactDivisionError(
                "series divisor needs a non-zero rational constant term", 0
            )
        inv_c = 1 / d0.constant_term()
        n = min(a.order, divisor.order)
        q: list[BivarPoly] = []
        for i in range(n + 1):
            acc = a.coeffs[i]
            for j in range(1, i + 1):
                if divisor.coeffs[j]:
                    acc = acc - divisor.coeffs[j] * q[i - j]
            q.append(acc * inv_c)
        return PowerSeries(q, n)
    raise TypeError(f"unsupported divisor {type(divisor).__name__}")
