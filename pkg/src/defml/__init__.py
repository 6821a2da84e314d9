"""Deformed Mittag-Leffler polynomials: exact construction, cross-checks and numerics."""

__version__ = "0.1.0"

from .exact import BivarPoly, PowerSeries, Rational, poly_eval, poly_parity_y  # noqa: E402
from .families import FamilyKind, FamilySequence, family  # noqa: E402
