from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def fmt_number(v) -> str | float | int:
    """Rationals as ``"p/q"`` strings, floats left for shortest round-trip output."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return v
    return float(v)


def _finite_or_none(v) -> float | None:
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass(frozen=True)
class VerificationReport:
    identity: str
    params: dict[str, Any]
    measured: float | str
    claimed_paper: str
    claimed_derived: str
    abs_dev: float
    passed: bool
    tol: float = 0.0
    rel_dev: float = 0.0
    # which claimed value the measurement agrees with: "paper" (claimed_paper), derived, both, none
    matched: str | None = None
    detail: str = field(default="", compare=False)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "identity": self.identity,
            "params": {k: fmt_number(v) if not isinstance(v, str) else v
                       for k, v in self.params.items()},
            "measured": self.measured if isinstance(self.measured, str) else float(self.measured),
            "claimed_paper": self.claimed_paper,
            "claimed_derived": self.claimed_derived,
            "abs_dev": _finite_or_none(self.abs_dev),
            "pass": bool(self.passed),
            "rel_dev": _finite_or_none(self.rel_dev),
            "tol": float(self.tol),
            "matched": self.matched,
        }
        if self.detail:
            d["detail"] = self.detail
        return d


def exact_report(identity: str, params: dict, ok: bool, detail: str = "") -> VerificationReport:
    """Report for an identity checked in exact arithmetic (no tolerance)."""
    return VerificationReport(
        identity=identity,
        params=params,
        measured="equal" if ok else "differs",
        claimed_paper="equal",
        claimed_derived="equal",
        abs_dev=0.0 if ok else float("inf"),
        passed=ok,
        matched="both" if ok else "none",
        detail=detail,
    )
