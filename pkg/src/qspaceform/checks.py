"""Named residual / value checks and the reports that collect them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np


@dataclass(frozen=True)
class Check:
    """One named check.

    Residual checks pass when ``residual <= tolerance``. Value checks carry
    an estimate and its reference and pass when the relative deviation is
    within ``tolerance``.
    """

    name: str
    paper_ref: str
    tolerance: float
    passed: bool
    residual: float | None = None
    value: float | None = None
    reference: float | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "paper_ref": self.paper_ref}
        if self.residual is not None:
            out["residual"] = self.residual
        if self.value is not None:
            out["value"] = self.value
        if self.reference is not None:
            out["reference"] = self.reference
        out["tolerance"] = self.tolerance
        out["pass"] = self.passed
        return out


def residual_check(name: str, paper_ref: str, residual: float, tolerance: float) -> Check:
    residual = float(residual)
    return Check(name, paper_ref, float(tolerance), bool(residual <= tolerance), residual=residual)


def value_check(
    name: str, paper_ref: str, value: float, reference: float, rtol: float
) -> Check:
    value, reference = float(value), float(reference)
    if reference == 0.0:
        ok = abs(value) <= rtol
    else:
        ok = abs(value - reference) <= rtol * abs(reference)
    return Check(name, paper_ref, float(rtol), bool(ok), value=value, reference=reference)


def flag_check(name: str, paper_ref: str, ok: bool, value: float | None = None) -> Check:
    """A boolean check; ``value`` optionally records the quantity inspected."""
    return Check(name, paper_ref, 0.0, bool(ok), value=None if value is None else float(value))


@dataclass(frozen=True)
class CheckReport:
    checks: tuple[Check, ...]
    verdict: str | None = None
    notes: tuple[str, ...] = field(default=())

    @classmethod
    def of(cls, checks: Iterable[Check], verdict: str | None = None, notes: Iterable[str] = ()):
        return cls(tuple(checks), verdict, tuple(notes))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __iter__(self):
        return iter(self.checks)

    def __add__(self, other: CheckReport) -> CheckReport:
        verdict = other.verdict if other.verdict is not None else self.verdict
        return CheckReport(self.checks + other.checks, verdict, self.notes + other.notes)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"checks": [c.to_dict() for c in self.checks]}
        if self.verdict is not None:
            out["verdict"] = self.verdict
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def max_abs(a) -> float:
    """Max absolute entry, 0.0 for empty input; NaN propagates as inf."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    m = float(np.max(np.abs(a)))
    return m if not math.isnan(m) else math.inf
