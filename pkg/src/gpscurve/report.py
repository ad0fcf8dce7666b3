from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one bound or compliance check.

    ``worst_slack`` is the smallest margin found (traffic units); the check
    passes iff it is at least ``-tolerance``.
    """

    name: str
    worst_slack: object
    checked: int
    witness: Optional[Tuple] = None
    tolerance: Fraction = Fraction(0)
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.worst_slack >= -self.tolerance

    def __bool__(self) -> bool:
        return self.passed

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        slack = self.worst_slack
        text = f"{status} {self.name}: worst slack {float(slack):.6g} over {self.checked} checks"
        if not self.passed and self.witness is not None:
            text += f"; witness {tuple(str(w) for w in self.witness)}"
        if self.detail:
            text += f" ({self.detail})"
        return text


def merge(name: str, reports, tolerance=Fraction(0)) -> BoundReport:
    """Combine reports, keeping the worst witness."""
    reports = list(reports)
    if not reports:
        return BoundReport(name, Fraction(0), 0, None, tolerance)
    worst = min(reports, key=lambda r: r.worst_slack)
    return BoundReport(
        name,
        worst.worst_slack,
        sum(r.checked for r in reports),
        worst.witness,
        tolerance,
        worst.detail,
    )
