"""Result records shared across modules."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NumericalError


@dataclass(frozen=True)
class RhoEstimate:
    """Bracketed estimate of the asymptotic convergence factor of a set.

    ``method`` names the estimator route: "green-saddle" (level-set merge
    of the Green's function) or "deviation-fit" (log-linear regression on
    minimax deviations).  The true factor always lies in (0, 1) for a
    disconnected compact set, so the bracket is required to as well.
    """

    value: float
    lower: float
    upper: float
    method: str
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (0.0 < self.lower <= self.value <= self.upper < 1.0):
            raise NumericalError(
                f"convergence-factor bracket out of range: "
                f"[{self.lower!r}, {self.value!r}, {self.upper!r}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower
