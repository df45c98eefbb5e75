"""Closed confidence intervals for signed amplitudes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class ConfidenceInterval:
    """A closed interval ``[low, high]`` inside ``[-1, 1]``.

    Parameters
    ----------
    low: float
        Lower amplitude bound.
    high: float
        Upper amplitude bound.

    Raises
    ------
    ValueError
        If the bounds are out of order or leave ``[-1, 1]``.
    """

    low: float
    high: float

    def __post_init__(self) -> None:
        if not -1.0 <= self.low <= self.high <= 1.0:
            raise ValueError(
                f"Interval bounds must satisfy -1 <= low <= high <= 1, got [{self.low}, {self.high}]"
            )

    @classmethod
    def clipped(cls, low: float, high: float, limit: float = 1.0) -> ConfidenceInterval:
        """Build an interval after clamping both bounds into ``[-limit, limit]``."""

        if not 0 < limit <= 1:
            raise ValueError(f"Clipping limit must lie in (0, 1], got {limit}")
        return cls(min(max(low, -limit), limit), min(max(high, -limit), limit))

    @property
    def center(self) -> float:
        return (self.low + self.high) / 2

    @property
    def half_width(self) -> float:
        return (self.high - self.low) / 2

    @property
    def width(self) -> float:
        return self.high - self.low

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high

    def to_dict(self) -> dict[str, Any]:
        return {"low": self.low, "high": self.high}
