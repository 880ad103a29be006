"""Virtual clock for the simulated vantage point.

Time is kept as an exact Fraction so that fixed-grid sample timestamps
(i / rate) can be reconciled against elapsed time without float drift.
"""

from fractions import Fraction


class SimClock:
    def __init__(self, start: Fraction = Fraction(0)):
        self._now = Fraction(start)

    @property
    def now(self) -> Fraction:
        return self._now

    @property
    def now_s(self) -> float:
        return float(self._now)

    def advance(self, dt: Fraction) -> Fraction:
        if dt <= 0:
            raise ValueError("dt must be positive")
        self._now += Fraction(dt)
        return self._now
