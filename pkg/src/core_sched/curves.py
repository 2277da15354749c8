"""Parametric learning curves: true error as a function of cumulative data.

A curve maps cumulative processed data ``n`` to a true error in [0, 1],
non-increasing in ``n``. Four families are supported:

* ``exponential``  -- floor + (e0 - floor) * exp(-rate * n)
* ``power``        -- floor + (e0 - floor) * (1 + n) ** (-exponent)
* ``linear-need``  -- e0 - (e0 - floor) * min(1, n / data_need); hits the
  floor exactly once ``data_need`` units have been processed
* ``piecewise``    -- linear interpolation through explicit (n, error)
  control points, constant after the last point

Optional ``segments`` reshape any family: inside a segment with rate
multiplier ``m``, each unit of data advances the curve by only ``m``
effective units, so ``m = 0`` freezes the error across the segment (a flat
convergence region) while ``m = 1`` leaves the family untouched.

Observation noise, when configured, is additive Gaussian on *observed*
errors only; the true error driving success checks is always noiseless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CurveValidationError

FAMILIES = ("exponential", "power", "linear-need", "piecewise")

Violation = tuple[str, str]  # (field, message)


@dataclass(frozen=True)
class CurveSegment:
    """Rate-multiplier window over cumulative data; ``end=None`` is unbounded."""

    start: float
    end: float | None
    rate_multiplier: float


@dataclass(frozen=True)
class NoiseSpec:
    distribution: str = "gaussian"
    sigma: float = 0.0


@dataclass(frozen=True)
class LearningCurve:
    family: str
    initial_error: float = 1.0
    floor_error: float = 0.0
    rate: float | None = None
    exponent: float | None = None
    data_need: float | None = None
    points: tuple[tuple[float, float], ...] | None = None
    segments: tuple[CurveSegment, ...] = ()
    noise: NoiseSpec | None = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def exponential(cls, rate: float, initial_error: float = 1.0,
                    floor_error: float = 0.0, **kw) -> "LearningCurve":
        return cls("exponential", initial_error, floor_error, rate=rate, **kw)

    @classmethod
    def power(cls, exponent: float, initial_error: float = 1.0,
              floor_error: float = 0.0, **kw) -> "LearningCurve":
        return cls("power", initial_error, floor_error, exponent=exponent, **kw)

    @classmethod
    def linear_need(cls, data_need: float, initial_error: float = 1.0,
                    floor_error: float = 0.0, **kw) -> "LearningCurve":
        return cls("linear-need", initial_error, floor_error,
                   data_need=data_need, **kw)

    @classmethod
    def piecewise(cls, points, **kw) -> "LearningCurve":
        pts = tuple((float(n), float(e)) for n, e in points)
        initial = pts[0][1] if pts else 1.0
        return cls("piecewise", initial_error=initial, points=pts, **kw)

    # -- validation --------------------------------------------------------

    def check(self) -> list[Violation]:
        """Collect parameter violations; an empty list means the curve is usable."""
        bad: list[Violation] = []
        if self.family not in FAMILIES:
            bad.append(("family", f"unknown family {self.family!r}"))
            return bad
        if not (0.0 < self.initial_error <= 1.0) or not math.isfinite(self.initial_error):
            bad.append(("initial_error", "must be in (0, 1]"))
        if not (0.0 <= self.floor_error < self.initial_error) or not math.isfinite(self.floor_error):
            bad.append(("floor_error", "must be in [0, initial_error)"))

        used = {"exponential": "rate", "power": "exponent",
                "linear-need": "data_need", "piecewise": "points"}[self.family]
        for name in ("rate", "exponent", "data_need", "points"):
            value = getattr(self, name)
            if name == used:
                continue
            if value is not None:
                bad.append((name, f"not a parameter of family {self.family!r}"))
        if self.family == "exponential":
            if self.rate is None or not (self.rate > 0) or not math.isfinite(self.rate):
                bad.append(("rate", "must be a positive finite real"))
        elif self.family == "power":
            if self.exponent is None or not (self.exponent > 0) or not math.isfinite(self.exponent):
                bad.append(("exponent", "must be a positive finite real"))
        elif self.family == "linear-need":
            if self.data_need is None or not (self.data_need > 0) or not math.isfinite(self.data_need):
                bad.append(("data_need", "must be a positive finite real"))
        elif self.family == "piecewise":
            bad.extend(self._check_points())

        bad.extend(self._check_segments())
        if self.noise is not None:
            if self.noise.distribution != "gaussian":
                bad.append(("noise.distribution", "only 'gaussian' is supported"))
            if not (self.noise.sigma >= 0) or not math.isfinite(self.noise.sigma):
                bad.append(("noise.sigma", "must be a nonnegative finite real"))
        return bad

    def _check_points(self) -> list[Violation]:
        bad: list[Violation] = []
        pts = self.points
        if not pts:
            return [("points", "piecewise family requires control points")]
        if pts[0][0] != 0.0:
            bad.append(("points", "first control point must be at n=0"))
        elif pts[0][1] != self.initial_error:
            bad.append(("points", "error at n=0 must equal initial_error"))
        last_n, last_e = None, None
        for i, (n, e) in enumerate(pts):
            if last_n is not None and n <= last_n:
                bad.append((f"points[{i}]", "n values must be strictly increasing"))
            if not (0.0 <= e <= 1.0):
                bad.append((f"points[{i}]", "error must be in [0, 1]"))
            if last_e is not None and e > last_e:
                bad.append((f"points[{i}]", "errors must be non-increasing"))
            last_n, last_e = n, e
        return bad

    def _check_segments(self) -> list[Violation]:
        bad: list[Violation] = []
        prev_end: float | None = 0.0
        for i, seg in enumerate(self.segments):
            where = f"segments[{i}]"
            if seg.start < 0 or not math.isfinite(seg.start):
                bad.append((where, "start must be a nonnegative finite real"))
            if seg.end is not None and not (seg.end > seg.start):
                bad.append((where, "end must exceed start (or be null for unbounded)"))
            if not (seg.rate_multiplier >= 0) or not math.isfinite(seg.rate_multiplier):
                bad.append((where, "rate_multiplier must be >= 0 and finite"))
            if prev_end is None:
                bad.append((where, "an unbounded segment must be last"))
            elif seg.start < prev_end:
                bad.append((where, "segments must be ordered and non-overlapping"))
            prev_end = seg.end
        return bad

    def _require_valid(self) -> None:
        bad = self.check()
        if bad:
            raise CurveValidationError(bad[0][0], bad[0][1])

    # -- evaluation --------------------------------------------------------

    def effective_units(self, n: float) -> float:
        """Map actual cumulative data to effective curve progress through segments."""
        if not self.segments:
            return n
        eff = 0.0
        pos = 0.0
        for seg in self.segments:
            if n <= seg.start:
                break
            if seg.start > pos:
                eff += seg.start - pos
                pos = seg.start
            top = n if seg.end is None else min(n, seg.end)
            if top > pos:
                eff += (top - pos) * seg.rate_multiplier
                pos = top
            if seg.end is None or n <= seg.end:
                break
        if n > pos:
            eff += n - pos
        return eff

    def _base_error(self, m: float) -> float:
        e0, fl = self.initial_error, self.floor_error
        if self.family == "exponential":
            return fl + (e0 - fl) * math.exp(-self.rate * m)
        if self.family == "power":
            return fl + (e0 - fl) * (1.0 + m) ** (-self.exponent)
        if self.family == "linear-need":
            frac = m / self.data_need
            if frac >= 1.0:
                return fl
            return e0 - (e0 - fl) * frac
        # piecewise
        pts = self.points
        if m >= pts[-1][0]:
            return pts[-1][1]
        for (n0, y0), (n1, y1) in zip(pts, pts[1:]):
            if m <= n1:
                if n1 == n0:
                    return y1
                w = (m - n0) / (n1 - n0)
                return y0 + (y1 - y0) * w
        return pts[-1][1]

    def true_error(self, n: float) -> float:
        """Deterministic error after ``n`` cumulative data units."""
        self._require_valid()
        if n < 0:
            raise CurveValidationError("n", "cumulative data must be nonnegative")
        err = self._base_error(self.effective_units(n))
        return min(1.0, max(0.0, err))

    def observed_error(self, n: float, rng: np.random.Generator) -> float:
        """True error plus one noise draw, clamped to [0, 1].

        A draw is consumed from ``rng`` only when observation noise is
        configured with sigma > 0, so noiseless runs use no randomness.
        """
        err = self.true_error(n)
        if self.noise is not None and self.noise.sigma > 0:
            err += self.noise.sigma * float(rng.standard_normal())
        return min(1.0, max(0.0, err))

    def data_need_for(self, epsilon: float) -> float:
        """Minimal cumulative data with true error <= epsilon (inf if unreachable).

        Exact at float resolution: the returned value is the smallest double
        ``n`` satisfying ``true_error(n) <= epsilon``, so callers may use
        ``total >= need`` interchangeably with ``true_error(total) <= epsilon``.
        """
        self._require_valid()
        if self.true_error(0.0) <= epsilon:
            return 0.0
        hi = 1.0
        while self.true_error(hi) > epsilon:
            hi *= 2.0
            if hi > 1e30:
                return math.inf
        lo = 0.0
        while True:
            mid = lo + (hi - lo) / 2.0
            if not (lo < mid < hi):
                break
            if self.true_error(mid) <= epsilon:
                hi = mid
            else:
                lo = mid
        return hi

    @property
    def noisy(self) -> bool:
        return self.noise is not None and self.noise.sigma > 0


def curve_true_error(curve: LearningCurve, n: float) -> float:
    return curve.true_error(n)


def curve_observed_error(curve: LearningCurve, n: float,
                         rng: np.random.Generator) -> float:
    return curve.observed_error(n, rng)
