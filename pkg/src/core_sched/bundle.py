"""Task-bundle data model: threads, resource profiles, alive sets, validation.

A bundle is an instance of the scheduling problem: ``K`` learning threads,
each with a lifespan ``[begin, deadline]`` and a learning curve, sharing a
per-timeslot data-processing capacity over a discrete horizon ``1..T``.

All types are immutable values; construction is permissive and
``validate_bundle`` reports every invariant violation as data rather
than raising, so malformed instances can be inspected and explained.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .curves import LearningCurve
from .errors import UsageError


@dataclass(frozen=True)
class ThreadSpec:
    """One learning thread: lifespan, curve, importance weight, arrival limit.

    ``arrival_cap`` bounds how much data the thread's stream can supply per
    timeslot: a scalar applies every slot, a sequence is indexed by absolute
    timeslot (length = horizon), ``None`` means unbounded.
    """

    id: int
    begin: int
    deadline: int
    curve: LearningCurve
    weight: float = 1.0
    arrival_cap: float | tuple[float, ...] | None = None

    def cap_at(self, t: int) -> float:
        if self.arrival_cap is None:
            return math.inf
        if isinstance(self.arrival_cap, tuple):
            return self.arrival_cap[t - 1]
        return self.arrival_cap


@dataclass(frozen=True)
class ResourceProfile:
    """Per-timeslot processing capacities N_t, indexed by slot 1..T."""

    capacities: tuple[float, ...]

    @classmethod
    def constant(cls, capacity: float, horizon: int) -> "ResourceProfile":
        return cls((float(capacity),) * horizon)

    def at(self, t: int) -> float:
        return self.capacities[t - 1]


@dataclass(frozen=True)
class TaskBundle:
    threads: tuple[ThreadSpec, ...]
    resource_profile: ResourceProfile
    horizon: int

    @property
    def thread_ids(self) -> tuple[int, ...]:
        return tuple(th.id for th in self.threads)

    def thread(self, thread_id: int) -> ThreadSpec:
        for th in self.threads:
            if th.id == thread_id:
                return th
        raise UsageError(f"no thread with id {thread_id}")

    def capacity(self, t: int) -> float:
        return self.resource_profile.at(t)


@dataclass(frozen=True)
class AllocationRow:
    """Per-timeslot allocation fractions; threads absent from the map get 0."""

    timeslot: int
    fractions: Mapping[int, float]

    def fraction_for(self, thread_id: int) -> float:
        return self.fractions.get(thread_id, 0.0)

    def total(self) -> float:
        return sum(self.fractions.values())


@dataclass(frozen=True)
class BundleViolation:
    thread_id: int | None
    field: str
    message: str

    def __str__(self) -> str:
        where = f"thread {self.thread_id}: " if self.thread_id is not None else ""
        return f"{where}{self.field}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[BundleViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(str(v) for v in self.violations)


def alive_set(bundle: TaskBundle, t: int) -> frozenset[int]:
    """Thread ids whose lifespan contains timeslot ``t`` (formal definition).

    Purely interval-based: completion and failure status never enter here;
    the simulation engine separately narrows this to the effective alive set.
    """
    if not 1 <= t <= bundle.horizon:
        raise UsageError(f"timeslot {t} outside horizon 1..{bundle.horizon}")
    return frozenset(th.id for th in bundle.threads if th.begin <= t <= th.deadline)


def validate_bundle(bundle: TaskBundle) -> ValidationReport:
    """Check every bundle invariant; an empty report means the bundle is usable."""
    bad: list[BundleViolation] = []

    if bundle.horizon < 1:
        bad.append(BundleViolation(None, "horizon", "must be a positive integer"))
    caps = bundle.resource_profile.capacities
    if len(caps) != bundle.horizon:
        bad.append(BundleViolation(
            None, "resource_profile",
            f"length {len(caps)} != horizon {bundle.horizon}"))
    for i, cap in enumerate(caps):
        if not (cap >= 0) or not math.isfinite(cap):
            bad.append(BundleViolation(
                None, "resource_profile",
                f"capacity at timeslot {i + 1} must be >= 0 and finite, got {cap}"))

    for pos, th in enumerate(bundle.threads):
        if th.id != pos + 1:
            bad.append(BundleViolation(
                th.id, "id", f"ids must be consecutive from 1; position {pos} has id {th.id}"))
        if th.begin > th.deadline:
            bad.append(BundleViolation(th.id, "begin", "begin > deadline"))
        if th.begin < 1:
            bad.append(BundleViolation(th.id, "begin", "must be >= 1"))
        if th.deadline > bundle.horizon:
            bad.append(BundleViolation(
                th.id, "deadline", f"exceeds horizon {bundle.horizon}"))
        if not (th.weight >= 0) or not math.isfinite(th.weight):
            bad.append(BundleViolation(th.id, "weight", "must be >= 0 and finite"))
        if th.arrival_cap is not None:
            caps_seq = (th.arrival_cap,) if not isinstance(th.arrival_cap, tuple) \
                else th.arrival_cap
            if isinstance(th.arrival_cap, tuple) and len(th.arrival_cap) != bundle.horizon:
                bad.append(BundleViolation(
                    th.id, "arrival_cap",
                    f"per-slot list length {len(th.arrival_cap)} != horizon {bundle.horizon}"))
            for cap in caps_seq:
                if not (cap >= 0) or not math.isfinite(cap):
                    bad.append(BundleViolation(
                        th.id, "arrival_cap", f"entries must be >= 0 and finite, got {cap}"))
        for fld, msg in th.curve.check():
            bad.append(BundleViolation(th.id, f"curve.{fld}", msg))

    return ValidationReport(tuple(bad))


# -- canonical form ---------------------------------------------------------

def _curve_dict(curve: LearningCurve) -> dict:
    d: dict = {"family": curve.family,
               "initial_error": curve.initial_error,
               "floor_error": curve.floor_error}
    for name in ("rate", "exponent", "data_need"):
        if getattr(curve, name) is not None:
            d[name] = getattr(curve, name)
    if curve.points is not None:
        d["points"] = [list(p) for p in curve.points]
    if curve.segments:
        d["segments"] = [{"start": s.start, "end": s.end,
                          "rate_multiplier": s.rate_multiplier}
                         for s in curve.segments]
    if curve.noise is not None:
        d["noise"] = {"distribution": curve.noise.distribution,
                      "sigma": curve.noise.sigma}
    return d


def bundle_canonical_dict(bundle: TaskBundle) -> dict:
    threads = []
    for th in bundle.threads:
        d: dict = {"id": th.id, "begin": th.begin, "deadline": th.deadline,
                   "weight": th.weight, "curve": _curve_dict(th.curve)}
        if th.arrival_cap is not None:
            d["arrival_cap"] = list(th.arrival_cap) \
                if isinstance(th.arrival_cap, tuple) else th.arrival_cap
        threads.append(d)
    return {"horizon": bundle.horizon,
            "resource_profile": list(bundle.resource_profile.capacities),
            "threads": threads}


def bundle_hash(bundle: TaskBundle) -> str:
    """Stable content hash used to tie traces back to their bundle."""
    blob = json.dumps(bundle_canonical_dict(bundle), sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
