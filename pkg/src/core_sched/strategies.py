"""Scheduling strategies: map observable learning status to allocation rows.

A strategy sees only a ``SchedulerView`` -- lifespans, weights, cumulative
processed data, and noisy observed-error histories of the threads that are
still effectively alive. True curve parameters are deliberately absent so
strategies cannot cheat; the offline witness search in ``learnability`` is
the one explicitly-labeled exception and is wired in by the engine.

All strategies are deterministic pure functions of (config, view); ties are
always broken toward the lowest thread id. Unused budget is left idle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .bundle import AllocationRow
from .errors import ConfigError, UsageError

KINDS = ("uniform", "exclusive-static", "edf-greedy", "adaptive",
         "scripted", "oracle")

History = Sequence[tuple[int, float]]


@dataclass(frozen=True)
class ThreadView:
    """Observable state of one effectively-alive thread."""

    id: int
    begin: int
    deadline: int
    weight: float
    cumulative: float
    history: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class SchedulerView:
    """Everything a strategy may consult when allocating at timeslot ``t``."""

    timeslot: int
    eta_cap: float
    capacity: float
    epsilon: float
    threads: tuple[ThreadView, ...]


@dataclass(frozen=True)
class StrategyConfig:
    """Strategy kind plus kind-specific parameters.

    ``quantum``, when set, restricts every emitted fraction to a multiple of
    ``eta_cap / quantum`` (rounded down; leftovers idle).
    """

    kind: str
    # exclusive-static: preset fraction per thread id, fixed for the lifespan
    fractions: Mapping[int, float] | None = None
    # scripted: full allocation matrix, one row per timeslot
    matrix: tuple[Mapping[int, float], ...] | None = None
    # adaptive / edf-greedy knobs
    window: int = 5
    min_rel_drop: float = 0.01
    rho_step: float = 0.25
    gamma: float = 2.0
    lookback: int | None = None
    quantum: int | None = None

    @classmethod
    def uniform(cls, **kw) -> "StrategyConfig":
        return cls("uniform", **kw)

    @classmethod
    def exclusive_static(cls, fractions: Mapping[int, float] | None = None,
                         **kw) -> "StrategyConfig":
        return cls("exclusive-static", fractions=fractions, **kw)

    @classmethod
    def edf_greedy(cls, lookback: int = 2, **kw) -> "StrategyConfig":
        return cls("edf-greedy", lookback=lookback, **kw)

    @classmethod
    def adaptive(cls, window: int = 5, min_rel_drop: float = 0.01,
                 rho_step: float = 0.25, gamma: float = 2.0,
                 lookback: int | None = None, **kw) -> "StrategyConfig":
        return cls("adaptive", window=window, min_rel_drop=min_rel_drop,
                   rho_step=rho_step, gamma=gamma, lookback=lookback, **kw)

    @classmethod
    def scripted(cls, matrix: Sequence[Mapping[int, float]], **kw) -> "StrategyConfig":
        return cls("scripted", matrix=tuple(dict(row) for row in matrix), **kw)

    @classmethod
    def oracle(cls, quantum: int = 1, **kw) -> "StrategyConfig":
        return cls("oracle", quantum=quantum, **kw)

    @property
    def effective_lookback(self) -> int:
        if self.lookback is not None:
            return self.lookback
        return self.window if self.kind == "adaptive" else 2

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown strategy kind {self.kind!r}; "
                              f"valid kinds: {', '.join(KINDS)}")
        if self.quantum is not None and (self.quantum < 1
                                         or int(self.quantum) != self.quantum):
            raise ConfigError("quantum must be a positive integer")
        if self.kind == "scripted" and self.matrix is None:
            raise ConfigError("scripted strategy requires an allocation matrix")
        if self.kind == "adaptive":
            if self.window < 2:
                raise ConfigError("adaptive window must be >= 2")
            if self.min_rel_drop < 0:
                raise ConfigError("min_rel_drop must be >= 0")
            if not 0.0 <= self.rho_step <= 1.0:
                raise ConfigError("rho_step must be in [0, 1]")
            if self.gamma <= 0:
                raise ConfigError("gamma must be > 0")
        if self.effective_lookback < 2:
            raise ConfigError("lookback must be >= 2")
        if self.fractions is not None:
            for tid, f in self.fractions.items():
                if not f >= 0:
                    raise ConfigError(f"preset fraction for thread {tid} must be >= 0")


def detect_plateau(history: History, window: int, min_rel_drop: float) -> bool:
    """True when the relative error drop over the last ``window`` entries is
    below ``min_rel_drop``; short histories never count as plateaued."""
    if window < 2:
        raise UsageError("window must be >= 2")
    if len(history) < window:
        return False
    errs = [e for _, e in history[-window:]]
    first, last = errs[0], errs[-1]
    if first <= 0:
        return True
    return (first - last) / first < min_rel_drop


def estimate_marginal_gain(history: History, lookback: int) -> float:
    """Average per-slot error decrease over the last ``lookback`` observations,
    clamped at 0; returns 0 for short histories."""
    if lookback < 2:
        raise UsageError("lookback must be >= 2")
    if len(history) < lookback:
        return 0.0
    recent = history[-lookback:]
    t0, e0 = recent[0]
    t1, e1 = recent[-1]
    if t1 <= t0:
        return 0.0
    return max(0.0, (e0 - e1) / (t1 - t0))


def _required_rate(th: ThreadView, view: SchedulerView) -> float:
    """Per-slot error drop needed to reach the target by the deadline."""
    last = th.history[-1][1]
    remaining = th.deadline - view.timeslot + 1
    return (last - view.epsilon) / remaining


def _uniform(view: SchedulerView) -> dict[int, float]:
    ths = view.threads
    if not ths:
        return {}
    share = view.eta_cap / len(ths)
    return {th.id: share for th in ths}


def _exclusive_static(cfg: StrategyConfig, view: SchedulerView) -> dict[int, float]:
    if cfg.fractions is None:
        raise ConfigError("exclusive-static strategy requires preset fractions "
                          "(the engine fills an equal split when omitted)")
    alloc = {th.id: cfg.fractions.get(th.id, 0.0) for th in view.threads}
    if sum(alloc.values()) > view.eta_cap + 1e-9:
        raise ConfigError(
            f"preset fractions for alive threads sum to {sum(alloc.values()):.6g}, "
            f"exceeding the cap {view.eta_cap:.6g} at timeslot {view.timeslot}")
    return alloc


def _edf_greedy(cfg: StrategyConfig, view: SchedulerView) -> dict[int, float]:
    # Deadline order, greedily granting each thread the fraction a linear
    # extrapolation of its recent error slope says it needs. The slope is
    # assumed proportional to the granted fraction and calibrated at the
    # uniform share; threads with no measurable progress grab what is left.
    ths = sorted(view.threads, key=lambda th: (th.deadline, th.id))
    if not ths:
        return {}
    ref_share = view.eta_cap / len(ths)
    remaining = view.eta_cap
    alloc: dict[int, float] = {}
    for th in ths:
        if not th.history:
            want = ref_share
        else:
            last = th.history[-1][1]
            if last <= view.epsilon:
                want = 0.0
            else:
                gain = estimate_marginal_gain(th.history, cfg.effective_lookback)
                if gain <= 0.0:
                    want = remaining
                else:
                    want = min(remaining,
                               (_required_rate(th, view) / gain) * ref_share)
        granted = min(want, remaining)
        alloc[th.id] = granted
        remaining -= granted
    return alloc


def _adaptive(cfg: StrategyConfig, view: SchedulerView) -> dict[int, float]:
    # Uniform base; each slot, a step of the cap moves from plateaued threads
    # to the non-plateaued thread with the best recent marginal gain, and
    # threads whose required rate exceeds gamma times their achievable rate
    # are abandoned outright (their whole share joins the transfer).
    ths = sorted(view.threads, key=lambda th: th.id)
    if not ths:
        return {}
    share = {th.id: view.eta_cap / len(ths) for th in ths}
    lookback = cfg.effective_lookback

    plateaued: set[int] = set()
    hopeless: set[int] = set()
    gains: dict[int, float] = {}
    for th in ths:
        gains[th.id] = estimate_marginal_gain(th.history, lookback)
        if detect_plateau(th.history, cfg.window, cfg.min_rel_drop):
            plateaued.add(th.id)
        if len(th.history) >= cfg.window:
            if _required_rate(th, view) > cfg.gamma * gains[th.id]:
                hopeless.add(th.id)

    pool = 0.0
    for tid in hopeless:
        pool += share[tid]
        share[tid] = 0.0

    recipients = [th for th in ths
                  if th.id not in plateaued and th.id not in hopeless]
    if recipients:
        best = max(recipients, key=lambda th: (gains[th.id], -th.id))
        donors = [tid for tid in plateaued if tid not in hopeless]
        donor_total = sum(share[tid] for tid in donors)
        wanted = cfg.rho_step * view.eta_cap
        if donor_total > 0.0:
            scale = min(1.0, wanted / donor_total)
            for tid in donors:
                moved = share[tid] * scale
                share[tid] -= moved
                pool += moved
        share[best.id] += pool
    # No eligible recipient: plateaued threads keep their shares and the
    # abandoned threads' budget idles.
    return share


def _scripted(cfg: StrategyConfig, view: SchedulerView) -> dict[int, float]:
    t = view.timeslot
    if cfg.matrix is None or t > len(cfg.matrix):
        rows = 0 if cfg.matrix is None else len(cfg.matrix)
        raise ConfigError(f"scripted matrix has {rows} rows; no row for timeslot {t}")
    row = cfg.matrix[t - 1]
    visible = {th.id for th in view.threads}
    return {tid: float(f) for tid, f in row.items() if tid in visible}


def _quantize(alloc: dict[int, float], eta_cap: float, quantum: int) -> dict[int, float]:
    if eta_cap <= 0:
        return {tid: 0.0 for tid in alloc}
    unit = eta_cap / quantum
    return {tid: int(f / unit + 1e-9) * unit for tid, f in alloc.items()}


def allocate(strategy: StrategyConfig, view: SchedulerView) -> AllocationRow:
    """Produce the allocation row for one timeslot.

    Fractions are emitted only for threads present in the view (the
    effectively-alive set); their sum never exceeds the cap. Deterministic:
    identical (strategy, view) pairs yield identical rows.
    """
    kind = strategy.kind
    if kind == "uniform":
        alloc = _uniform(view)
    elif kind == "exclusive-static":
        alloc = _exclusive_static(strategy, view)
    elif kind == "edf-greedy":
        alloc = _edf_greedy(strategy, view)
    elif kind == "adaptive":
        alloc = _adaptive(strategy, view)
    elif kind == "scripted":
        alloc = _scripted(strategy, view)
    elif kind == "oracle":
        raise ConfigError("oracle strategy must be resolved against a bundle "
                          "before allocation (the engine does this at run start)")
    else:
        raise ConfigError(f"unknown strategy kind {kind!r}")

    if strategy.quantum is not None:
        alloc = _quantize(alloc, view.eta_cap, strategy.quantum)
    return AllocationRow(view.timeslot, alloc)
