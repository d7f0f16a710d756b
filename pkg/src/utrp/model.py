"""Uncertain event data: attributes, events, traces and logs.

Activities, timestamps and indeterminacy are each either strongly uncertain
(a set, an interval, a bare "?" flag) or weakly uncertain (explicit
probabilities).  :func:`normalize_strong` turns strong attributes into weak
ones under a uniformity assumption; everything probabilistic downstream works
on normalized events.

Timestamps are floats, seconds since the Unix epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

from .density import PiecewiseDensity
from .errors import NotNormalized, ValidationError

SILENT_LABEL = "ε"
_PMF_TOL = 1e-9


def _check_label(label: str) -> str:
    if not isinstance(label, str) or not label:
        raise ValidationError(f"activity labels must be non-empty strings, got {label!r}")
    if label == SILENT_LABEL:
        raise ValidationError(f"{SILENT_LABEL!r} is reserved for silent transitions")
    return label


# -- activity -----------------------------------------------------------------

@dataclass(frozen=True)
class Certain:
    label: str

    def __post_init__(self):
        _check_label(self.label)


@dataclass(frozen=True)
class StrongSet:
    labels: frozenset[str]

    def __post_init__(self):
        labels = frozenset(self.labels)
        if not labels:
            raise ValidationError("a strongly uncertain activity needs at least one label")
        for label in labels:
            _check_label(label)
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class WeakDist:
    """Label distribution; stored as sorted ``(label, probability)`` pairs."""

    pmf: tuple[tuple[str, float], ...]

    def __init__(self, pmf: Mapping[str, float] | Iterable[tuple[str, float]]):
        items = dict(pmf.items() if isinstance(pmf, Mapping) else pmf)
        if not items:
            raise ValidationError("a weakly uncertain activity needs at least one label")
        for label, p in items.items():
            _check_label(label)
            if not (isinstance(p, (int, float)) and 0.0 < p <= 1.0):
                raise ValidationError(f"probability of {label!r} must be in (0, 1], got {p!r}")
        total = math.fsum(items.values())
        if total > 1.0 + _PMF_TOL:
            raise ValidationError(f"activity probabilities sum to {total!r} > 1")
        object.__setattr__(self, "pmf", tuple(sorted((k, float(v)) for k, v in items.items())))

    def as_dict(self) -> dict[str, float]:
        return dict(self.pmf)

    @property
    def total(self) -> float:
        return math.fsum(p for _, p in self.pmf)

    def renormalized(self) -> WeakDist:
        total = self.total
        return WeakDist({k: v / total for k, v in self.pmf})


ActivitySpec = Union[Certain, StrongSet, WeakDist]


# -- timestamp ----------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    t: float

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise ValidationError("timestamps must be finite")
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class StrongInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValidationError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise ValidationError(f"interval endpoints out of order: {self.lo} > {self.hi}")
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))


@dataclass(frozen=True)
class WeakDensity:
    density: PiecewiseDensity


TimestampSpec = Union[Point, StrongInterval, WeakDensity]


# -- indeterminacy ------------------------------------------------------------

@dataclass(frozen=True)
class Determinate:
    pass


@dataclass(frozen=True)
class Indeterminate:
    """Event that may not have happened.  ``p_skip=None`` is the strong "?" flag."""

    p_skip: float | None = None

    def __post_init__(self):
        if self.p_skip is not None and not (0.0 < self.p_skip <= 1.0):
            raise ValidationError(f"skip probability must be in (0, 1], got {self.p_skip!r}")


IndeterminacySpec = Union[Determinate, Indeterminate]


# -- events, traces, logs -----------------------------------------------------

@dataclass(frozen=True)
class UncertainEvent:
    id: str
    case: str
    activity: ActivitySpec
    timestamp: TimestampSpec
    indeterminacy: IndeterminacySpec = field(default_factory=Determinate)

    def __post_init__(self):
        if not isinstance(self.activity, (Certain, StrongSet, WeakDist)):
            raise ValidationError(f"event {self.id}: bad activity {self.activity!r}")
        if not isinstance(self.timestamp, (Point, StrongInterval, WeakDensity)):
            raise ValidationError(f"event {self.id}: bad timestamp {self.timestamp!r}")
        if not isinstance(self.indeterminacy, (Determinate, Indeterminate)):
            raise ValidationError(f"event {self.id}: bad indeterminacy {self.indeterminacy!r}")

    @property
    def is_indeterminate(self) -> bool:
        return isinstance(self.indeterminacy, Indeterminate)


@dataclass(frozen=True)
class UncertainTrace:
    case: str
    events: tuple[UncertainEvent, ...]

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        seen = set()
        for e in events:
            if e.case != self.case:
                raise ValidationError(f"event {e.id} belongs to case {e.case!r}, not {self.case!r}")
            if e.id in seen:
                raise ValidationError(f"duplicate event id {e.id!r} in case {self.case!r}")
            seen.add(e.id)
        object.__setattr__(self, "_by_id", {e.id: e for e in events})

    def __getitem__(self, event_id: str) -> UncertainEvent:
        return self._by_id[event_id]

    def __iter__(self) -> Iterator[UncertainEvent]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    @property
    def ids(self) -> list[str]:
        return sorted(self._by_id)

    def is_normalized(self) -> bool:
        return all(is_normalized(e) for e in self.events)


@dataclass(frozen=True)
class UncertainLog:
    traces: tuple[UncertainTrace, ...]

    def __post_init__(self):
        traces = tuple(self.traces)
        object.__setattr__(self, "traces", traces)
        seen: set[str] = set()
        cases: set[str] = set()
        for tr in traces:
            if tr.case in cases:
                raise ValidationError(f"duplicate case id {tr.case!r}")
            cases.add(tr.case)
            for e in tr.events:
                if e.id in seen:
                    raise ValidationError(f"event id {e.id!r} is not unique in the log")
                seen.add(e.id)

    def trace(self, case: str) -> UncertainTrace:
        for tr in self.traces:
            if tr.case == case:
                return tr
        raise KeyError(case)

    def __iter__(self) -> Iterator[UncertainTrace]:
        return iter(self.traces)

    def __len__(self) -> int:
        return len(self.traces)


# -- projections --------------------------------------------------------------

def label_set(e: UncertainEvent) -> frozenset[str]:
    """Labels the event may carry (nonzero probability or possibility)."""
    a = e.activity
    if isinstance(a, Certain):
        return frozenset((a.label,))
    if isinstance(a, StrongSet):
        return a.labels
    return frozenset(label for label, p in a.pmf if p > 0)


def time_bounds(e: UncertainEvent) -> tuple[float, float]:
    t = e.timestamp
    if isinstance(t, Point):
        return t.t, t.t
    if isinstance(t, StrongInterval):
        return t.lo, t.hi
    return t.density.support


def activity_pmf(e: UncertainEvent) -> dict[str, float]:
    a = e.activity
    if isinstance(a, Certain):
        return {a.label: 1.0}
    if isinstance(a, WeakDist):
        return a.as_dict()
    raise NotNormalized(f"event {e.id} has a strongly uncertain activity; normalize it first")


def skip_probability(e: UncertainEvent) -> float:
    """Probability that the event did not occur (0 for determinate events)."""
    o = e.indeterminacy
    if isinstance(o, Determinate):
        return 0.0
    if o.p_skip is None:
        raise NotNormalized(f"event {e.id} has strong indeterminacy; normalize it first")
    return o.p_skip


def is_normalized(e: UncertainEvent) -> bool:
    return (
        not isinstance(e.activity, StrongSet)
        and not isinstance(e.timestamp, StrongInterval)
        and not (isinstance(e.indeterminacy, Indeterminate) and e.indeterminacy.p_skip is None)
    )


def normalize_strong(e: UncertainEvent) -> UncertainEvent:
    """Replace strong attributes with uniform weak ones.

    Sets become equiprobable label distributions, intervals become uniform
    densities (a degenerate interval becomes a point) and an unquantified "?"
    becomes a skip probability of 0.5.  Weak attributes pass through.
    """
    a, t, o = e.activity, e.timestamp, e.indeterminacy
    if isinstance(a, StrongSet):
        k = len(a.labels)
        a = WeakDist({x: 1.0 / k for x in a.labels})
    if isinstance(t, StrongInterval):
        t = Point(t.lo) if t.lo == t.hi else WeakDensity(PiecewiseDensity.uniform(t.lo, t.hi))
    if isinstance(o, Indeterminate) and o.p_skip is None:
        o = Indeterminate(0.5)
    if (a, t, o) == (e.activity, e.timestamp, e.indeterminacy):
        return e
    return UncertainEvent(e.id, e.case, a, t, o)


def normalize_trace(trace: UncertainTrace) -> UncertainTrace:
    return UncertainTrace(trace.case, tuple(normalize_strong(e) for e in trace.events))


def normalize_log(log: UncertainLog) -> UncertainLog:
    return UncertainLog(tuple(normalize_trace(tr) for tr in log.traces))
