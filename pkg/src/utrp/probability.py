"""Exact realization probabilities for uncertain traces.

The probability of an order-realization is the probability that independent
timestamps come out in that order, times the indeterminacy factors of the
included and excluded events.  The ordering probability is evaluated by the
backward recursion

    G_{n+1}(x) = 1
    G_i(x)     = integral over t >= x of f_i(t) * G_{i+1}(t) dt

so that the ordering probability is ``G_1(-inf)``.  Every density is piecewise
polynomial, hence every ``G_i`` is too: the recursion is carried out exactly on
a shared grid of breakpoints, with each piece stored in local coordinates.
Point timestamps contribute ``G_i(x) = [x <= t] * G_{i+1}(t)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

from .errors import CapExceeded, NotNormalized, TieError
from .model import (
    Point,
    StrongInterval,
    UncertainTrace,
    activity_pmf,
    skip_probability,
    time_bounds,
)
from .partial_order import (
    OrderRealization,
    Realization,
    default_cap,
    enumerate_order_realizations,
    expand_realizations,
    is_order_realization,
)

DEGREE_WARNING = 50


class DegreeWarning(UserWarning):
    """Polynomial degree in the ordering recursion grew past the comfort zone."""


@dataclass(frozen=True)
class OrderProbability:
    integral: float
    probability: float


@dataclass
class RealizationDistribution:
    """Probability of every realization of one trace, with its breakdown."""

    by_sequence: dict[Realization, float]
    by_order: dict[OrderRealization, OrderProbability]
    provenance: dict[Realization, list[tuple[OrderRealization, float]]] = field(default_factory=dict)

    def __getitem__(self, sigma: Sequence[str]) -> float:
        return self.by_sequence.get(tuple(sigma), 0.0)

    def __len__(self) -> int:
        return len(self.by_sequence)

    def total(self) -> float:
        return math.fsum(self.by_sequence.values())

    def sorted_items(self) -> list[tuple[Realization, float]]:
        """Realizations by decreasing probability, ties broken by sequence."""
        return sorted(self.by_sequence.items(), key=lambda kv: (-kv[1], kv[0]))


# -- ordering integral --------------------------------------------------------

class _GridFunction:
    """Piecewise polynomial on a fixed grid ``xs``.

    ``left`` is the value below ``xs[0]``, ``right`` the value at and above
    ``xs[-1]``, ``pieces[j]`` the polynomial on ``[xs[j], xs[j+1])`` in the
    local variable ``x - xs[j]``.
    """

    __slots__ = ("xs", "left", "right", "pieces")

    def __init__(self, xs: np.ndarray, left: float, right: float, pieces: list[np.ndarray]):
        self.xs = xs
        self.left = left
        self.right = right
        self.pieces = pieces

    def __call__(self, x: float) -> float:
        xs = self.xs
        if x < xs[0]:
            return self.left
        if x >= xs[-1]:
            return self.right
        j = int(np.searchsorted(xs, x, side="right")) - 1
        return float(P.polyval(x - xs[j], self.pieces[j]))

    @property
    def degree(self) -> int:
        return max(len(c) for c in self.pieces) - 1


def _density_on_grid(pieces: list[tuple[float, float, tuple[float, ...]]], xs: np.ndarray) -> list[np.ndarray]:
    """Density restricted to each grid interval, in local coordinates.

    ``pieces`` are ``(lo, hi, shape coefficients)`` already mapped onto the grid's
    coordinates; every piece bound is a grid point.
    """
    out = []
    k = 0
    for j in range(len(xs) - 1):
        a = xs[j]
        while k < len(pieces) and pieces[k][1] <= a:
            k += 1
        if k == len(pieces) or pieces[k][0] > a:
            out.append(np.zeros(1))
            continue
        lo, hi, coeffs = pieces[k]
        w = hi - lo
        shape = Polynomial(coeffs)(Polynomial([(a - lo) / w, 1.0 / w]))
        out.append(shape.coef / w)
    return out


def _integrate_from(f: list[np.ndarray], g: _GridFunction) -> _GridFunction:
    """``x -> integral over t >= x of f(t) g(t) dt`` where f vanishes off-grid."""
    xs = g.xs
    widths = np.diff(xs)
    m = len(widths)
    pieces: list[np.ndarray] = [None] * m  # type: ignore[list-item]
    tail = 0.0
    for j in range(m - 1, -1, -1):
        h = P.polymul(f[j], g.pieces[j])
        anti = P.polyint(h)
        full = float(P.polyval(widths[j], anti))
        piece = -anti
        piece[0] += tail + full
        pieces[j] = P.polytrim(piece) if np.any(piece) else np.zeros(1)
        tail += full
    return _GridFunction(xs, tail, 0.0, pieces)


def _step_at(t: float, value: float, g: _GridFunction) -> _GridFunction:
    xs = g.xs
    pieces = [np.array([value if xs[j + 1] <= t else 0.0]) for j in range(len(xs) - 1)]
    return _GridFunction(xs, value, value if t >= xs[-1] else 0.0, pieces)


def order_probability_integral(
    rho: Sequence[str], trace: UncertainTrace, *, strict_ties: bool = False
) -> float:
    """Probability that the timestamps of ``rho``'s events occur in that order.

    Events sharing an identical point timestamp form a tie block; each of the
    ``k!`` orderings of a ``k``-way block receives ``1/k!`` of its mass, unless
    ``strict_ties`` is set, in which case :class:`TieError` is raised.
    """
    events = [trace[eid] for eid in rho]
    if not events:
        return 1.0
    for e in events:
        if isinstance(e.timestamp, StrongInterval):
            raise NotNormalized(f"event {e.id} has an interval timestamp; normalize it first")

    # Orderings are affine invariant: map the time span onto [0, 1].
    lo = min(time_bounds(e)[0] for e in events)
    hi = max(time_bounds(e)[1] for e in events)
    scale = hi - lo if hi > lo else 1.0

    def z(t: float) -> float:
        return (t - lo) / scale

    # Consecutive events with the same point time form one tie block.
    blocks: list[tuple[object, int]] = []
    for e in events:
        ts = e.timestamp
        if isinstance(ts, Point):
            if blocks and isinstance(blocks[-1][0], float) and blocks[-1][0] == ts.t:
                blocks[-1] = (ts.t, blocks[-1][1] + 1)
                continue
            blocks.append((ts.t, 1))
        else:
            blocks.append(([(z(pc.lo), z(pc.hi), pc.coeffs) for pc in ts.density.pieces], 1))
    if strict_ties and any(k > 1 for _, k in blocks):
        tied = [eid for eid in rho if isinstance(trace[eid].timestamp, Point)]
        raise TieError(f"identical point timestamps among {tied}")

    grid = set()
    for payload, _ in blocks:
        if isinstance(payload, float):
            grid.add(z(payload))
        else:
            grid.update(b for pc in payload for b in pc[:2])
    xs = np.array(sorted(grid))
    if len(xs) == 1:
        xs = np.array([xs[0], xs[0] + 1.0])

    g = _GridFunction(xs, 1.0, 1.0, [np.ones(1) for _ in range(len(xs) - 1)])
    warned = False
    for payload, k in reversed(blocks):
        if isinstance(payload, float):
            t = z(payload)
            g = _step_at(t, g(t) / math.factorial(k), g)
        else:
            g = _integrate_from(_density_on_grid(payload, xs), g)
            if not warned and g.degree > DEGREE_WARNING:
                warnings.warn(
                    f"ordering polynomial degree {g.degree} exceeds {DEGREE_WARNING}; "
                    "results may lose precision",
                    DegreeWarning,
                    stacklevel=2,
                )
                warned = True
    return min(1.0, max(0.0, g.left))


# -- order and activity probabilities ----------------------------------------

def indeterminacy_factor(rho: Sequence[str], trace: UncertainTrace) -> float:
    included = set(rho)
    factor = 1.0
    for e in trace.events:
        if not e.is_indeterminate:
            continue
        p = skip_probability(e)
        factor *= (1.0 - p) if e.id in included else p
    return factor


def order_probability(
    rho: Sequence[str], trace: UncertainTrace, *, strict_ties: bool = False
) -> float:
    """Ordering probability times the occurrence probabilities.

    Included indeterminate events contribute ``1 - p_skip``, excluded ones
    ``p_skip``; determinate events contribute 1.
    """
    if not is_order_realization(rho, trace):
        raise ValueError(f"{tuple(rho)} is not an order-realization of case {trace.case!r}")
    return order_probability_integral(rho, trace, strict_ties=strict_ties) * indeterminacy_factor(rho, trace)


def activity_probability(
    sigma: Sequence[str], rho: Sequence[str], trace: UncertainTrace
) -> float:
    """Probability that the events of ``rho`` carry the labels ``sigma``."""
    if len(sigma) != len(rho):
        raise ValueError("realization and order-realization differ in length")
    prob = 1.0
    for label, eid in zip(sigma, rho):
        prob *= activity_pmf(trace[eid]).get(label, 0.0)
    return prob


def realization_distribution(
    trace: UncertainTrace, cap: int | None = None, *, strict_ties: bool = False
) -> RealizationDistribution:
    """Probability of every realization, summed over all enabling order-realizations."""
    if not trace.is_normalized():
        raise NotNormalized(f"case {trace.case!r} has strong attributes; normalize it first")
    cap = default_cap() if cap is None else cap
    by_order: dict[OrderRealization, OrderProbability] = {}
    contributions: dict[Realization, list[tuple[OrderRealization, float]]] = {}
    n_realizations = 0
    for rho in enumerate_order_realizations(trace, cap=cap):
        integral = order_probability_integral(rho, trace, strict_ties=strict_ties)
        p_order = integral * indeterminacy_factor(rho, trace)
        by_order[rho] = OrderProbability(integral, p_order)
        for sigma in expand_realizations(rho, trace, cap=cap):
            p = p_order * activity_probability(sigma, rho, trace)
            if sigma not in contributions:
                n_realizations += 1
                if n_realizations > cap:
                    raise CapExceeded("realizations", cap)
                contributions[sigma] = []
            contributions[sigma].append((rho, p))
    by_sequence = {
        sigma: math.fsum(p for _, p in sorted(parts)) for sigma, parts in sorted(contributions.items())
    }
    provenance = {sigma: sorted(parts) for sigma, parts in sorted(contributions.items())}
    return RealizationDistribution(by_sequence, by_order, provenance)

