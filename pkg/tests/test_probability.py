from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from utrp.datasets import credit_card_trace, validation_trace
from utrp.density import PiecewiseDensity
from utrp.errors import NotNormalized, TieError
from utrp.model import (
    Certain,
    Determinate,
    Indeterminate,
    Point,
    StrongInterval,
    UncertainEvent,
    UncertainTrace,
    WeakDensity,
    WeakDist,
    normalize_trace,
)
from utrp.probability import (
    activity_probability,
    order_probability,
    order_probability_integral,
    realization_distribution,
)


def trace_of(*timestamps, indeterminacy=None) -> UncertainTrace:
    events = []
    for i, ts in enumerate(timestamps):
        if isinstance(ts, tuple):
            ts = WeakDensity(PiecewiseDensity.uniform(*ts))
        elif isinstance(ts, (int, float)):
            ts = Point(float(ts))
        ind = (indeterminacy or {}).get(i, Determinate())
        events.append(UncertainEvent(f"e{i + 1}", "c", Certain("abcdefgh"[i]), ts, ind))
    return UncertainTrace("c", tuple(events))


def test_disjoint_intervals():
    trace = trace_of((0, 1), (2, 3))
    assert order_probability_integral(("e1", "e2"), trace) == 1.0
    assert order_probability_integral(("e2", "e1"), trace) == 0.0


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_iid_uniforms_are_exchangeable(k):
    trace = trace_of(*[(0, 1)] * k)
    for perm in itertools.permutations(trace.ids):
        assert order_probability_integral(perm, trace) == pytest.approx(1 / math.factorial(k), abs=1e-12)


def test_overlapping_uniforms_closed_form():
    trace = trace_of((0, 2), (1, 3))
    assert order_probability_integral(("e1", "e2"), trace) == pytest.approx(7 / 8, abs=1e-12)
    assert order_probability_integral(("e2", "e1"), trace) == pytest.approx(1 / 8, abs=1e-12)


def test_point_inside_interval():
    trace = trace_of((0, 4), 1.0)
    assert order_probability_integral(("e1", "e2"), trace) == pytest.approx(0.25)
    assert order_probability_integral(("e2", "e1"), trace) == pytest.approx(0.75)


def test_credit_card_integrals_rational():
    trace = normalize_trace(credit_card_trace())
    # Hours from 2020-10-05 00:00: e1 at 23, e2 ~ U[24, 48), e3 ~ U[-3, 11).
    expected = {
        ("e1", "e2", "e3"): Fraction(25, 168),
        ("e1", "e3", "e2"): Fraction(107, 168),
        ("e3", "e1", "e2"): Fraction(36, 168),
    }
    for prefix, value in expected.items():
        for tail in (("e4", "e5"), ("e4", "e5", "e6")):
            assert order_probability_integral(prefix + tail, trace) == pytest.approx(float(value), abs=1e-12)


def test_validation_order_probabilities():
    trace = normalize_trace(validation_trace())
    assert order_probability(("e1", "e2", "e4"), trace) == pytest.approx(0.8)
    assert order_probability(("e1", "e2", "e3", "e4"), trace) == pytest.approx(0.1)
    assert order_probability(("e1", "e3", "e2", "e4"), trace) == pytest.approx(0.1)


def test_order_probability_rejects_invalid_rho():
    trace = normalize_trace(validation_trace())
    with pytest.raises(ValueError):
        order_probability(("e1", "e4"), trace)


def test_activity_probability():
    trace = normalize_trace(validation_trace())
    rho = ("e1", "e2", "e4")
    assert activity_probability(("a", "c", "e"), rho, trace) == pytest.approx(0.1)
    assert activity_probability(("a", "x", "e"), rho, trace) == 0.0
    with pytest.raises(ValueError):
        activity_probability(("a",), rho, trace)


def _triangle(lo, hi):
    mid = (lo + hi) / 2
    return PiecewiseDensity.from_pieces([(lo, mid, [0.0, 1.0]), (mid, hi, [1.0, -1.0])])


def _quadratic(lo, hi):
    # 3 s^2 on [lo, hi]
    return PiecewiseDensity.from_pieces([(lo, hi, [0.0, 0.0, 3.0])])


@pytest.mark.parametrize("seed", range(6))
def test_three_densities_against_quadrature(seed):
    rng = np.random.default_rng(seed)
    makers = [PiecewiseDensity.uniform, _triangle, _quadratic]
    densities = []
    for _ in range(3):
        lo = float(rng.uniform(0, 2))
        hi = lo + float(rng.uniform(0.5, 2))
        densities.append(makers[int(rng.integers(0, 3))](lo, hi))
    trace = UncertainTrace(
        "c",
        tuple(UncertainEvent(f"e{i + 1}", "c", Certain("x"), WeakDensity(d)) for i, d in enumerate(densities)),
    )
    d1, d2, d3 = densities

    def inner(y):
        return float(d2.pdf(y)) * (1.0 - float(d3.cdf(y)))

    lo2, hi2 = d2.support
    points = sorted({b for d in densities for b in d.breakpoints})

    def outer(x):
        a = max(x, lo2)
        if a >= hi2:
            return 0.0
        inside = [p for p in points if a < p < hi2]
        return float(d1.pdf(x)) * integrate.quad(inner, a, hi2, points=inside or None, limit=200)[0]

    lo1, hi1 = d1.support
    oracle, _ = integrate.quad(
        outer, lo1, hi1, points=[p for p in points if lo1 < p < hi1] or None, limit=200, epsabs=1e-12
    )
    assert order_probability_integral(("e1", "e2", "e3"), trace) == pytest.approx(oracle, abs=1e-7)


def test_point_ties_share_mass_evenly():
    trace = trace_of(5.0, 5.0, 5.0)
    for perm in itertools.permutations(trace.ids):
        assert order_probability_integral(perm, trace) == pytest.approx(1 / 6)
    dist = realization_distribution(trace)
    assert len(dist) == 6
    assert dist.total() == pytest.approx(1.0)


def test_strict_ties_raise():
    trace = trace_of(5.0, 5.0)
    with pytest.raises(TieError):
        order_probability_integral(("e1", "e2"), trace, strict_ties=True)
    with pytest.raises(TieError):
        realization_distribution(trace, strict_ties=True)


def test_tie_at_interval_edge_is_measure_zero():
    trace = trace_of(1.0, (1, 2))
    assert order_probability_integral(("e1", "e2"), trace) == pytest.approx(1.0)


def test_strong_trace_rejected():
    trace = UncertainTrace(
        "c", (UncertainEvent("e1", "c", Certain("a"), StrongInterval(0.0, 1.0)),)
    )
    with pytest.raises(NotNormalized):
        realization_distribution(trace)
    with pytest.raises(NotNormalized):
        order_probability_integral(("e1",), trace)


def test_certain_ordered_trace_single_realization():
    dist = realization_distribution(trace_of(1.0, 2.0, 3.0))
    assert dist.by_sequence == {("a", "b", "c"): 1.0}


def test_all_optional_includes_empty_realization():
    trace = trace_of(1.0, 2.0, indeterminacy={0: Indeterminate(0.5), 1: Indeterminate(0.25)})
    dist = realization_distribution(trace)
    assert dist[()] == pytest.approx(0.125)
    assert dist.total() == pytest.approx(1.0)


def test_distribution_sums_over_enablers():
    trace = UncertainTrace(
        "c",
        (
            UncertainEvent("e1", "c", WeakDist({"a": 0.5, "b": 0.5}), WeakDensity(PiecewiseDensity.uniform(0, 1))),
            UncertainEvent("e2", "c", WeakDist({"a": 0.5, "b": 0.5}), WeakDensity(PiecewiseDensity.uniform(0, 1))),
        ),
    )
    dist = realization_distribution(trace)
    assert dist[("a", "b")] == pytest.approx(0.25)
    assert len(dist.provenance[("a", "b")]) == 2
    assert dist[("a", "a")] == pytest.approx(0.25)
