"""Worked examples: the credit-card fraud case, its reference model, and a
small validation trace with symmetric timestamp overlap."""

from __future__ import annotations

from datetime import datetime, timezone

from .model import (
    Certain,
    Indeterminate,
    Point,
    StrongInterval,
    UncertainEvent,
    UncertainLog,
    UncertainTrace,
    WeakDist,
)
from .petri import PetriNet


def _ts(text: str) -> float:
    return datetime.fromisoformat(text).replace(tzinfo=timezone.utc).timestamp()


def _day(text: str) -> StrongInterval:
    start = _ts(text)
    return StrongInterval(start, start + 86400.0)


def credit_card_trace() -> UncertainTrace:
    """Case 5167 of the fraud investigation process, strong attributes intact."""
    case = "5167"
    return UncertainTrace(
        case,
        (
            UncertainEvent("e1", case, Certain("h"), Point(_ts("2020-10-05T23:00"))),
            UncertainEvent("e2", case, Certain("c"), _day("2020-10-06")),
            UncertainEvent(
                "e3", case, Certain("r"),
                StrongInterval(_ts("2020-10-05T20:00"), _ts("2020-10-06T10:00")),
            ),
            UncertainEvent("e4", case, Certain("i"), Point(_ts("2020-10-09T10:00"))),
            UncertainEvent("e5", case, WeakDist({"f": 0.3, "t": 0.7}), Point(_ts("2020-10-14T09:00"))),
            UncertainEvent("e6", case, Certain("v"), Point(_ts("2020-10-15T10:00")), Indeterminate()),
        ),
    )


def validation_trace() -> UncertainTrace:
    """Four events; e2 and e3 overlap on identical intervals, e3 is skipped w.p. 0.8."""
    case = "validation"
    overlap = StrongInterval(_ts("2021-03-01T10:00"), _ts("2021-03-01T12:00"))
    return UncertainTrace(
        case,
        (
            UncertainEvent("e1", case, Certain("a"), Point(_ts("2021-03-01T09:00"))),
            UncertainEvent("e2", case, WeakDist({"b": 0.9, "c": 0.1}), overlap),
            UncertainEvent("e3", case, Certain("d"), overlap, Indeterminate(0.8)),
            UncertainEvent("e4", case, Certain("e"), Point(_ts("2021-03-01T13:00"))),
        ),
    )


def example_log() -> UncertainLog:
    return UncertainLog((credit_card_trace(), validation_trace()))


def fraud_investigation_net() -> PetriNet:
    """Reference model of the fraud investigation process (10 full traces).

    h|b, then c, then r; then either contact merchant (m) followed by a refund
    from the merchant (u), friendly fraud (f) or true fraud (t), or a fraud
    investigation (i) followed by f or t.  True fraud is always followed by a
    refund from the credit institute (v).
    """
    places = ("start", "p1", "p2", "p3", "merchant", "investigation", "fraud", "end")
    transitions = {
        "h": "h", "b": "b", "c": "c", "r": "r", "m": "m", "i": "i",
        "u": "u", "f_m": "f", "t_m": "t", "f_i": "f", "t_i": "t", "v": "v",
    }
    flow = [
        ("start", "h", "p1"), ("start", "b", "p1"),
        ("p1", "c", "p2"), ("p2", "r", "p3"),
        ("p3", "m", "merchant"), ("p3", "i", "investigation"),
        ("merchant", "u", "end"), ("merchant", "f_m", "end"), ("merchant", "t_m", "fraud"),
        ("investigation", "f_i", "end"), ("investigation", "t_i", "fraud"),
        ("fraud", "v", "end"),
    ]
    arcs = {}
    for src, t, dst in flow:
        arcs[(src, t)] = 1
        arcs[(t, dst)] = 1
    return PetriNet(places, transitions, arcs, {"start": 1}, {"end": 1})
