"""JSON documents for logs and nets, plus CSV and DOT exporters.

Log document::

    {"traces": [{"case": "5167", "events": [
        {"id": "e1", "activity": "h", "timestamp": "2020-10-05T23:00"},
        {"id": "e2", "activity": {"set": ["b", "c"]}, "timestamp": "2020-10-06"},
        {"id": "e5", "activity": {"dist": {"f": 0.3, "t": 0.7}},
         "timestamp": {"interval": ["2020-10-05T20:00", "2020-10-06T10:00"]},
         "indeterminate": {"prob": 0.2}}]}]}

Timestamps are ISO-8601 strings (UTC unless an offset is given) or numbers of
seconds since the epoch.  A bare date stands for the whole day.  Beside
``interval`` (strong) a timestamp may be ``{"uniform": [lo, hi]}`` or
``{"pieces": [{"from": lo, "to": hi, "coeffs": [...]}]}``, where ``coeffs`` are
ascending polynomial coefficients over the piece's normalized coordinate
``s`` in ``[0, 1]``.  ``"indeterminate": true`` is the strong "?" flag.

Net document::

    {"places": ["p0", "p1"], "transitions": [{"id": "t", "label": "a"}],
     "arcs": [["p0", "t"], ["t", "p1"]], "initial": {"p0": 1}, "final": {"p1": 1}}

A ``null`` label is a silent transition; an arc may carry a third element,
its weight.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
import warnings
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Any

from .behavior_net import BehaviorNet, SimulationReport
from .density import DensityPiece, PiecewiseDensity
from .errors import ParseError, ValidationError
from .model import (
    SILENT_LABEL,
    Certain,
    Determinate,
    Indeterminate,
    Point,
    StrongInterval,
    StrongSet,
    UncertainEvent,
    UncertainLog,
    UncertainTrace,
    WeakDensity,
    WeakDist,
    label_set,
    normalize_log,
)
from .partial_order import BehaviorGraph
from .petri import PetriNet
from .probability import RealizationDistribution

_DATE_ONLY = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DENSITY_TOL = 1e-6


class RenormalizationWarning(UserWarning):
    """An input distribution did not sum to one and was rescaled."""


# -- timestamps ----------------------------------------------------------------

def parse_time(value: Any, field: str) -> float | tuple[float, float]:
    """Seconds since the epoch; a bare date yields its ``(start, next day)`` pair."""
    if isinstance(value, bool):
        raise ParseError("expected a timestamp", field=field)
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ParseError("timestamp must be finite", field=field)
        return float(value)
    if not isinstance(value, str):
        raise ParseError("expected an ISO-8601 string or a number", field=field)
    text = value.strip()
    if _DATE_ONLY.match(text):
        try:
            day = date.fromisoformat(text)
        except ValueError as exc:
            raise ParseError(str(exc), field=field) from None
        start = datetime(day.year, day.month, day.day, tzinfo=timezone.utc)
        return start.timestamp(), (start + timedelta(days=1)).timestamp()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise ParseError(f"invalid ISO-8601 timestamp {value!r}", field=field) from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _point(value: Any, field: str) -> float:
    t = parse_time(value, field)
    if isinstance(t, tuple):
        raise ParseError("a date is an interval here; give a full timestamp", field=field)
    return t


def format_time(t: float) -> str | float:
    """ISO-8601 UTC string when it round-trips exactly, else the raw number."""
    try:
        dt = datetime.fromtimestamp(t, tz=timezone.utc)
    except (OverflowError, OSError, ValueError):
        return t
    text = dt.isoformat().replace("+00:00", "Z")
    return text if parse_time(text, "") == t else t


# -- log documents -------------------------------------------------------------

def _activity(value: Any, field: str):
    if isinstance(value, str):
        return Certain(value)
    if isinstance(value, dict) and set(value) == {"set"}:
        labels = value["set"]
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ParseError("'set' must be a list of labels", field=f"{field}.set")
        return StrongSet(frozenset(labels))
    if isinstance(value, dict) and set(value) == {"dist"}:
        pmf = value["dist"]
        if not isinstance(pmf, dict):
            raise ParseError("'dist' must map labels to probabilities", field=f"{field}.dist")
        for label, p in pmf.items():
            if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 < p <= 1.0:
                raise ValidationError(f"{field}.dist.{label}: probability must be in (0, 1], got {p!r}")
        dist = WeakDist(pmf)
        if dist.total != 1.0 and abs(dist.total - 1.0) > 1e-12:
            warnings.warn(
                f"{field}: activity probabilities sum to {dist.total:.9g}; renormalized",
                RenormalizationWarning,
                stacklevel=4,
            )
            dist = dist.renormalized()
        return dist
    raise ParseError("activity must be a label, {'set': [...]} or {'dist': {...}}", field=field)


def _timestamp(value: Any, field: str):
    if isinstance(value, (str, int, float)) and not isinstance(value, bool):
        t = parse_time(value, field)
        return StrongInterval(*t) if isinstance(t, tuple) else Point(t)
    if isinstance(value, dict) and len(value) == 1:
        (kind, body), = value.items()
        sub = f"{field}.{kind}"
        if kind in ("interval", "uniform"):
            if not isinstance(body, list) or len(body) != 2:
                raise ParseError(f"'{kind}' needs two endpoints", field=sub)
            lo, hi = _point(body[0], f"{sub}[0]"), _point(body[1], f"{sub}[1]")
            if lo > hi:
                raise ValidationError(f"{sub}: interval endpoints out of order")
            if kind == "interval":
                return StrongInterval(lo, hi)
            if lo == hi:
                return Point(lo)
            return WeakDensity(PiecewiseDensity.uniform(lo, hi))
        if kind == "pieces":
            if not isinstance(body, list) or not body:
                raise ParseError("'pieces' must be a non-empty list", field=sub)
            raw = []
            for i, piece in enumerate(body):
                pf = f"{sub}[{i}]"
                if not isinstance(piece, dict) or set(piece) != {"from", "to", "coeffs"}:
                    raise ParseError("a piece needs 'from', 'to' and 'coeffs'", field=pf)
                coeffs = piece["coeffs"]
                if not isinstance(coeffs, list) or not coeffs or not all(
                    isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs
                ):
                    raise ParseError("'coeffs' must be a non-empty list of numbers", field=f"{pf}.coeffs")
                raw.append((_point(piece["from"], f"{pf}.from"), _point(piece["to"], f"{pf}.to"), coeffs))
            try:
                mass = math.fsum(DensityPiece(lo, hi, tuple(c)).mass for lo, hi, c in raw)
                density = PiecewiseDensity.from_pieces(raw, tol=_DENSITY_TOL)
            except ValidationError as exc:
                raise ValidationError(f"{sub}: {exc}") from None
            if abs(mass - 1.0) > 1e-12:
                warnings.warn(
                    f"{sub}: density integrates to {mass:.9g}; renormalized",
                    RenormalizationWarning,
                    stacklevel=4,
                )
            return WeakDensity(density)
    raise ParseError(
        "timestamp must be a time, {'interval'|'uniform': [lo, hi]} or {'pieces': [...]}",
        field=field,
    )


def _indeterminacy(value: Any, field: str):
    if value is None or value is False:
        return Determinate()
    if value is True:
        return Indeterminate()
    if isinstance(value, dict) and set(value) == {"prob"}:
        p = value["prob"]
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 < p <= 1.0:
            raise ValidationError(f"{field}.prob: skip probability must be in (0, 1], got {p!r}")
        return Indeterminate(float(p))
    raise ParseError("indeterminate must be true, false or {'prob': p}", field=field)


def log_from_document(doc: Any, *, normalize: bool = True) -> UncertainLog:
    if not isinstance(doc, dict) or not isinstance(doc.get("traces"), list):
        raise ParseError("top level must be an object with a 'traces' list", field="traces")
    traces = []
    for i, tdoc in enumerate(doc["traces"]):
        tf = f"traces[{i}]"
        if not isinstance(tdoc, dict) or not isinstance(tdoc.get("events"), list):
            raise ParseError("a trace needs 'case' and an 'events' list", field=tf)
        case = tdoc.get("case")
        if not isinstance(case, (str, int)) or isinstance(case, bool):
            raise ParseError("case id must be a string", field=f"{tf}.case")
        case = str(case)
        events = []
        for j, edoc in enumerate(tdoc["events"]):
            ef = f"{tf}.events[{j}]"
            if not isinstance(edoc, dict):
                raise ParseError("an event must be an object", field=ef)
            unknown = set(edoc) - {"id", "activity", "timestamp", "indeterminate"}
            if unknown:
                raise ParseError(f"unknown keys {sorted(unknown)}", field=ef)
            for key in ("id", "activity", "timestamp"):
                if key not in edoc:
                    raise ParseError(f"missing '{key}'", field=ef)
            if not isinstance(edoc["id"], str) or not edoc["id"]:
                raise ParseError("event id must be a non-empty string", field=f"{ef}.id")
            try:
                events.append(
                    UncertainEvent(
                        edoc["id"],
                        case,
                        _activity(edoc["activity"], f"{ef}.activity"),
                        _timestamp(edoc["timestamp"], f"{ef}.timestamp"),
                        _indeterminacy(edoc.get("indeterminate"), f"{ef}.indeterminate"),
                    )
                )
            except ValidationError as exc:
                if str(exc).startswith(ef):
                    raise
                raise ValidationError(f"{ef}: {exc}") from None
        traces.append(UncertainTrace(case, tuple(events)))
    log = UncertainLog(tuple(traces))
    return normalize_log(log) if normalize else log


def loads_log(text: str, *, normalize: bool = True) -> UncertainLog:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return log_from_document(doc, normalize=normalize)


def parse_log(path: str | Path, *, normalize: bool = True) -> UncertainLog:
    """Read, validate and (by default) normalize an uncertain log document."""
    return loads_log(Path(path).read_text(encoding="utf-8"), normalize=normalize)


def _activity_doc(a):
    if isinstance(a, Certain):
        return a.label
    if isinstance(a, StrongSet):
        return {"set": sorted(a.labels)}
    return {"dist": a.as_dict()}


def _timestamp_doc(t):
    if isinstance(t, Point):
        return format_time(t.t)
    if isinstance(t, StrongInterval):
        return {"interval": [format_time(t.lo), format_time(t.hi)]}
    d = t.density
    if d.is_uniform():
        lo, hi = d.support
        return {"uniform": [format_time(lo), format_time(hi)]}
    return {
        "pieces": [
            {"from": format_time(p.lo), "to": format_time(p.hi), "coeffs": list(p.coeffs)}
            for p in d.pieces
        ]
    }


def log_to_document(log: UncertainLog) -> dict:
    traces = []
    for tr in log.traces:
        events = []
        for e in tr.events:
            edoc = {"id": e.id, "activity": _activity_doc(e.activity), "timestamp": _timestamp_doc(e.timestamp)}
            o = e.indeterminacy
            if isinstance(o, Indeterminate):
                edoc["indeterminate"] = True if o.p_skip is None else {"prob": o.p_skip}
            events.append(edoc)
        traces.append({"case": tr.case, "events": events})
    return {"traces": traces}


def dump_log(log: UncertainLog, path: str | Path) -> None:
    Path(path).write_text(json.dumps(log_to_document(log), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


# -- net documents ------------------------------------------------------------

def net_from_document(doc: Any) -> PetriNet:
    if not isinstance(doc, dict):
        raise ParseError("a net document must be an object")
    for key in ("places", "transitions", "arcs", "initial", "final"):
        if key not in doc:
            raise ParseError(f"missing '{key}'", field=key)
    if not isinstance(doc["places"], list) or not all(isinstance(p, str) for p in doc["places"]):
        raise ParseError("'places' must be a list of ids", field="places")
    transitions = {}
    for i, t in enumerate(doc["transitions"]):
        if not isinstance(t, dict) or not isinstance(t.get("id"), str) or "label" not in t:
            raise ParseError("a transition needs 'id' and 'label'", field=f"transitions[{i}]")
        label = t["label"]
        if label is not None and (not isinstance(label, str) or label == SILENT_LABEL):
            raise ParseError("label must be a string or null", field=f"transitions[{i}].label")
        if t["id"] in transitions:
            raise ValidationError(f"duplicate transition id {t['id']!r}")
        transitions[t["id"]] = label
    arcs: dict[tuple[str, str], int] = {}
    for i, arc in enumerate(doc["arcs"]):
        if not isinstance(arc, list) or len(arc) not in (2, 3):
            raise ParseError("an arc is [from, to] or [from, to, weight]", field=f"arcs[{i}]")
        weight = arc[2] if len(arc) == 3 else 1
        if not isinstance(weight, int) or isinstance(weight, bool):
            raise ParseError("arc weight must be an integer", field=f"arcs[{i}][2]")
        key = (arc[0], arc[1])
        arcs[key] = arcs.get(key, 0) + weight
    for key in ("initial", "final"):
        m = doc[key]
        if not isinstance(m, dict) or not all(isinstance(c, int) and not isinstance(c, bool) for c in m.values()):
            raise ParseError("a marking maps places to token counts", field=key)
    return PetriNet(tuple(doc["places"]), transitions, arcs, doc["initial"], doc["final"])


def loads_net(text: str) -> PetriNet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return net_from_document(doc)


def parse_net(path: str | Path) -> PetriNet:
    return loads_net(Path(path).read_text(encoding="utf-8"))


def net_to_document(net: PetriNet) -> dict:
    return {
        "places": list(net.places),
        "transitions": [{"id": t, "label": net.transitions[t]} for t in sorted(net.transitions)],
        "arcs": [[a, b] if w == 1 else [a, b, w] for (a, b), w in sorted(net.arcs.items())],
        "initial": dict(net.initial),
        "final": dict(net.final),
    }


# -- DOT -----------------------------------------------------------------------

def _q(text: str) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def graph_to_dot(graph: BehaviorGraph, trace: UncertainTrace | None = None) -> str:
    lines = ["digraph behavior_graph {", "  rankdir=LR;"]
    for n in graph.nodes:
        attrs = ""
        if trace is not None:
            e = trace[n]
            labels = ",".join(sorted(label_set(e)))
            style = ", style=dashed" if e.is_indeterminate else ""
            attrs = f" [label={_q(f'{n}: {labels}')}{style}]"
        lines.append(f"  {_q(n)}{attrs};")
    for u, v in sorted(graph.edges):
        lines.append(f"  {_q(u)} -> {_q(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def net_to_dot(net: PetriNet, weights: dict[str, float] | None = None) -> str:
    lines = ["digraph petri_net {", "  rankdir=LR;"]
    for p in net.places:
        tokens = net.initial.get(p, 0)
        label = "•" * tokens if tokens <= 3 else str(tokens)
        periph = ", peripheries=2" if p in net.final else ""
        lines.append(f"  {_q(p)} [shape=circle, label={_q(label)}, xlabel={_q(p)}{periph}];")
    for t in sorted(net.transitions):
        label = net.transitions[t]
        text = SILENT_LABEL if label is None else label
        if weights and t in weights:
            text += f"\n{weights[t]:.3g}"
        fill = ", style=filled, fillcolor=black, fontcolor=white" if label is None else ""
        lines.append(f"  {_q(t)} [shape=box, label={_q(text)}{fill}];")
    for (a, b), w in sorted(net.arcs.items()):
        extra = f" [label={_q(w)}]" if w != 1 else ""
        lines.append(f"  {_q(a)} -> {_q(b)}{extra};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def behavior_net_to_dot(bnet: BehaviorNet) -> str:
    return net_to_dot(bnet.net, bnet.weights or None)


# -- tables ----------------------------------------------------------------------

def format_sequence(seq) -> str:
    return "<" + ",".join(seq) + ">"


def distribution_to_document(dist: RealizationDistribution, case: str, precision: int = 6) -> dict:
    return {
        "case": case,
        "realizations": [
            {
                "sequence": list(sigma),
                "probability": round(p, precision),
                "enabled_by": [list(rho) for rho, _ in dist.provenance.get(sigma, [])],
            }
            for sigma, p in dist.sorted_items()
        ],
    }


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def distribution_to_csv(dists: dict[str, RealizationDistribution], precision: int = 6) -> str:
    rows = [["case", "sequence", "probability", "enabled_by"]]
    for case, dist in dists.items():
        for sigma, p in dist.sorted_items():
            enablers = " | ".join(",".join(rho) for rho, _ in dist.provenance.get(sigma, []))
            rows.append([case, ",".join(sigma), f"{p:.{precision}f}", enablers])
    return _csv(rows)


def runs_to_csv(report: SimulationReport) -> str:
    rows = [["run_index", "sequence"]]
    rows.extend([r, ",".join(seq)] for r, seq in report.runs())
    return _csv(rows)


def convergence_to_csv(report: SimulationReport, precision: int = 6) -> str:
    rows = [["run_index", "sequence", "frequency"]]
    for k, seq in enumerate(report.sequences):
        for c, f in zip(report.checkpoints.tolist(), report.running[k].tolist()):
            rows.append([c, ",".join(seq), f"{f:.{precision}f}"])
    return _csv(rows)

