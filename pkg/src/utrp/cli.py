"""Command-line interface: ``utrp <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import io as uio
from .behavior_net import behavior_net_for, generative_sample, simulate
from .errors import UtrpError
from .model import UncertainLog, UncertainTrace
from .partial_order import build_behavior_graph, default_cap
from .petri import expected_conformance
from .probability import realization_distribution
from .svg import convergence_svg


def _fmt(p: float, precision: int) -> str:
    return f"{p:.{precision}f}"


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def _seq(seq) -> str:
    return uio.format_sequence(seq)


def _select(log: UncertainLog, case: str | None) -> list[UncertainTrace]:
    if case is None:
        return sorted(log.traces, key=lambda t: t.case)
    try:
        return [log.trace(case)]
    except KeyError:
        raise UtrpError(f"no case {case!r} in log") from None


def _single(log: UncertainLog, case: str | None) -> UncertainTrace:
    traces = _select(log, case)
    if len(traces) != 1:
        raise UtrpError("the log has several cases; choose one with --case")
    return traces[0]


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# -- commands ------------------------------------------------------------------

def cmd_realizations(args) -> None:
    log = uio.parse_log(args.log)
    dists = {
        tr.case: realization_distribution(tr, cap=args.cap) for tr in _select(log, args.case)
    }
    if args.format == "json":
        doc = [uio.distribution_to_document(d, case, args.precision) for case, d in dists.items()]
        _write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", None)
    elif args.format == "csv":
        _write(uio.distribution_to_csv(dists, args.precision), None)
    else:
        for case, d in dists.items():
            rows = [
                [_seq(s), _fmt(p, args.precision), " ".join(_seq(r) for r, _ in d.provenance[s])]
                for s, p in d.sorted_items()
            ]
            print(f"case {case}: {len(d)} realizations")
            sys.stdout.write(_table(["realization", "probability", "enabled by"], rows))


def cmd_order_realizations(args) -> None:
    tr = _single(uio.parse_log(args.log), args.case)
    dist = realization_distribution(tr, cap=args.cap)
    if args.format == "json":
        doc = {
            "case": tr.case,
            "order_realizations": [
                {"events": list(rho), "integral": round(op.integral, args.precision),
                 "probability": round(op.probability, args.precision)}
                for rho, op in dist.by_order.items()
            ],
        }
        _write(json.dumps(doc, indent=2) + "\n", None)
        return
    rows = [[_seq(rho), _fmt(op.integral, args.precision), _fmt(op.probability, args.precision)]
            for rho, op in dist.by_order.items()]
    if args.format == "csv":
        _write(uio._csv([["order_realization", "integral", "probability"]] + rows), None)
    else:
        sys.stdout.write(_table(["order-realization", "I", "P_O"], rows))


def cmd_behavior_graph(args) -> None:
    tr = _single(uio.parse_log(args.log), args.case)
    graph = build_behavior_graph(tr)
    if args.dot:
        text = uio.graph_to_dot(graph, tr)
    else:
        text = json.dumps({"nodes": list(graph.nodes), "edges": [list(e) for e in sorted(graph.edges)]}, indent=2) + "\n"
    _write(text, args.out)


def cmd_behavior_net(args) -> None:
    tr = _single(uio.parse_log(args.log), args.case)
    bnet = behavior_net_for(tr)
    if args.dot:
        text = uio.behavior_net_to_dot(bnet)
    else:
        doc = uio.net_to_document(bnet.net)
        doc["weights"] = dict(sorted(bnet.weights.items()))
        text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    _write(text, args.out)


def cmd_expected_conformance(args) -> None:
    log = uio.parse_log(args.log)
    net = uio.parse_net(args.model)
    reports = {}
    for tr in _select(log, args.case):
        reports[tr.case] = expected_conformance(realization_distribution(tr, cap=args.cap), net)
    if args.format == "json":
        doc = [
            {
                "case": case,
                "expected": round(r.expected, args.precision),
                "min": r.minimum,
                "max": r.maximum,
                "unweighted_mean": round(r.unweighted_mean, args.precision),
                "realizations": [
                    {"sequence": list(s), "probability": round(r.probabilities[s], args.precision), "cost": r.costs[s]}
                    for s in r.costs
                ],
            }
            for case, r in reports.items()
        ]
        _write(json.dumps(doc, indent=2) + "\n", None)
        return
    if args.format == "csv":
        rows = [["case", "sequence", "probability", "cost"]]
        for case, r in reports.items():
            rows += [[case, ",".join(s), _fmt(r.probabilities[s], args.precision), f"{r.costs[s]:g}"] for s in r.costs]
        _write(uio._csv(rows), None)
        return
    for case, r in reports.items():
        rows = [[_seq(s), _fmt(r.probabilities[s], args.precision), f"{r.costs[s]:g}"] for s in r.costs]
        sys.stdout.write(_table(["realization", "probability", "conf"], rows))
        print(
            f"case {case}: expected {_fmt(r.expected, args.precision)}  min {r.minimum:g}  "
            f"max {r.maximum:g}  unweighted mean {_fmt(r.unweighted_mean, args.precision)}"
        )


def cmd_simulate(args) -> None:
    tr = _single(uio.parse_log(args.log), args.case)
    report = simulate(behavior_net_for(tr), args.n, args.seed)
    analytic = realization_distribution(tr, cap=args.cap).by_sequence
    if args.convergence:
        Path(args.convergence).write_text(uio.convergence_to_csv(report, args.precision), encoding="utf-8")
    if args.runs:
        Path(args.runs).write_text(uio.runs_to_csv(report), encoding="utf-8")
    if args.svg:
        Path(args.svg).write_text(convergence_svg(report, analytic), encoding="utf-8")
    freqs = report.frequencies
    if args.format == "json":
        doc = {"case": tr.case, "n": args.n, "seed": args.seed,
               "frequencies": [{"sequence": list(s), "frequency": f} for s, f in freqs.items()]}
        _write(json.dumps(doc, indent=2) + "\n", None)
        return
    rows = [[_seq(s), _fmt(freqs.get(s, 0.0), args.precision), _fmt(analytic.get(s, 0.0), args.precision)]
            for s in sorted(set(freqs) | set(analytic))]
    if args.format == "csv":
        _write(uio._csv([["sequence", "frequency", "analytic"]] + [[r[0][1:-1], r[1], r[2]] for r in rows]), None)
    else:
        print(f"case {tr.case}: {args.n} runs, seed {args.seed}")
        sys.stdout.write(_table(["realization", "frequency", "analytic"], rows))


def cmd_validate(args) -> None:
    tr = _single(uio.parse_log(args.log), args.case)
    analytic = realization_distribution(tr, cap=args.cap).by_sequence
    net_freq = simulate(behavior_net_for(tr), args.n, args.seed).frequencies
    gen_freq = generative_sample(tr, args.n, args.seed).frequencies
    seqs = sorted(set(analytic) | set(net_freq) | set(gen_freq))
    dev_net = max(abs(analytic.get(s, 0.0) - net_freq.get(s, 0.0)) for s in seqs)
    dev_gen = max(abs(analytic.get(s, 0.0) - gen_freq.get(s, 0.0)) for s in seqs)
    if args.format == "json":
        doc = {
            "case": tr.case, "n": args.n, "seed": args.seed,
            "rows": [{"sequence": list(s), "analytic": analytic.get(s, 0.0),
                      "behavior_net": net_freq.get(s, 0.0), "generative": gen_freq.get(s, 0.0)} for s in seqs],
            "max_deviation_behavior_net": dev_net,
            "max_deviation_generative": dev_gen,
        }
        _write(json.dumps(doc, indent=2) + "\n", None)
        return
    p = args.precision
    rows = [[_seq(s), _fmt(analytic.get(s, 0.0), p), _fmt(net_freq.get(s, 0.0), p), _fmt(gen_freq.get(s, 0.0), p)]
            for s in seqs]
    if args.format == "csv":
        _write(uio._csv([["sequence", "analytic", "behavior_net", "generative"]] + [[r[0][1:-1]] + r[1:] for r in rows]), None)
        return
    print(f"case {tr.case}: {args.n} runs, seed {args.seed}")
    sys.stdout.write(_table(["realization", "analytic", "behavior net", "generative"], rows))
    print(f"max |analytic - behavior net| = {_fmt(dev_net, p)}")
    print(f"max |analytic - generative|   = {_fmt(dev_gen, p)}")


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="utrp", description="Realization probabilities and conformance of uncertain process traces."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, case_required=False):
        p.add_argument("log", help="uncertain log (JSON)")
        p.add_argument("--case", required=case_required, help="case id (default: all, or the only one)")
        p.add_argument("--cap", type=int, default=default_cap(), help="enumeration cap (env UTRP_CAP)")
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--precision", type=int, default=6, help="decimal places for probabilities")

    p = sub.add_parser("realizations", help="probability of every realization")
    common(p)
    p.set_defaults(func=cmd_realizations)

    p = sub.add_parser("order-realizations", help="order-realizations with ordering and occurrence probabilities")
    common(p)
    p.set_defaults(func=cmd_order_realizations)

    for name, func in (("behavior-graph", cmd_behavior_graph), ("behavior-net", cmd_behavior_net)):
        p = sub.add_parser(name, help=f"export the {name.replace('-', ' ')}")
        common(p)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--dot", action="store_true", help="write Graphviz DOT instead of JSON")
        p.set_defaults(func=func)

    p = sub.add_parser("expected-conformance", help="probability-weighted alignment cost")
    common(p)
    p.add_argument("model", help="reference Petri net (JSON)")
    p.set_defaults(func=cmd_expected_conformance)

    p = sub.add_parser("simulate", help="Monte Carlo simulation of the behavior net")
    common(p)
    p.add_argument("-n", type=int, default=1000, help="number of runs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--convergence", help="write running frequencies as CSV")
    p.add_argument("--runs", help="write per-run sequences as CSV")
    p.add_argument("--svg", help="write running-frequency plot as SVG")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="analytic vs behavior-net vs generative Monte Carlo")
    common(p)
    p.add_argument("-n", type=int, default=100_000, help="number of runs per sampler")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", uio.RenormalizationWarning)
            args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except (UtrpError, OSError, KeyError) as exc:
        if args.format == "json":
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
