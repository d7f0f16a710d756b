"""Behavior nets of uncertain traces and the two Monte Carlo samplers.

Random streams
--------------
Both samplers use numpy's PCG64 seeded through ``SeedSequence(seed,
spawn_key=(k,))`` with ``k = 0`` for :func:`simulate` and ``k = 1`` for
:func:`generative_sample`, so the two never share draws for the same seed.

* :func:`simulate` draws a row-major ``(n, n_events)`` uniform matrix: run ``r``
  consumes exactly the draws ``r * n_events ... (r + 1) * n_events - 1``, one
  per firing.  A run's outcome therefore depends only on ``(seed, r)``; a
  worker can reproduce run ``r`` alone with ``PCG64.advance(r * n_events)``.
* :func:`generative_sample` works in blocks of ``CHUNK`` runs.  Inside a block
  and for each event in id order it draws the timestamp column, the label
  column, the skip column and a tie-break column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import Deadlock
from .model import (
    SILENT_LABEL,
    Point,
    UncertainTrace,
    activity_pmf,
    label_set,
    skip_probability,
)
from .partial_order import BehaviorGraph, Realization, build_behavior_graph
from .petri import PetriNet

SOURCE = "start"
SINK = "end"
CHUNK = 1 << 18


@dataclass(frozen=True)
class BehaviorNet:
    net: PetriNet
    event_of: dict[str, tuple[str, str | None]]
    weights: dict[str, float] = field(default_factory=dict)

    def transitions_of(self, event_id: str) -> list[str]:
        return sorted(t for t, (e, _) in self.event_of.items() if e == event_id)

    @property
    def events(self) -> list[str]:
        return sorted({e for e, _ in self.event_of.values()})


def _place_name(u: str, v: str) -> str:
    return f"({u},{v})"


def transition_name(event_id: str, label: str | None) -> str:
    return f"({event_id},{SILENT_LABEL if label is None else label})"


def construct_behavior_net(trace: UncertainTrace, graph: BehaviorGraph | None = None) -> BehaviorNet:
    """Petri net whose full runs replay exactly the realizations of ``trace``.

    One place per behavior-graph edge, a start place in front of every minimal
    event and an end place behind every maximal event.  Each event gets one
    transition per possible label, plus a silent one when it is indeterminate;
    all of them share the event's input and output places.
    """
    graph = graph or build_behavior_graph(trace)
    minimal = graph.minimal()
    maximal = graph.maximal()
    places = (
        [_place_name(SOURCE, e) for e in minimal]
        + [_place_name(u, v) for u, v in sorted(graph.edges)]
        + [_place_name(e, SINK) for e in maximal]
    )
    transitions: dict[str, str | None] = {}
    event_of: dict[str, tuple[str, str | None]] = {}
    arcs: dict[tuple[str, str], int] = {}
    for eid in graph.nodes:
        e = trace[eid]
        inputs = [_place_name(u, eid) for u in graph.predecessors(eid)] or [_place_name(SOURCE, eid)]
        outputs = [_place_name(eid, v) for v in graph.successors(eid)] or [_place_name(eid, SINK)]
        labels: list[str | None] = sorted(label_set(e))
        if e.is_indeterminate:
            labels.append(None)
        for label in labels:
            t = transition_name(eid, label)
            transitions[t] = label
            event_of[t] = (eid, label)
            for p in inputs:
                arcs[(p, t)] = 1
            for p in outputs:
                arcs[(t, p)] = 1
    initial = {_place_name(SOURCE, e): 1 for e in minimal}
    final = {_place_name(e, SINK): 1 for e in maximal}
    net = PetriNet(tuple(places), transitions, arcs, initial, final)
    return BehaviorNet(net, event_of)


def assign_weights(bnet: BehaviorNet, trace: UncertainTrace) -> BehaviorNet:
    """Visible transitions weigh ``(1 - p_skip) * P(label)``, silent ones ``p_skip``."""
    weights = {}
    for t, (eid, label) in bnet.event_of.items():
        e = trace[eid]
        p_skip = skip_probability(e)
        if label is None:
            weights[t] = p_skip
        else:
            weights[t] = (1.0 - p_skip) * activity_pmf(e).get(label, 0.0)
    return BehaviorNet(bnet.net, bnet.event_of, weights)


def weight_sums(bnet: BehaviorNet) -> dict[str, float]:
    """Total transition weight per event (1 for every event of a weighted net)."""
    sums: dict[str, list[float]] = {}
    for t, (eid, _) in bnet.event_of.items():
        sums.setdefault(eid, []).append(bnet.weights[t])
    return {eid: math.fsum(ws) for eid, ws in sums.items()}


def behavior_net_for(trace: UncertainTrace) -> BehaviorNet:
    return assign_weights(construct_behavior_net(trace), trace)


# -- reports -----------------------------------------------------------------

@dataclass
class SimulationReport:
    """Outcome of ``n_runs`` sampled runs.

    ``sequences`` lists the distinct realizations, ``run_codes[r]`` indexes the
    realization of run ``r``.  ``checkpoints`` are 1-based run counts at which
    ``running[k]`` holds the running frequency of ``sequences[k]``.
    """

    n_runs: int
    seed: int
    sequences: list[Realization]
    counts: np.ndarray
    run_codes: np.ndarray
    checkpoints: np.ndarray
    running: np.ndarray = field(repr=False)

    @property
    def frequencies(self) -> dict[Realization, float]:
        return {s: c / self.n_runs for s, c in zip(self.sequences, self.counts.tolist())}

    def frequency(self, sigma: Sequence[str]) -> float:
        return self.frequencies.get(tuple(sigma), 0.0)

    def convergence(self, sigma: Sequence[str]) -> list[tuple[int, float]]:
        sigma = tuple(sigma)
        if sigma not in self.sequences:
            return [(int(c), 0.0) for c in self.checkpoints]
        k = self.sequences.index(sigma)
        return list(zip(self.checkpoints.tolist(), self.running[k].tolist()))

    def runs(self) -> Iterator[tuple[int, Realization]]:
        for r, code in enumerate(self.run_codes.tolist()):
            yield r, self.sequences[code]


def _checkpoints(n: int, count: int | None) -> np.ndarray:
    count = min(n, 1000 if count is None else count)
    pts = np.unique(np.linspace(1, n, count).round().astype(np.int64))
    return pts


def _unique_rows(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct rows of a code matrix and each row's index among them.

    Rows are packed into one integer when that cannot overflow, which is far
    faster than a row-wise unique.
    """
    base = int(block.max(initial=-1)) + 2
    width = block.shape[1]
    if width == 0:
        return np.zeros((1, 0), dtype=block.dtype), np.zeros(len(block), dtype=np.int64)
    if width * math.log2(base) < 62:
        weights = base ** np.arange(width, dtype=np.int64)
        keys = (block + 1) @ weights
        _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        return block[first], inverse.reshape(-1)
    uniq, inverse = np.unique(block, axis=0, return_inverse=True)
    return uniq, inverse.reshape(-1)


def _report(
    rows: list[np.ndarray], n: int, seed: int, n_checkpoints: int | None, decode
) -> SimulationReport:
    """Aggregate per-chunk code matrices (one row per run, -1 padded)."""
    index: dict[tuple[int, ...], int] = {}
    run_codes = np.empty(n, dtype=np.int64)
    offset = 0
    for block in rows:
        uniq, inverse = _unique_rows(block)
        mapping = np.empty(len(uniq), dtype=np.int64)
        for i, row in enumerate(uniq.tolist()):
            key = tuple(x for x in row if x >= 0)
            mapping[i] = index.setdefault(key, len(index))
        run_codes[offset:offset + len(block)] = mapping[inverse]
        offset += len(block)
    keys = list(index)
    decoded = [decode(k) for k in keys]
    # Present realizations in sorted order.
    order = sorted(range(len(keys)), key=lambda i: decoded[i])
    remap = np.empty(len(keys), dtype=np.int64)
    remap[order] = np.arange(len(keys))
    run_codes = remap[run_codes]
    sequences = [decoded[i] for i in order]
    counts = np.bincount(run_codes, minlength=len(sequences))

    checkpoints = _checkpoints(n, n_checkpoints)
    by_code = np.argsort(run_codes, kind="stable")
    starts = np.concatenate(([0], np.cumsum(counts)))
    running = np.empty((len(sequences), len(checkpoints)))
    for k in range(len(sequences)):
        positions = by_code[starts[k]:starts[k + 1]]
        running[k] = np.searchsorted(positions, checkpoints - 1, side="right") / checkpoints
    return SimulationReport(n, seed, sequences, counts, run_codes, checkpoints, running)


def _generator(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


# -- behavior net simulation ---------------------------------------------------

def simulate(
    bnet: BehaviorNet, n: int, seed: int = 0, *, checkpoints: int | None = None
) -> SimulationReport:
    """Play ``n`` runs of the weighted behavior net.

    At each step one enabled transition fires, chosen with probability
    proportional to its weight.  Every run fires exactly one transition per
    event.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not bnet.weights:
        raise ValueError("behavior net has no weights; call assign_weights first")
    net = bnet.net
    places = list(net.places)
    pidx = {p: i for i, p in enumerate(places)}
    tids = sorted(net.transitions)
    pre = np.zeros((len(tids), len(places)), dtype=np.int64)
    post = np.zeros_like(pre)
    for k, t in enumerate(tids):
        for p, w in net.preset(t).items():
            pre[k, pidx[p]] = w
        for p, w in net.postset(t).items():
            post[k, pidx[p]] = w
    weights = np.array([bnet.weights[t] for t in tids])
    labels = sorted({lab for lab in net.transitions.values() if lab is not None})
    lcode = {lab: i for i, lab in enumerate(labels)}
    tcode = np.array([-1 if net.transitions[t] is None else lcode[net.transitions[t]] for t in tids])
    final = np.zeros(len(places), dtype=np.int64)
    for p, c in net.final.items():
        final[pidx[p]] = c
    initial = np.zeros(len(places), dtype=np.int64)
    for p, c in net.initial.items():
        initial[pidx[p]] = c

    steps = len(bnet.events)
    u = _generator(seed, 0).random((n, steps))
    marking = np.tile(initial, (n, 1))
    codes = np.full((n, steps), -1, dtype=np.int64)
    for s in range(steps):
        enabled = np.all(marking[:, None, :] >= pre[None, :, :], axis=2)
        w = enabled * weights
        total = w.sum(axis=1)
        stuck = total <= 0
        if stuck.any():
            r = int(np.flatnonzero(stuck)[0])
            raise Deadlock(f"run {r} has no enabled transition after {s} steps")
        cum = np.cumsum(w, axis=1)
        choice = np.sum(cum < (u[:, s] * total)[:, None], axis=1)
        choice = np.minimum(choice, len(tids) - 1)
        # Guard against landing on a zero-weight column through rounding.
        while True:
            bad = w[np.arange(n), choice] <= 0
            if not bad.any():
                break
            choice[bad] -= 1
        marking += post[choice] - pre[choice]
        codes[:, s] = tcode[choice]
    if np.any(np.any(marking != final[None, :], axis=1)):
        raise Deadlock("some runs did not reach the final marking")

    def decode(key):
        return tuple(labels[i] for i in key)

    return _report([codes], n, seed, checkpoints, decode)


# -- generative oracle ---------------------------------------------------------

def generative_sample(
    trace: UncertainTrace, n: int, seed: int = 0, *, checkpoints: int | None = None
) -> SimulationReport:
    """Sample realizations straight from the uncertainty model.

    Each run draws every timestamp from its density, every label from its
    distribution and every occurrence from its skip probability, then emits the
    labels of the occurring events sorted by sampled time.  Equal sampled times
    are ordered uniformly at random.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    events = sorted(trace.events, key=lambda e: e.id)
    labels = sorted({lab for e in events for lab in label_set(e)})
    lcode = {lab: i for i, lab in enumerate(labels)}
    pmfs = []
    for e in events:
        pmf = activity_pmf(e)
        names = sorted(pmf)
        probs = np.array([pmf[x] for x in names])
        pmfs.append((np.array([lcode[x] for x in names]), np.cumsum(probs) / probs.sum()))
    skips = [skip_probability(e) for e in events]

    rng = _generator(seed, 1)
    blocks = []
    done = 0
    k = len(events)
    while done < n:
        m = min(CHUNK, n - done)
        times = np.empty((m, k))
        codes = np.empty((m, k), dtype=np.int64)
        tiebreak = np.empty((m, k))
        for j, e in enumerate(events):
            ts = e.timestamp
            if isinstance(ts, Point):
                times[:, j] = ts.t
            else:
                times[:, j] = ts.density.sample(rng, m)
            lab_codes, cum = pmfs[j]
            pick = np.minimum(np.searchsorted(cum, rng.random(m), side="right"), len(cum) - 1)
            codes[:, j] = lab_codes[pick]
            skipped = rng.random(m) < skips[j]
            codes[skipped, j] = -1
            tiebreak[:, j] = rng.random(m)
        order = np.lexsort((tiebreak, times), axis=1)
        ordered = np.take_along_axis(codes, order, axis=1)
        blocks.append(ordered)
        done += m

    def decode(key):
        return tuple(labels[i] for i in key)

    return _report(blocks, n, seed, checkpoints, decode)
