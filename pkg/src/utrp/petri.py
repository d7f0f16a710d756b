"""Place/transition nets, optimal alignments and expected conformance.

Alignment costs are the standard unit costs: a log move or a visible model
move costs 1, synchronous moves and silent model moves are free.  The optimum
is found by uniform-cost search over the synchronous product of the trace and
the net.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import NotEnabled, Unalignable, ValidationError

SILENT = None

Marking = dict[str, int]


@dataclass(frozen=True)
class PetriNet:
    """A labelled P/T net with initial and final markings.

    ``transitions`` maps transition ids to labels (``None`` for silent).
    ``arcs`` maps ``(source, target)`` pairs to arc weights.
    """

    places: tuple[str, ...]
    transitions: Mapping[str, str | None]
    arcs: Mapping[tuple[str, str], int]
    initial: Mapping[str, int]
    final: Mapping[str, int]
    _pre: dict = field(init=False, repr=False, compare=False)
    _post: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        places = tuple(self.places)
        transitions = dict(self.transitions)
        if isinstance(self.arcs, Mapping):
            arcs = {tuple(k): int(v) for k, v in self.arcs.items()}
        else:
            arcs = dict(Counter(tuple(a) for a in self.arcs))
        initial = {p: int(c) for p, c in self.initial.items() if c}
        final = {p: int(c) for p, c in self.final.items() if c}
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "final", final)

        place_set = set(places)
        if len(place_set) != len(places):
            raise ValidationError("duplicate place ids")
        if place_set & set(transitions):
            raise ValidationError("places and transitions must have distinct ids")
        pre: dict[str, dict[str, int]] = {t: {} for t in transitions}
        post: dict[str, dict[str, int]] = {t: {} for t in transitions}
        for (src, dst), w in arcs.items():
            if w < 1:
                raise ValidationError(f"arc {src}->{dst} has non-positive weight {w}")
            if src in place_set and dst in transitions:
                pre[dst][src] = w
            elif src in transitions and dst in place_set:
                post[src][dst] = w
            else:
                raise ValidationError(f"arc {src}->{dst} must connect a place and a transition")
        for t in transitions:
            if not pre[t] or not post[t]:
                raise ValidationError(f"transition {t} needs at least one input and one output arc")
        for name, marking in (("initial", initial), ("final", final)):
            if not marking:
                raise ValidationError(f"{name} marking must be non-empty")
            unknown = set(marking) - place_set
            if unknown or any(c < 0 for c in marking.values()):
                raise ValidationError(f"{name} marking refers to unknown places {sorted(unknown)}")
        object.__setattr__(self, "_pre", pre)
        object.__setattr__(self, "_post", post)

    def __hash__(self):
        return hash((self.places, tuple(sorted(self.transitions.items(), key=str))))

    def label(self, transition: str) -> str | None:
        return self.transitions[transition]

    def preset(self, transition: str) -> dict[str, int]:
        return dict(self._pre[transition])

    def postset(self, transition: str) -> dict[str, int]:
        return dict(self._post[transition])

    def relabel(self, place_map: Mapping[str, str], transition_map: Mapping[str, str]) -> PetriNet:
        """Copy with renamed places and transitions (labels unchanged)."""
        def node(n):
            return place_map.get(n, transition_map.get(n, n))

        return PetriNet(
            tuple(place_map.get(p, p) for p in self.places),
            {transition_map.get(t, t): lab for t, lab in self.transitions.items()},
            {(node(a), node(b)): w for (a, b), w in self.arcs.items()},
            {place_map.get(p, p): c for p, c in self.initial.items()},
            {place_map.get(p, p): c for p, c in self.final.items()},
        )


def is_enabled(net: PetriNet, marking: Mapping[str, int], transition: str) -> bool:
    return all(marking.get(p, 0) >= w for p, w in net._pre[transition].items())


def enabled_transitions(net: PetriNet, marking: Mapping[str, int]) -> list[str]:
    return sorted(t for t in net.transitions if is_enabled(net, marking, t))


def fire(net: PetriNet, marking: Mapping[str, int], transition: str) -> Marking:
    if transition not in net.transitions:
        raise KeyError(transition)
    if not is_enabled(net, marking, transition):
        raise NotEnabled(f"transition {transition} is not enabled in {dict(marking)}")
    out = Counter(marking)
    out.subtract(net._pre[transition])
    out.update(net._post[transition])
    return {p: c for p, c in out.items() if c}


# -- vector view used by the searches ----------------------------------------

class _Compiled:
    """Markings as tuples indexed by place; transitions with pre/delta vectors."""

    def __init__(self, net: PetriNet):
        self.net = net
        self.index = {p: i for i, p in enumerate(net.places)}
        n = len(net.places)
        self.transitions = []
        for t in sorted(net.transitions):
            pre = [(self.index[p], w) for p, w in net._pre[t].items()]
            delta = [0] * n
            for p, w in net._pre[t].items():
                delta[self.index[p]] -= w
            for p, w in net._post[t].items():
                delta[self.index[p]] += w
            self.transitions.append((t, net.transitions[t], pre, tuple(delta)))
        self.initial = self.vector(net.initial)
        self.final = self.vector(net.final)

    def vector(self, marking: Mapping[str, int]) -> tuple[int, ...]:
        v = [0] * len(self.index)
        for p, c in marking.items():
            v[self.index[p]] = c
        return tuple(v)

    def successors(self, m: tuple[int, ...]):
        for t, label, pre, delta in self.transitions:
            if all(m[i] >= w for i, w in pre):
                yield t, label, tuple(a + d for a, d in zip(m, delta))


def full_run_language(net: PetriNet) -> set[tuple[str, ...]]:
    """Visible label sequences of all runs from the initial to the final marking.

    Explores the reachability graph exhaustively; raises ValueError when the
    graph has a cycle (the language could then be infinite).
    """
    c = _Compiled(net)
    memo: dict[tuple[int, ...], frozenset[tuple[str, ...]]] = {}
    on_stack: set[tuple[int, ...]] = set()

    def suffixes(m: tuple[int, ...]) -> frozenset[tuple[str, ...]]:
        if m in memo:
            return memo[m]
        if m in on_stack:
            raise ValueError("reachability graph has a cycle")
        on_stack.add(m)
        out: set[tuple[str, ...]] = set()
        if m == c.final:
            out.add(())
        for _, label, m2 in c.successors(m):
            head = () if label is None else (label,)
            out.update(head + s for s in suffixes(m2))
        on_stack.discard(m)
        memo[m] = frozenset(out)
        return memo[m]

    return set(suffixes(c.initial))


# -- alignments --------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    """One alignment step: a log label, a model transition, or both (synchronous)."""

    log: str | None
    transition: str | None
    label: str | None = None

    @property
    def kind(self) -> str:
        if self.transition is None:
            return "log"
        if self.log is None:
            return "model"
        return "sync"


@dataclass(frozen=True)
class Alignment:
    moves: tuple[Move, ...]
    cost: float

    def log_projection(self) -> tuple[str, ...]:
        return tuple(m.log for m in self.moves if m.log is not None)

    def model_projection(self) -> tuple[str, ...]:
        return tuple(m.transition for m in self.moves if m.transition is not None)


def optimal_alignment(
    sigma: Sequence[str], net: PetriNet, *, max_states: int = 1_000_000
) -> Alignment:
    """Cheapest alignment of ``sigma`` with a full run of ``net``."""
    sigma = tuple(sigma)
    c = _Compiled(net)
    start = (c.initial, 0)
    counter = itertools.count()
    queue = [(0, next(counter), start)]
    best = {start: 0}
    parent: dict = {start: None}
    closed = set()
    while queue:
        cost, _, state = heapq.heappop(queue)
        if state in closed:
            continue
        closed.add(state)
        m, pos = state
        if pos == len(sigma) and m == c.final:
            return Alignment(_unwind(parent, state), float(cost))
        if len(closed) > max_states:
            raise Unalignable(f"search exceeded {max_states} states")
        steps = []
        if pos < len(sigma):
            steps.append(((m, pos + 1), 1, Move(sigma[pos], None, sigma[pos])))
        for t, label, m2 in c.successors(m):
            if label is None:
                steps.append(((m2, pos), 0, Move(None, t, None)))
            else:
                steps.append(((m2, pos), 1, Move(None, t, label)))
                if pos < len(sigma) and sigma[pos] == label:
                    steps.append(((m2, pos + 1), 0, Move(label, t, label)))
        for nxt, step_cost, move in steps:
            new = cost + step_cost
            if nxt not in closed and new < best.get(nxt, math.inf):
                best[nxt] = new
                parent[nxt] = (state, move)
                heapq.heappush(queue, (new, next(counter), nxt))
    raise Unalignable("the final marking is not reachable")


def _unwind(parent, state) -> tuple[Move, ...]:
    moves = []
    while parent[state] is not None:
        state, move = parent[state]
        moves.append(move)
    return tuple(reversed(moves))


def optimal_alignment_cost(sigma: Sequence[str], net: PetriNet, **kwargs) -> float:
    return optimal_alignment(sigma, net, **kwargs).cost


# -- expected conformance ----------------------------------------------------

@dataclass(frozen=True)
class ConformanceReport:
    expected: float
    minimum: float
    maximum: float
    unweighted_mean: float
    costs: dict[tuple[str, ...], float]
    probabilities: dict[tuple[str, ...], float]


def summarize_conformance(
    probabilities: Mapping[Sequence[str], float], costs: Mapping[Sequence[str], float]
) -> ConformanceReport:
    """Probability-weighted mean of ``costs`` plus min, max and plain mean."""
    probs = {tuple(s): float(p) for s, p in probabilities.items()}
    cost_map = {tuple(s): float(v) for s, v in costs.items()}
    missing = set(probs) - set(cost_map)
    if missing:
        raise KeyError(f"no cost for {sorted(missing)[:3]}")
    if not probs:
        raise ValueError("empty distribution")
    keys = sorted(probs)
    values = [cost_map[k] for k in keys]
    return ConformanceReport(
        expected=math.fsum(probs[k] * cost_map[k] for k in keys),
        minimum=min(values),
        maximum=max(values),
        unweighted_mean=math.fsum(values) / len(values),
        costs={k: cost_map[k] for k in keys},
        probabilities={k: probs[k] for k in keys},
    )


def expected_conformance(dist, net: PetriNet, **kwargs) -> ConformanceReport:
    """Expected alignment cost of a realization distribution against ``net``.

    ``dist`` is a :class:`~utrp.probability.RealizationDistribution` or any
    mapping from label sequences to probabilities.
    """
    probs = getattr(dist, "by_sequence", dist)
    costs = {tuple(s): optimal_alignment_cost(s, net, **kwargs) for s in probs}
    return summarize_conformance(probs, costs)


def trivial_cost_bound(sigma: Sequence[str], net: PetriNet) -> float:
    """Cost of aligning ``sigma`` by log moves only plus the cheapest full run."""
    return len(sigma) + optimal_alignment_cost((), net)

