"""Timestamp partial order, behavior graphs and realization enumeration.

Event ``u`` precedes ``v`` when the latest possible time of ``u`` is strictly
before the earliest possible time of ``v``.  The behavior graph keeps only the
transitive reduction of that relation.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable

from .errors import CapExceeded
from .model import UncertainEvent, UncertainTrace, label_set, time_bounds

OrderRealization = tuple[str, ...]
Realization = tuple[str, ...]

DEFAULT_CAP = 1_000_000


def default_cap() -> int:
    """Enumeration cap, overridable through the ``UTRP_CAP`` environment variable."""
    value = os.environ.get("UTRP_CAP")
    return int(value) if value else DEFAULT_CAP


def precedes(u: UncertainEvent, v: UncertainEvent) -> bool:
    return time_bounds(u)[1] < time_bounds(v)[0]


@dataclass(frozen=True)
class BehaviorGraph:
    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def successors(self, node: str) -> list[str]:
        return sorted(v for u, v in self.edges if u == node)

    def predecessors(self, node: str) -> list[str]:
        return sorted(u for u, v in self.edges if v == node)

    def minimal(self) -> list[str]:
        targets = {v for _, v in self.edges}
        return [n for n in self.nodes if n not in targets]

    def maximal(self) -> list[str]:
        sources = {u for u, _ in self.edges}
        return [n for n in self.nodes if n not in sources]

    def closure(self) -> dict[str, frozenset[str]]:
        """Map each node to every node it (transitively) precedes."""
        succ = {n: self.successors(n) for n in self.nodes}
        memo: dict[str, frozenset[str]] = {}

        def reach(n: str) -> frozenset[str]:
            if n not in memo:
                out: set[str] = set()
                for m in succ[n]:
                    out.add(m)
                    out |= reach(m)
                memo[n] = frozenset(out)
            return memo[n]

        return {n: reach(n) for n in self.nodes}


def build_behavior_graph(trace: UncertainTrace) -> BehaviorGraph:
    events = sorted(trace.events, key=lambda e: e.id)
    ids = [e.id for e in events]
    before = {
        u.id: {v.id for v in events if v is not u and precedes(u, v)} for u in events
    }
    edges = set()
    for u in ids:
        for v in before[u]:
            if not any(v in before[w] for w in before[u]):
                edges.add((u, v))
    return BehaviorGraph(tuple(ids), frozenset(edges))


def _linear_extensions(nodes: list[str], after: dict[str, frozenset[str]]) -> Iterable[tuple[str, ...]]:
    """Yield the linear extensions of ``nodes`` in lexicographic order.

    ``after[u]`` holds the nodes that must come after ``u``; only its
    intersection with ``nodes`` matters.
    """
    node_set = set(nodes)
    indegree = {n: 0 for n in nodes}
    for u in nodes:
        for v in after[u] & node_set:
            indegree[v] += 1
    order: list[str] = []
    ordered = sorted(nodes)

    def backtrack():
        if len(order) == len(ordered):
            yield tuple(order)
            return
        for n in ordered:
            if indegree[n] == 0:
                indegree[n] = -1
                order.append(n)
                released = after[n] & node_set
                for v in released:
                    indegree[v] -= 1
                yield from backtrack()
                for v in released:
                    indegree[v] += 1
                order.pop()
                indegree[n] = 0

    yield from backtrack()


def enumerate_order_realizations(
    trace: UncertainTrace,
    graph: BehaviorGraph | None = None,
    cap: int | None = None,
) -> list[OrderRealization]:
    """All order-realizations, sorted lexicographically by event-id sequence.

    For every subset of indeterminate events, each linear extension of the
    precedence order over the determinate events plus that subset.
    """
    cap = default_cap() if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be >= 1")
    graph = graph or build_behavior_graph(trace)
    after = graph.closure()
    determinate = sorted(e.id for e in trace.events if not e.is_indeterminate)
    optional = sorted(e.id for e in trace.events if e.is_indeterminate)
    out: list[OrderRealization] = []
    for r in range(len(optional) + 1):
        for subset in itertools.combinations(optional, r):
            for ext in _linear_extensions(determinate + list(subset), after):
                out.append(ext)
                if len(out) > cap:
                    raise CapExceeded("order-realizations", cap)
    out.sort()
    return out


def is_order_realization(rho: Iterable[str], trace: UncertainTrace) -> bool:
    rho = tuple(rho)
    if len(set(rho)) != len(rho) or any(eid not in trace.ids for eid in rho):
        return False
    if any(not e.is_indeterminate and e.id not in rho for e in trace.events):
        return False
    return not any(
        precedes(trace[rho[j]], trace[rho[i]])
        for i in range(len(rho))
        for j in range(i + 1, len(rho))
    )


def expand_realizations(
    rho: OrderRealization, trace: UncertainTrace, cap: int | None = None
) -> list[Realization]:
    """Label sequences enabled by ``rho``: product of the events' label sets."""
    cap = default_cap() if cap is None else cap
    choices = [sorted(label_set(trace[eid])) for eid in rho]
    size = 1
    for c in choices:
        size *= len(c)
    if size > cap:
        raise CapExceeded("realizations", cap)
    return [tuple(seq) for seq in itertools.product(*choices)]


def enumerate_realizations(trace: UncertainTrace, cap: int | None = None) -> set[Realization]:
    """The set of all realizations of the trace, over every order-realization."""
    cap = default_cap() if cap is None else cap
    out: set[Realization] = set()
    for rho in enumerate_order_realizations(trace, cap=cap):
        out.update(expand_realizations(rho, trace, cap=cap))
        if len(out) > cap:
            raise CapExceeded("realizations", cap)
    return out
