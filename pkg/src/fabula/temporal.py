"""Global temporal ordering of events from pairwise relations.

Four-way labels are first collapsed to a binary BEFORE/AFTER signal, then
assembled into a precedence graph whose edges point from earlier to later
event. The ranking is a stable topological sort: whenever several events
are simultaneously available, the one earliest in the text is emitted, so
the order degrades gracefully to textual order wherever the evidence is
silent. Contradictory evidence (cycles) is resolved by repeatedly deleting
the weakest edge inside a cycle, and every deleted edge is reported rather
than hidden: contradictions are information about the narrative, not noise.

No minimum-feedback-arc-set optimality is attempted (that problem is
NP-hard); the deletion rule is deterministic and confidence-greedy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .model import (
    CharacterEntity,
    EventChain,
    EventRecord,
    GenderLabel,
    RelationValue,
    TemporalLabel,
)


@dataclass(frozen=True)
class Edge:
    """A directed precedence edge source -> target with the confidence and
    input position of the label that produced it."""

    source: int
    target: int
    confidence: Optional[float] = None
    label_index: Optional[int] = None


@dataclass(frozen=True)
class PrecedenceGraph:
    node_count: int
    edges: tuple[Edge, ...]


def collapse_labels(labels: Iterable[TemporalLabel]) -> tuple[TemporalLabel, ...]:
    """Reduce the four-way label set to BEFORE/AFTER: SIMULTANEOUS and
    VAGUE become BEFORE (an admittedly imperfect reading that keeps every
    pair usable for ordering); confidences pass through unchanged."""
    out = []
    for lb in labels:
        if lb.relation in (RelationValue.SIMULTANEOUS, RelationValue.VAGUE):
            out.append(TemporalLabel(lb.left, lb.right, RelationValue.BEFORE, lb.confidence))
        else:
            out.append(lb)
    return tuple(out)


def build_precedence_graph(
    events: Sequence[EventRecord],
    labels: Sequence[TemporalLabel],
) -> PrecedenceGraph:
    """BEFORE(u, v) adds edge u->v, AFTER(u, v) adds v->u. When two labels
    produce the same ordered pair, the higher-confidence edge wins (a
    missing confidence counts as 0; first occurrence wins ties)."""
    known = {ev.event_id for ev in events}
    best: dict[tuple[int, int], Edge] = {}
    for i, lb in enumerate(labels):
        if lb.left not in known or lb.right not in known:
            raise ValueError(
                f"label {i} references unknown event ({lb.left}, {lb.right})"
            )
        if lb.relation == RelationValue.BEFORE:
            pair = (lb.left, lb.right)
        elif lb.relation == RelationValue.AFTER:
            pair = (lb.right, lb.left)
        else:
            raise ValueError(
                f"label {i} has uncollapsed relation {lb.relation.value}; run collapse_labels first"
            )
        candidate = Edge(pair[0], pair[1], lb.confidence, i)
        existing = best.get(pair)
        if existing is None or _conf(candidate) > _conf(existing):
            best[pair] = candidate
    edges = tuple(sorted(best.values(), key=lambda e: (e.source, e.target)))
    return PrecedenceGraph(node_count=len(events), edges=edges)


def _conf(edge: Edge) -> float:
    return 0.0 if edge.confidence is None else edge.confidence


def rank_order(
    node_count: int,
    edges: Sequence[tuple[int, int, Optional[float]]],
) -> tuple[list[int], list[tuple[int, int, Optional[float]]]]:
    """Order nodes 0..node_count-1 so that every surviving edge (u, v)
    places u first; returns (order, deleted_edges).

    Among simultaneously available nodes the smallest id is emitted first,
    so an edge-free graph comes out in id (textual) order. If the graph is
    cyclic, one edge of some cycle is deleted and the sort retried: the
    lowest-confidence edge goes first (no confidence = 0), then the edge
    most against id order (largest source - target), then the smallest
    (source, target) pair. This always terminates and is deterministic.
    """
    n = node_count
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v, _ in edges:
        adj[u].append(v)
    remaining = {(u, v): c for u, v, c in edges}
    deleted: list[tuple[int, int, Optional[float]]] = []

    while True:
        order = _kahn_min_id(n, adj)
        if len(order) == n:
            return order, deleted
        cycle_edges = _find_cycle(n, adj, set(order))
        u, v = min(
            cycle_edges,
            key=lambda e: (
                0.0 if remaining[e] is None else remaining[e],
                -(e[0] - e[1]),
                e,
            ),
        )
        deleted.append((u, v, remaining.pop((u, v))))
        adj[u].remove(v)


def _kahn_min_id(n: int, adj: Sequence[Sequence[int]]) -> list[int]:
    indeg = [0] * n
    for vs in adj:
        for v in vs:
            indeg[v] += 1
    # the available set lives in a bitmask; taking the lowest set bit is
    # exactly the smallest-id tie-break
    avail = 0
    for i in range(n):
        if indeg[i] == 0:
            avail |= 1 << i
    order: list[int] = []
    append = order.append
    while avail:
        low = avail & -avail
        u = low.bit_length() - 1
        avail ^= low
        append(u)
        for v in adj[u]:
            d = indeg[v] - 1
            indeg[v] = d
            if d == 0:
                avail |= 1 << v
    return order


def _find_cycle(n: int, adj: Sequence[Sequence[int]], done: set[int]) -> list[tuple[int, int]]:
    """Edges of one cycle among the nodes Kahn could not order. Iterative
    DFS from the smallest unfinished node, neighbors in ascending order,
    so the cycle found is deterministic."""
    state = {u: 0 for u in range(n) if u not in done}  # 0 new, 1 on stack, 2 closed
    for start in sorted(state):
        if state[start] != 0:
            continue
        stack = [(start, iter(sorted(v for v in adj[start] if v in state)))]
        state[start] = 1
        path = [start]
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if state[v] == 1:
                    cycle = path[path.index(v) :] + [v]
                    return list(zip(cycle, cycle[1:]))
                if state[v] == 0:
                    state[v] = 1
                    path.append(v)
                    stack.append((v, iter(sorted(w for w in adj[v] if w in state))))
                    advanced = True
                    break
            if not advanced:
                state[u] = 2
                path.pop()
                stack.pop()
    raise AssertionError("no cycle among unordered nodes")  # pragma: no cover


def rank_events(
    graph: PrecedenceGraph,
) -> tuple[EventChain, tuple[Edge, ...]]:
    """Produce the global event chain (filter "all") plus the edges that
    had to be deleted to break cycles."""
    order, deleted = rank_order(
        graph.node_count,
        [(e.source, e.target, e.confidence) for e in graph.edges],
    )
    by_pair = {(e.source, e.target): e for e in graph.edges}
    return (
        EventChain(event_ids=tuple(order), filter="all"),
        tuple(by_pair[(u, v)] for u, v, _ in deleted),
    )


def chain_for_filter(
    chain: EventChain,
    events: Sequence[EventRecord],
    filter_spec: str,
    characters: Sequence[CharacterEntity] = (),
    salient_ids: frozenset[int] | set[int] = frozenset(),
) -> EventChain:
    """Subsequence of the global chain matching a filter descriptor:
    "all", "salient", "gender:<GENDER>", or "character:<id>". Gender and
    character filters match on the event's subject."""
    by_id = {ev.event_id: ev for ev in events}
    gender_of = {c.character_id: c.gender for c in characters}

    if filter_spec == "all":
        keep = set(by_id)
    elif filter_spec == "salient":
        keep = set(salient_ids)
    elif filter_spec.startswith("gender:"):
        value = filter_spec.split(":", 1)[1]
        try:
            wanted = GenderLabel(value)
        except ValueError:
            raise ValueError(f"unknown gender {value!r} in filter {filter_spec!r}") from None
        keep = {
            ev.event_id
            for ev in events
            if ev.subject is not None
            and ev.subject.character_id is not None
            and gender_of.get(ev.subject.character_id) == wanted
        }
    elif filter_spec.startswith("character:"):
        raw = filter_spec.split(":", 1)[1]
        try:
            cid = int(raw)
        except ValueError:
            raise ValueError(f"malformed character id {raw!r} in filter {filter_spec!r}") from None
        if cid not in gender_of:
            raise ValueError(f"unknown character id {cid}")
        keep = {
            ev.event_id
            for ev in events
            if ev.subject is not None and ev.subject.character_id == cid
        }
    else:
        raise ValueError(f"unknown chain filter {filter_spec!r}")

    return EventChain(
        event_ids=tuple(i for i in chain.event_ids if i in keep),
        filter=filter_spec,
    )
