"""Integral flows, residual networks and augmenting paths.

Flows count unit source-to-sink paths, so values are nonnegative integers.
Searches visit residual arcs in increasing edge-id order, which makes
max-flow results and augmenting paths deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import InfeasibleFlow, InternalAssertion, ParameterViolation
from .graphs import EdgePath, Graph, NodeId


@dataclass(frozen=True)
class Flow:
    """Per-edge integer flow values plus the number of unit paths carried."""

    values: Mapping[int, int]
    value: int

    def at(self, edge_id: int) -> int:
        return self.values.get(edge_id, 0)


@dataclass(frozen=True)
class ResidualArc:
    """One step of a residual path: traverse ``edge_id`` forward or backward."""

    edge_id: int
    forward: bool


def zero_flow(graph: Graph) -> Flow:
    return Flow({e.id: 0 for e in graph.edges_by_id}, 0)


def _validate_capacities(graph: Graph, capacities: Mapping[int, int]) -> None:
    for edge in graph.edges:
        cap = capacities.get(edge.id, 0)
        if not isinstance(cap, int) or cap < 0:
            raise ParameterViolation(f"capacity of edge {edge.id} must be an integer >= 0")


def check_flow(
    graph: Graph,
    capacities: Mapping[int, int],
    flow: Flow,
    source: NodeId | None = None,
    sink: NodeId | None = None,
) -> None:
    """Raise InfeasibleFlow unless ``flow`` respects capacities and conservation."""
    src = graph.source if source is None else source
    dst = graph.sink if sink is None else sink
    _validate_capacities(graph, capacities)
    for edge_id in flow.values:
        if edge_id not in graph.edge_map:
            raise InfeasibleFlow(f"flow on unknown edge {edge_id}")
    net: dict[NodeId, int] = {v: 0 for v in graph.nodes}
    for edge in graph.edges:
        f = flow.at(edge.id)
        cap = capacities.get(edge.id, 0)
        if f < 0 or f > cap:
            raise InfeasibleFlow(f"edge {edge.id}: flow {f} outside [0, {cap}]")
        net[edge.tail] += f
        net[edge.head] -= f
    for node in graph.nodes:
        expected = flow.value if node == src else -flow.value if node == dst else 0
        if net[node] != expected:
            raise InfeasibleFlow(f"conservation violated at node {node!r}")


def _residual_search(
    graph: Graph,
    capacities: Mapping[int, int],
    values: Mapping[int, int],
    source: NodeId,
    sink: NodeId,
) -> tuple[ResidualArc, ...] | None:
    """Depth-first residual path, exploring arcs by lowest edge id first."""
    path: list[tuple[ResidualArc, NodeId]] = []
    visited: set[NodeId] = {source}

    def arcs_from(node: NodeId):
        forward = [
            (e.id, True, e.head)
            for e in graph.outgoing.get(node, ())
            if values.get(e.id, 0) < capacities.get(e.id, 0)
        ]
        backward = [
            (e.id, False, e.tail)
            for e in graph.incoming.get(node, ())
            if values.get(e.id, 0) > 0
        ]
        return sorted(forward + backward)

    def walk(node: NodeId) -> bool:
        if node == sink:
            return True
        for edge_id, fwd, nxt in arcs_from(node):
            if nxt in visited:
                continue
            visited.add(nxt)
            path.append((ResidualArc(edge_id, fwd), nxt))
            if walk(nxt):
                return True
            path.pop()
            visited.discard(nxt)
        return False

    if walk(source):
        return tuple(arc for arc, _ in path)
    return None


def augmenting_path(
    graph: Graph,
    capacities: Mapping[int, int],
    flow: Flow,
    source: NodeId | None = None,
    sink: NodeId | None = None,
) -> tuple[ResidualArc, ...] | None:
    """Residual source->sink path, or None when ``flow`` is already maximum."""
    src = graph.source if source is None else source
    dst = graph.sink if sink is None else sink
    check_flow(graph, capacities, flow, src, dst)
    return _residual_search(graph, capacities, flow.values, src, dst)


def apply_augmentation(
    values: Mapping[int, int], arcs: tuple[ResidualArc, ...], amount: int = 1
) -> dict[int, int]:
    updated = dict(values)
    for arc in arcs:
        delta = amount if arc.forward else -amount
        updated[arc.edge_id] = updated.get(arc.edge_id, 0) + delta
    return updated


def max_flow(
    graph: Graph,
    capacities: Mapping[int, int],
    source: NodeId | None = None,
    sink: NodeId | None = None,
) -> Flow:
    """Integral maximum flow by repeated augmentation (value = min cut)."""
    src = graph.source if source is None else source
    dst = graph.sink if sink is None else sink
    _validate_capacities(graph, capacities)
    values = {e.id: 0 for e in graph.edges_by_id}
    value = 0
    while True:
        arcs = _residual_search(graph, capacities, values, src, dst)
        if arcs is None:
            return Flow(values, value)
        bottleneck = min(
            capacities.get(a.edge_id, 0) - values[a.edge_id] if a.forward else values[a.edge_id]
            for a in arcs
        )
        values = apply_augmentation(values, arcs, bottleneck)
        value += bottleneck


def decompose_unit_paths(
    graph: Graph,
    values: Mapping[int, int],
    source: NodeId | None = None,
    sink: NodeId | None = None,
) -> tuple[EdgePath, ...]:
    """Split an integral flow into unit source->sink paths.

    Flow on cycles is cancelled first, so every peeled path is simple. The
    peel order (always follow the lowest positive edge id) is deterministic.
    """
    src = graph.source if source is None else source
    dst = graph.sink if sink is None else sink
    work = {e.id: values.get(e.id, 0) for e in graph.edges_by_id}

    _cancel_cycles(graph, work)

    remaining = sum(work[e.id] for e in graph.outgoing.get(src, ())) - sum(
        work[e.id] for e in graph.incoming.get(src, ())
    )
    paths: list[EdgePath] = []
    for _ in range(remaining):
        node = src
        picked: list[int] = []
        while node != dst:
            edge = next(
                (e for e in graph.outgoing.get(node, ()) if work[e.id] > 0), None
            )
            if edge is None:
                raise InternalAssertion("flow decomposition got stuck mid-path")
            work[edge.id] -= 1
            picked.append(edge.id)
            node = edge.head
        paths.append(tuple(picked))
    if any(v < 0 for v in work.values()):
        raise InternalAssertion("flow decomposition went negative")
    return tuple(paths)


def _cancel_cycles(graph: Graph, work: dict[int, int]) -> None:
    while True:
        cycle = _find_positive_cycle(graph, work)
        if cycle is None:
            return
        slack = min(work[e] for e in cycle)
        for edge_id in cycle:
            work[edge_id] -= slack


def _find_positive_cycle(graph: Graph, work: dict[int, int]) -> list[int] | None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in graph.nodes}
    via: dict[NodeId, tuple[NodeId, int]] = {}

    def walk(node: NodeId) -> list[int] | None:
        color[node] = GRAY
        for edge in graph.outgoing.get(node, ()):
            if work[edge.id] <= 0:
                continue
            nxt = edge.head
            if color[nxt] == GRAY:
                cycle = [edge.id]
                cur = node
                while cur != nxt:
                    prev, eid = via[cur]
                    cycle.append(eid)
                    cur = prev
                cycle.reverse()
                return cycle
            if color[nxt] == WHITE:
                via[nxt] = (node, edge.id)
                found = walk(nxt)
                if found is not None:
                    return found
        color[node] = BLACK
        return None

    for start in graph.nodes:
        if color[start] == WHITE:
            found = walk(start)
            if found is not None:
                return found
    return None
