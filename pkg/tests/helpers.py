"""Independent oracles used to freeze expected values in the tests.

These deliberately re-derive results by brute force, without touching the
library's search code, so the tests check the implementation against a
second route rather than against itself.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

from csglab.game import GameInstance, StrategyProfile, agent_cost
from csglab.graphs import Graph


def oracle_paths(graph: Graph, source=None, sink=None) -> list[tuple[int, ...]]:
    """Recursive set-based DFS over simple paths, sorted lexicographically."""
    src = graph.source if source is None else source
    dst = graph.sink if sink is None else sink
    found: list[tuple[int, ...]] = []

    def explore(node, seen, acc):
        if node == dst:
            found.append(tuple(acc))
            return
        for edge in graph.edges:
            if edge.tail != node or edge.head in seen:
                continue
            explore(edge.head, seen | {edge.head}, acc + [edge.id])

    explore(src, {src}, [])
    return sorted(found)


def oracle_feasible_profiles(instance: GameInstance) -> list[StrategyProfile]:
    """Cross product of per-agent paths filtered by the capacity constraint."""
    per_agent = [oracle_paths(instance.graph, s, t) for s, t in instance.terminals]
    caps = instance.capacities
    out = []
    for combo in product(*per_agent):
        loads: dict[int, int] = {}
        for path in combo:
            for e in path:
                loads[e] = loads.get(e, 0) + 1
        if all(load <= caps[e] for e, load in loads.items()):
            out.append(StrategyProfile(tuple(combo)))
    return out


def oracle_is_nash(instance: GameInstance, profile: StrategyProfile) -> bool:
    """Full deviation scan recomputed from scratch via agent_cost."""
    for agent in range(instance.n):
        current = agent_cost(instance, profile, agent)
        s, t = instance.terminals[agent]
        for path in oracle_paths(instance.graph, s, t):
            rival = profile.replace(agent, path)
            if agent_cost(instance, rival, agent) < current:
                return False
    return True


def oracle_potential(instance: GameInstance, profile: StrategyProfile) -> Fraction:
    """Direct double loop over edges and loads."""
    total = Fraction(0)
    for edge_id, load in profile.loads.items():
        scheme = instance.schemes[edge_id]
        for x in range(1, load + 1):
            total += scheme.share(x)
    return total


def oracle_max_disjoint_path_count(graph: Graph) -> int:
    """Largest set of pairwise edge-disjoint s-t paths (unit-capacity max flow)."""
    paths = oracle_paths(graph)
    best = 0
    for size in range(1, len(paths) + 1):
        for combo in combinations(paths, size):
            used: set[int] = set()
            ok = True
            for path in combo:
                if used & set(path):
                    ok = False
                    break
                used |= set(path)
            if ok:
                best = max(best, size)
    return best


def oracle_extension_paths(
    instance: GameInstance, big: StrategyProfile, small: StrategyProfile
) -> list[tuple[int, ...]]:
    """All valid extension paths: within the big profile's edges, feasible when appended."""
    caps = instance.capacities
    small_loads = small.loads
    return [
        path
        for path in oracle_paths(instance.graph)
        if set(path) <= big.used_edges
        and all(small_loads.get(e, 0) + 1 <= caps[e] for e in path)
    ]
