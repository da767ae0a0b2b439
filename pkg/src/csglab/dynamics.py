"""Best responses, convergent deviation dynamics, and equilibrium rebuilding.

Only strictly improving moves are ever executed, so the potential drops at
every step and every run terminates at a Nash equilibrium. The rebuild
procedure turns a max-cost-optimal profile into an equilibrium whose
max-cost is at most n times the optimal max-cost, lowering the potential
across rebuild rounds until the bound holds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import flows
from .errors import (
    InfeasibleProfile,
    InternalAssertion,
    NotSymmetric,
    ParameterViolation,
    StepCapExceeded,
)
from .game import (
    Deviation,
    GameInstance,
    StrategyProfile,
    agent_cost,
    is_feasible,
    max_cost,
    potential,
    sum_cost,
)
from .graphs import EdgePath
from .rational import is_finite

DEFAULT_STEP_CAP = 10_000

ORDERINGS = ("round_robin", "permutation", "random")
RULES = ("best", "first_improving")


@dataclass(frozen=True)
class DeviationPolicy:
    """How agents take turns and which improving move they pick.

    Round-robin visits agents by index; "permutation" uses a fixed order;
    "random" reshuffles each pass with a seeded generator, so runs are
    reproducible given the seed.
    """

    ordering: str = "round_robin"
    rule: str = "best"
    permutation: tuple[int, ...] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.ordering not in ORDERINGS:
            raise ParameterViolation(f"unknown ordering {self.ordering!r}")
        if self.rule not in RULES:
            raise ParameterViolation(f"unknown rule {self.rule!r}")
        if (self.ordering == "permutation") != (self.permutation is not None):
            raise ParameterViolation("permutation orderings need an explicit permutation")


DEFAULT_POLICY = DeviationPolicy()


@dataclass(frozen=True)
class DynamicsStep:
    agent: int
    old_path: EdgePath
    new_path: EdgePath
    cost_delta: Fraction
    potential_after: Fraction


@dataclass(frozen=True)
class DynamicsTrace:
    """Executed deviations plus the terminal equilibrium they reached."""

    start: StrategyProfile
    terminal: StrategyProfile
    steps: tuple[DynamicsStep, ...]
    initial_potential: Fraction

    @property
    def step_count(self) -> int:
        return len(self.steps)

    def potentials(self) -> tuple[Fraction, ...]:
        return (self.initial_potential,) + tuple(s.potential_after for s in self.steps)


def _improving_move(
    instance: GameInstance,
    profile: StrategyProfile,
    agent: int,
    rule: str,
) -> Deviation | None:
    """Scan candidate paths in lexicographic order for a strict improvement.

    Candidate weights: an edge already on the agent's path keeps its current
    share; a foreign edge with spare capacity costs its share at load + 1; a
    foreign edge at capacity blocks the candidate. Partial sums are compared
    against the best known cost, so ties never replace an earlier candidate
    and the winner is the lexicographically first cheapest path.
    """
    loads = profile.loads
    caps = instance.capacities
    schemes = instance.schemes
    own = profile.edge_sets[agent]
    current = agent_cost(instance, profile, agent)
    if not is_finite(current):
        raise InfeasibleProfile("deviation search requires a feasible profile")

    best: Deviation | None = None
    threshold = current
    for candidate in instance.agent_paths(agent):
        if candidate == profile.paths[agent]:
            continue
        cost = Fraction(0)
        blocked = False
        for edge_id in candidate:
            if edge_id in own:
                cost += schemes[edge_id].share(loads[edge_id])
            else:
                load = loads.get(edge_id, 0)
                if load >= caps[edge_id]:
                    blocked = True
                    break
                cost += schemes[edge_id].share(load + 1)
            if cost >= threshold:
                blocked = True
                break
        if blocked or cost >= threshold:
            continue
        move = Deviation(agent, profile.paths[agent], candidate, current, cost)
        if rule == "first_improving":
            return move
        best = move
        threshold = cost
    return best


def best_response(
    instance: GameInstance, profile: StrategyProfile, agent: int
) -> Deviation | None:
    """Cheapest strictly improving path for one agent, or None when content.

    The agent's current path is always available, so a feasible profile can
    never leave an agent without options; ties favour staying put.
    """
    return _improving_move(instance, profile, agent, "best")


def first_improvement(
    instance: GameInstance, profile: StrategyProfile, agent: int
) -> Deviation | None:
    return _improving_move(instance, profile, agent, "first_improving")


def run_dynamics(
    instance: GameInstance,
    start: StrategyProfile,
    policy: DeviationPolicy = DEFAULT_POLICY,
    step_cap: int = DEFAULT_STEP_CAP,
) -> DynamicsTrace:
    """Iterate strictly improving deviations until no agent has one.

    The potential drops by exactly the mover's cost change at every step
    (asserted), so the run terminates; the step cap is only a safety net.
    A full pass with no executed move certifies the terminal profile is a
    Nash equilibrium.
    """
    if not is_feasible(instance, start):
        raise InfeasibleProfile("dynamics must start from a feasible profile")
    rng = random.Random(policy.seed)
    n = len(start)
    if policy.ordering == "permutation":
        if sorted(policy.permutation) != list(range(n)):
            raise ParameterViolation("permutation must reorder exactly the agent indices")

    profile = start
    pot = potential(instance, profile)
    initial_potential = pot
    steps: list[DynamicsStep] = []

    while True:
        if policy.ordering == "round_robin":
            order = range(n)
        elif policy.ordering == "permutation":
            order = policy.permutation
        else:
            order = rng.sample(range(n), n)
        moved = False
        for agent in order:
            move = _improving_move(instance, profile, agent, policy.rule)
            if move is None:
                continue
            if len(steps) >= step_cap:
                raise StepCapExceeded(f"dynamics exceeded {step_cap} steps")
            profile = profile.replace(agent, move.new_path)
            new_pot = potential(instance, profile)
            if new_pot - pot != move.delta:
                raise InternalAssertion(
                    f"potential change {new_pot - pot} != cost change {move.delta}"
                )
            pot = new_pot
            steps.append(
                DynamicsStep(agent, move.old_path, move.new_path, move.delta, new_pot)
            )
            moved = True
        if not moved:
            break

    return DynamicsTrace(start, profile, tuple(steps), initial_potential)


# --- low-max-cost equilibrium (augmenting-path rebuild) -----------------------


@dataclass(frozen=True)
class RebuildRound:
    """Bookkeeping for one rebuild of an equilibrium whose max-cost is too high.

    All values are in the rescaled game where the reference profile's
    sum-cost equals the number of agents.
    """

    removed_agent: int
    equilibrium_max_cost: Fraction
    equilibrium_potential: Fraction
    augmenting_arcs: tuple[flows.ResidualArc, ...]
    rebuilt_path_cost: Fraction
    rebuilt_potential: Fraction
    settled_potential: Fraction


@dataclass(frozen=True)
class ConstructiveResult:
    equilibrium: StrategyProfile
    rounds: tuple[RebuildRound, ...]
    scale: Fraction
    traces: tuple[DynamicsTrace, ...]


def low_max_cost_equilibrium(
    instance: GameInstance,
    max_cost_optimum: StrategyProfile,
    policy: DeviationPolicy = DEFAULT_POLICY,
    step_cap: int = DEFAULT_STEP_CAP,
    round_cap: int = DEFAULT_STEP_CAP,
) -> ConstructiveResult:
    """Equilibrium whose max-cost is at most n times the optimal max-cost.

    Works on a rescaled clone in which the reference profile's sum-cost is
    exactly n, so its max-cost is at least 1. Runs dynamics from the
    reference profile; while the resulting equilibrium still has max-cost
    above n, removes the worst-paying agent (lowest index on ties), finds an
    augmenting path in the residual network of the combined capacitated
    graph, reinserts the agent along it, and settles again. Each round
    strictly lowers the potential, so the loop is finite.
    """
    if not instance.symmetric:
        raise NotSymmetric("the rebuild procedure requires shared terminals")
    if not is_feasible(instance, max_cost_optimum):
        raise InfeasibleProfile("reference profile is infeasible")
    n = instance.n
    if n == 0:
        raise ParameterViolation("need at least one agent")

    reference_sum = sum_cost(instance, max_cost_optimum)
    if reference_sum == 0:
        # all edges on the reference paths are free: it is already an
        # equilibrium with max-cost 0 and nothing can improve on that
        trace = run_dynamics(instance, max_cost_optimum, policy, step_cap)
        return ConstructiveResult(trace.terminal, (), Fraction(1), (trace,))

    scale = Fraction(n) / reference_sum
    scaled = instance.scaled(scale)
    target = Fraction(n)

    ref_loads = max_cost_optimum.loads

    trace = run_dynamics(scaled, max_cost_optimum, policy, step_cap)
    traces = [trace]
    equilibrium = trace.terminal
    rounds: list[RebuildRound] = []

    while True:
        worst = max_cost(scaled, equilibrium)
        if worst <= target:
            break
        if len(rounds) >= round_cap:
            raise StepCapExceeded(f"rebuild exceeded {round_cap} rounds")

        ne_potential = potential(scaled, equilibrium)
        removed = min(
            agent
            for agent in range(n)
            if agent_cost(scaled, equilibrium, agent) == worst
        )
        partial = equilibrium.without(removed)
        profile_after_rebuild, arcs, path_cost = _reinsert_agent(
            scaled, max_cost_optimum, ref_loads, partial, removed
        )
        if path_cost > target:
            raise InternalAssertion(
                f"rebuilt path cost {path_cost} exceeds the scaled optimum total {target}"
            )
        rebuilt_potential = potential(scaled, profile_after_rebuild)
        if not rebuilt_potential < ne_potential:
            raise InternalAssertion("rebuild did not lower the potential")

        trace = run_dynamics(scaled, profile_after_rebuild, policy, step_cap)
        traces.append(trace)
        equilibrium = trace.terminal
        settled_potential = potential(scaled, equilibrium)
        rounds.append(
            RebuildRound(
                removed_agent=removed,
                equilibrium_max_cost=worst,
                equilibrium_potential=ne_potential,
                augmenting_arcs=arcs,
                rebuilt_path_cost=path_cost,
                rebuilt_potential=rebuilt_potential,
                settled_potential=settled_potential,
            )
        )
        if len(rounds) >= 2:
            if not rounds[-1].equilibrium_potential < rounds[-2].equilibrium_potential:
                raise InternalAssertion("round potentials must strictly decrease")

    return ConstructiveResult(equilibrium, tuple(rounds), scale, tuple(traces))


def _reinsert_agent(
    scaled: GameInstance,
    reference: StrategyProfile,
    ref_loads: dict[int, int],
    partial: StrategyProfile,
    removed: int,
) -> tuple[StrategyProfile, tuple[flows.ResidualArc, ...], Fraction]:
    """Route the removed agent through the combined capacitated graph.

    The combined graph takes the union of the reference profile's and the
    partial profile's edges with capacity max(reference load, partial load).
    The partial profile is a flow one unit short of what the combined graph
    admits, so an augmenting path exists; every forward arc on it is an edge
    the reference profile uses (asserted), which caps the path's base-cost
    total. A forward-only path slots in directly as the removed agent's new
    strategy; otherwise the augmented flow is re-decomposed into unit paths
    assigned to agents by index.
    """
    graph = scaled.graph
    partial_loads = partial.loads
    union_caps = {
        eid: max(ref_loads.get(eid, 0), partial_loads.get(eid, 0))
        for eid in set(ref_loads) | set(partial_loads)
    }
    flow = flows.Flow(dict(partial_loads), len(partial))
    arcs = flows.augmenting_path(graph, union_caps, flow)
    if arcs is None:
        raise InternalAssertion("combined graph admits no augmenting path")

    forward_edges = [arc.edge_id for arc in arcs if arc.forward]
    for edge_id in forward_edges:
        if ref_loads.get(edge_id, 0) <= 0:
            raise InternalAssertion(
                f"augmenting path uses edge {edge_id} outside the reference profile"
            )
    path_cost = sum(
        (scaled.schemes[eid].base_cost for eid in forward_edges), Fraction(0)
    )

    if all(arc.forward for arc in arcs):
        new_path = tuple(arc.edge_id for arc in arcs)
        rebuilt = StrategyProfile(
            partial.paths[:removed] + (new_path,) + partial.paths[removed:]
        )
    else:
        new_values = flows.apply_augmentation(flow.values, arcs)
        unit_paths = flows.decompose_unit_paths(graph, new_values)
        rebuilt = StrategyProfile(unit_paths)
    if len(rebuilt) != scaled.n:
        raise InternalAssertion("rebuild produced the wrong number of paths")
    if not is_feasible(scaled, rebuilt):
        raise InternalAssertion("rebuilt profile is infeasible")
    return rebuilt, arcs, path_cost
