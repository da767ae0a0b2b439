"""Exhaustive desk-scale analysis: optima, equilibrium sets, exact ratios.

Optima come from exhaustive search rather than flow optimization: under a
general scheme the aggregate edge cost need not be convex in the load, so
min-cost-flow shortcuts would be unsound. Everything is exact rationals.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import prod

from .errors import InternalAssertion, NotSeriesParallel, NotSymmetric, PathExplosion
from .game import (
    GameInstance,
    StrategyProfile,
    agent_cost,
    is_nash,
    max_cost,
    potential,
    sum_cost,
)
from .graphs import DEFAULT_PATH_CAP, GraphClass, classify
from .rational import Cost, INFINITY, is_finite


class Criterion(Enum):
    SUM = "sc"
    MAX = "mc"


def social_cost(instance: GameInstance, profile: StrategyProfile, criterion: Criterion) -> Cost:
    if criterion is Criterion.SUM:
        return sum_cost(instance, profile)
    return max_cost(instance, profile)


def enumerate_profiles(
    instance: GameInstance, cap: int = DEFAULT_PATH_CAP
) -> list[StrategyProfile]:
    """All feasible profiles, ordered lexicographically by per-agent path rank.

    Guards both the per-agent path counts and the product of the counts with
    ``cap``; beyond that the instance is declared too large for exhaustive
    work. Assembly prunes capacity overloads as agents are assigned, so only
    feasible profiles are materialized.
    """
    option_lists = [instance.agent_paths(j, cap) for j in range(instance.n)]
    combinations = prod((len(options) for options in option_lists), start=1)
    if combinations > cap:
        raise PathExplosion(cap, combinations)

    caps = instance.capacities
    loads: Counter[int] = Counter()
    chosen: list[tuple[int, ...]] = []
    out: list[StrategyProfile] = []

    def assign(j: int) -> None:
        if j == instance.n:
            out.append(StrategyProfile(tuple(chosen)))
            return
        for path in option_lists[j]:
            if any(loads[e] + 1 > caps[e] for e in path):
                continue
            for e in path:
                loads[e] += 1
            chosen.append(path)
            assign(j + 1)
            chosen.pop()
            for e in path:
                loads[e] -= 1

    assign(0)
    return out


def optimal_profile(
    instance: GameInstance,
    criterion: Criterion,
    cap: int = DEFAULT_PATH_CAP,
    profiles: list[StrategyProfile] | None = None,
) -> tuple[StrategyProfile, Fraction]:
    """Global minimizer of the social cost; ties go to enumeration order."""
    pool = enumerate_profiles(instance, cap) if profiles is None else profiles
    best: StrategyProfile | None = None
    best_value: Cost = INFINITY
    for profile in pool:
        value = social_cost(instance, profile, criterion)
        if best is None or value < best_value:
            best, best_value = profile, value
    if best is None or not is_finite(best_value):
        raise InternalAssertion("certified-feasible instance has no feasible profile")
    return best, best_value


@dataclass(frozen=True)
class EquilibriumSummary:
    """One equilibrium up to agent permutation, with its social statistics."""

    profile: StrategyProfile
    multiplicity: int
    sum_cost: Fraction
    max_cost: Fraction
    potential: Fraction


@dataclass(frozen=True)
class EquilibriumSet:
    """Every Nash equilibrium, reported deduplicated up to agent permutation.

    Permuting agents with identical terminals never changes the social
    statistics, so extremes over ``entries`` equal extremes over all ordered
    equilibria; ``total_count`` still counts the ordered ones.
    """

    entries: tuple[EquilibriumSummary, ...]
    total_count: int

    def extreme(self, criterion: Criterion, worst: bool) -> EquilibriumSummary:
        key = (lambda e: e.sum_cost) if criterion is Criterion.SUM else (lambda e: e.max_cost)
        pick = max if worst else min
        return pick(self.entries, key=key)


def all_nash(instance: GameInstance, cap: int = DEFAULT_PATH_CAP) -> EquilibriumSet:
    """Exactly the feasible profiles that pass the no-regret test."""
    ordered = [p for p in enumerate_profiles(instance, cap) if is_nash(instance, p)]
    if instance.n > 0 and not ordered:
        raise InternalAssertion("a feasible game must have a Nash equilibrium")

    groups: dict[tuple, tuple[StrategyProfile, int]] = {}
    for profile in ordered:
        labelled = sorted(
            zip(instance.terminals, profile.paths),
            key=lambda item: (repr(item[0]), item[1]),
        )
        key = tuple(labelled)
        kept, count = groups.get(key, (profile, 0))
        groups[key] = (kept, count + 1)

    entries = tuple(
        EquilibriumSummary(
            profile=profile,
            multiplicity=count,
            sum_cost=sum_cost(instance, profile),
            max_cost=max_cost(instance, profile),
            potential=potential(instance, profile),
        )
        for profile, count in groups.values()
    )
    return EquilibriumSet(entries, len(ordered))


@dataclass(frozen=True)
class RatioValue:
    """Exact equilibrium/optimum ratio; flagged when the optimum cost is zero."""

    value: Cost
    degenerate: bool = False


@dataclass(frozen=True)
class BoundCheck:
    """Verdict for one claimed bound, with a witness profile when violated."""

    tag: str
    description: str
    bound: Fraction
    measured: Cost
    holds: bool
    witness: StrategyProfile | None = None


@dataclass(frozen=True)
class AnalysisReport:
    graph_class: GraphClass
    agents: int
    symmetric: bool
    opt_sc: tuple[StrategyProfile, Fraction]
    opt_mc: tuple[StrategyProfile, Fraction]
    equilibria: EquilibriumSet
    poa_sc: RatioValue
    pos_sc: RatioValue
    poa_mc: RatioValue
    pos_mc: RatioValue
    bounds: tuple[BoundCheck, ...]


def _ratio(numerator: Fraction, denominator: Fraction) -> RatioValue:
    if denominator == 0:
        # 0/0 happens only on all-zero-cost games; report 1 and flag it
        if numerator == 0:
            return RatioValue(Fraction(1), degenerate=True)
        return RatioValue(INFINITY, degenerate=True)
    return RatioValue(numerator / denominator)


def compute_ratios(instance: GameInstance, cap: int = DEFAULT_PATH_CAP) -> AnalysisReport:
    """Exact PoA/PoS under both criteria plus verdicts for applicable bounds.

    No anarchy bound is asserted outside series-parallel graphs (the ratio
    is unbounded there); stability bounds apply everywhere, with the n^2
    variant for asymmetric games.
    """
    profiles = enumerate_profiles(instance, cap)
    opt_sc = optimal_profile(instance, Criterion.SUM, cap, profiles)
    opt_mc = optimal_profile(instance, Criterion.MAX, cap, profiles)
    equilibria = all_nash(instance, cap)

    worst_sc = equilibria.extreme(Criterion.SUM, worst=True)
    best_sc = equilibria.extreme(Criterion.SUM, worst=False)
    worst_mc = equilibria.extreme(Criterion.MAX, worst=True)
    best_mc = equilibria.extreme(Criterion.MAX, worst=False)

    poa_sc = _ratio(worst_sc.sum_cost, opt_sc[1])
    pos_sc = _ratio(best_sc.sum_cost, opt_sc[1])
    poa_mc = _ratio(worst_mc.max_cost, opt_mc[1])
    pos_mc = _ratio(best_mc.max_cost, opt_mc[1])

    for ratio in (poa_sc, pos_sc, poa_mc, pos_mc):
        if is_finite(ratio.value) and ratio.value < 1:
            raise InternalAssertion("an equilibrium beat the optimum")
    if poa_sc.value < pos_sc.value or poa_mc.value < pos_mc.value:
        raise InternalAssertion("best equilibrium worse than worst equilibrium")

    n = Fraction(instance.n)
    graph_class = classify(instance.graph)
    bounds: list[BoundCheck] = []
    if instance.n >= 1:
        sp_like = graph_class in (GraphClass.PARALLEL_LINK, GraphClass.SERIES_PARALLEL)
        if instance.symmetric:
            if sp_like:
                bounds.append(
                    _check("Thm5:PoA_sc<=n", "anarchy under sum-cost on SP graphs", n, poa_sc, worst_sc.profile)
                )
                bounds.append(
                    _check("Thm9:PoA_mc<=n", "anarchy under max-cost on SP graphs", n, poa_mc, worst_mc.profile)
                )
            bounds.append(
                _check("Thm8:PoS_sc<=n", "stability under sum-cost", n, pos_sc, best_sc.profile)
            )
            bounds.append(
                _check("Thm10:PoS_mc<=n", "stability under max-cost", n, pos_mc, best_mc.profile)
            )
        else:
            bounds.append(
                _check("Thm13:PoS_sc<=n", "asymmetric stability under sum-cost", n, pos_sc, best_sc.profile)
            )
            bounds.append(
                _check("Thm14:PoS_mc<=n^2", "asymmetric stability under max-cost", n * n, pos_mc, best_mc.profile)
            )

    return AnalysisReport(
        graph_class=graph_class,
        agents=instance.n,
        symmetric=instance.symmetric,
        opt_sc=opt_sc,
        opt_mc=opt_mc,
        equilibria=equilibria,
        poa_sc=poa_sc,
        pos_sc=pos_sc,
        poa_mc=poa_mc,
        pos_mc=pos_mc,
        bounds=tuple(bounds),
    )


def _check(
    tag: str, description: str, bound: Fraction, ratio: RatioValue, extreme: StrategyProfile
) -> BoundCheck:
    holds = ratio.value <= bound
    return BoundCheck(
        tag=tag,
        description=description,
        bound=bound,
        measured=ratio.value,
        holds=holds,
        witness=None if holds else extreme,
    )


def verify_lemma_cost_bound(
    instance: GameInstance, cap: int = DEFAULT_PATH_CAP
) -> BoundCheck:
    """Every equilibrium agent pays at most the sum-cost optimum (SP only)."""
    if classify(instance.graph) not in (
        GraphClass.PARALLEL_LINK,
        GraphClass.SERIES_PARALLEL,
    ):
        raise NotSeriesParallel("the per-agent cost bound needs a series-parallel graph")
    if not instance.symmetric:
        raise NotSymmetric("the per-agent cost bound needs shared terminals")

    profiles = enumerate_profiles(instance, cap)
    _, opt_value = optimal_profile(instance, Criterion.SUM, cap, profiles)
    worst: Cost = Fraction(0)
    witness: StrategyProfile | None = None
    for profile in profiles:
        if not is_nash(instance, profile):
            continue
        for agent in range(instance.n):
            cost = agent_cost(instance, profile, agent)
            if cost > worst:
                worst = cost
                witness = profile
    holds = worst <= opt_value
    return BoundCheck(
        tag="Lem3:agent_cost<=opt_sc",
        description="equilibrium agent cost never exceeds the sum-cost optimum",
        bound=opt_value,
        measured=worst,
        holds=holds,
        witness=None if holds else witness,
    )
