"""Assignment schemes: matching-optimal, greedy, reciprocal, random.

All schemes consume one Round and emit a feasible Assignment.  The three
baselines price their choices from the same matching-graph energies the
optimal scheme uses, so energy comparisons across schemes are exact.
`brute_force_assignment` is the independent oracle: it enumerates
feasible assignments directly from the energy model and never touches
the matching-graph reduction.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .matchgraph import (
    CASE_EXCHANGE,
    CASE_IDLE,
    CASE_LOCAL,
    CASE_OFFLOAD,
    Assignment,
    MatchingGraph,
    build,
    decode,
)
from .matching import (
    WeightedGraph,
    min_weight_perfect_matching,
    verify_certificate,
)
from .model import local_energy, offload_energy
from .scenario import Round

__all__ = [
    "assign_optimal",
    "assign_greedy",
    "assign_reciprocal",
    "assign_random",
    "brute_force_assignment",
    "all_local_assignment",
    "all_local_energy",
    "total_energy",
    "saving_ratio",
    "SCHEMES",
    "BRUTE_FORCE_DEVICE_CAP",
]

BRUTE_FORCE_DEVICE_CAP = 8


def _build_graph(rnd: Round) -> MatchingGraph:
    return build(rnd.connectivity, rnd.tasks, rnd.devices)


def assign_optimal(rnd: Round, verify: bool = False) -> Assignment:
    """Energy-optimal assignment via minimum-weight perfect matching.

    Builds the matching graph, solves it, and decodes the matching back
    to an assignment.  With verify=True the solver's dual certificate is
    checked before decoding.
    """
    mgraph = _build_graph(rnd)
    wgraph = WeightedGraph(len(mgraph.nodes), mgraph.edges)
    matching = min_weight_perfect_matching(wgraph)
    if verify:
        verify_certificate(wgraph, matching)
    return decode(mgraph, matching.pairs)


def assign_greedy(rnd: Round) -> Assignment:
    """Cheapest-edge-first scan over the matching graph's decision edges.

    Edges (local, offload, exchange alike) are taken in ascending weight
    order, ties broken by node-id pair; an edge is accepted when both
    endpoints are still unused.  Every owner ends covered because its
    local edge is always available as a fallback.
    """
    mgraph = _build_graph(rnd)
    order = sorted(
        (w, u, v, pos)
        for pos, (u, v, w) in enumerate(mgraph.edges)
        if mgraph.cases[pos] != CASE_IDLE
    )
    used: set[int] = set()
    executors: dict[int, int] = {}
    energies: dict[int, float] = {}
    for (_w, u, v, pos) in order:
        if u in used or v in used:
            continue
        used.add(u)
        used.add(v)
        case = mgraph.cases[pos]
        i = mgraph.nodes[u].device
        j = mgraph.nodes[v].device
        if case == CASE_LOCAL:
            executors[i] = i
            energies[i] = mgraph.pair_energy[(i, i)]
        elif case == CASE_OFFLOAD:
            if (i, j) not in mgraph.pair_energy:
                i, j = j, i
            executors[i] = j
            energies[i] = mgraph.pair_energy[(i, j)]
        elif case == CASE_EXCHANGE:
            executors[i] = j
            executors[j] = i
            energies[i] = mgraph.pair_energy[(i, j)]
            energies[j] = mgraph.pair_energy[(j, i)]
    return Assignment(
        executors=executors, energies=energies, total_energy=sum(energies.values())
    )


def assign_reciprocal(rnd: Round) -> Assignment:
    """Exchange tasks only between pairs where both sides improve.

    Candidate pairs are linked task owners with E_ij < E_i_local and
    E_ji < E_j_local; pairs are accepted greedily by ascending combined
    energy among still-unpaired owners.  Everyone else runs locally.
    """
    mgraph = _build_graph(rnd)
    pe = mgraph.pair_energy
    owners = sorted({i for (i, j) in pe if i == j})
    candidates = []
    for pos, (u, v, _w) in enumerate(mgraph.edges):
        if mgraph.cases[pos] != CASE_EXCHANGE:
            continue
        i = mgraph.nodes[u].device
        j = mgraph.nodes[v].device
        if pe[(i, j)] < pe[(i, i)] and pe[(j, i)] < pe[(j, j)]:
            candidates.append((pe[(i, j)] + pe[(j, i)], min(i, j), max(i, j)))
    candidates.sort()
    paired: set[int] = set()
    executors: dict[int, int] = {}
    energies: dict[int, float] = {}
    for (_tot, i, j) in candidates:
        if i in paired or j in paired:
            continue
        paired.update((i, j))
        executors[i] = j
        executors[j] = i
        energies[i] = pe[(i, j)]
        energies[j] = pe[(j, i)]
    for i in owners:
        if i not in paired:
            executors[i] = i
            energies[i] = pe[(i, i)]
    return Assignment(
        executors=executors, energies=energies, total_energy=sum(energies.values())
    )


def assign_random(rnd: Round, rng: np.random.Generator) -> Assignment:
    """Owners in random order each pick an unused idle neighbor or themselves.

    The candidate set is {still-unused idle D2D neighbors} plus local
    execution, sampled uniformly; task-owning neighbors are never
    candidates (cross-owner moves require mutual agreement, which a
    unilateral random pick cannot establish).
    """
    mgraph = _build_graph(rnd)
    pe = mgraph.pair_energy
    owners = sorted({t.owner for t in rnd.tasks})
    owner_set = set(owners)
    nbrs = rnd.connectivity.neighbor_map()
    used: set[int] = set()
    executors: dict[int, int] = {}
    energies: dict[int, float] = {}
    for pos in rng.permutation(len(owners)):
        i = owners[int(pos)]
        choices = [j for j in nbrs.get(i, []) if j not in owner_set and j not in used]
        choices.append(i)
        j = choices[int(rng.integers(0, len(choices)))]
        executors[i] = j
        energies[i] = pe[(i, j)] if j != i else pe[(i, i)]
        if j != i:
            used.add(j)
    return Assignment(
        executors=executors, energies=energies, total_energy=sum(energies.values())
    )


def brute_force_assignment(rnd: Round) -> Assignment:
    """Exhaustive search over feasible assignments; oracle for small rounds.

    Recurses directly over per-owner choices (local, offload to an unused
    idle neighbor, or mutual exchange with an unpaired owner neighbor),
    pricing each from the energy model.  Independent of the matching
    reduction by construction.  Capped at 8 devices.
    """
    if len(rnd.devices) > BRUTE_FORCE_DEVICE_CAP:
        raise ValueError(
            f"brute force capped at {BRUTE_FORCE_DEVICE_CAP} devices, got {len(rnd.devices)}"
        )
    dev = {d.id: d for d in rnd.devices}
    task = {t.owner: t for t in rnd.tasks}
    owners = sorted(task)
    owner_set = set(owners)
    conn = rnd.connectivity

    def offload_cost(i: int, j: int) -> float:
        r = conn.rate(i, j)
        return offload_energy(dev[i], dev[j], task[i], r, r).total

    local_cost = {i: local_energy(dev[i], task[i]).total for i in owners}

    best_total = math.inf
    best_exec: dict[int, int] = {}
    best_energy: dict[int, float] = {}
    cur_exec: dict[int, int] = {}
    cur_energy: dict[int, float] = {}
    used_idle: set[int] = set()

    def recurse(pos: int, acc: float) -> None:
        nonlocal best_total, best_exec, best_energy
        while pos < len(owners) and owners[pos] in cur_exec:
            pos += 1
        if pos == len(owners):
            if acc < best_total:
                best_total = acc
                best_exec = dict(cur_exec)
                best_energy = dict(cur_energy)
            return
        i = owners[pos]

        def attempt(j: int, cost_i: float, partner_cost: float | None = None) -> None:
            cur_exec[i] = j
            cur_energy[i] = cost_i
            extra = cost_i
            if partner_cost is not None:
                cur_exec[j] = i
                cur_energy[j] = partner_cost
                extra += partner_cost
            elif j != i:
                used_idle.add(j)
            recurse(pos + 1, acc + extra)
            del cur_exec[i]
            del cur_energy[i]
            if partner_cost is not None:
                del cur_exec[j]
                del cur_energy[j]
            elif j != i:
                used_idle.discard(j)

        attempt(i, local_cost[i])
        for j in conn.neighbors(i):
            if j in owner_set:
                if j > i and j not in cur_exec:
                    attempt(j, offload_cost(i, j), offload_cost(j, i))
            elif j not in used_idle:
                attempt(j, offload_cost(i, j))

    recurse(0, 0.0)
    return Assignment(executors=best_exec, energies=best_energy, total_energy=best_total)


def all_local_assignment(rnd: Round) -> Assignment:
    """Every owner executes its own task; the baseline of baselines."""
    dev = {d.id: d for d in rnd.devices}
    energies = {t.owner: local_energy(dev[t.owner], t).total for t in rnd.tasks}
    executors = {i: i for i in energies}
    return Assignment(
        executors=executors, energies=energies, total_energy=sum(energies.values())
    )


def all_local_energy(rnd: Round) -> float:
    return all_local_assignment(rnd).total_energy


def total_energy(a: Assignment) -> float:
    return a.total_energy


def saving_ratio(scheme_energy: float, all_local: float) -> float:
    """Fractional energy saved vs everyone running locally.

    1 - E_scheme / E_all_local, defined as 0 when there is nothing to
    execute (all_local = 0).
    """
    if all_local == 0.0:
        return 0.0
    return 1.0 - scheme_energy / all_local


SCHEMES: dict[str, Callable[..., Assignment]] = {
    "optimal": assign_optimal,
    "greedy": assign_greedy,
    "reciprocal": assign_reciprocal,
    "random": assign_random,
}
