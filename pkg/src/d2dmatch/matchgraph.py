"""Reduction between task assignment and minimum-weight perfect matching.

`build` turns one round (devices, tasks, D2D connectivity) into a weighted
matching graph whose minimum-weight perfect matching has the same total
weight as the energy-optimal feasible assignment; `decode` maps any
perfect matching back to a feasible assignment.

Construction, per round:
  1. prune task-less devices that neighbor no task owner (they can never
     execute anything);
  2. give every task owner a private replica node joined by a "local"
     edge weighted at the owner's local-execution energy;
  3. give every surviving task-less device a private idle-dummy node
     joined by a zero-weight "idle" edge ("stays idle");
  4. join owner-to-idle neighbors with "offload" edges (one-way energy)
     and owner-to-owner neighbors with "exchange" edges (both-way energy
     sum); edges between two idle devices are dropped;
  5. mirror every offload/exchange edge with a zero-weight edge between
     the two private mates, so the mates freed by a matched decision edge
     can pair off and the matching stays perfect whatever subset of
     decision edges an assignment uses.

Without step 5 the only perfect matching would be the all-local one: each
private mate has degree 1, so matching any decision edge would strand two
mates.  The mirror edges carry zero weight and decode to nothing, which
keeps the weight correspondence exact: min-weight perfect matching weight
equals the optimal assignment energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .model import DeviceProfile, Task, local_energy, offload_energy
from .scenario import ConnectivityGraph, Round

__all__ = [
    "REAL",
    "REPLICA",
    "IDLE_DUMMY",
    "CASE_LOCAL",
    "CASE_OFFLOAD",
    "CASE_EXCHANGE",
    "CASE_IDLE",
    "MatchNode",
    "MatchingGraph",
    "Assignment",
    "InconsistentRoundError",
    "CoverageError",
    "build",
    "decode",
    "validate_assignment",
]

REAL = "real"
REPLICA = "replica"
IDLE_DUMMY = "idle-dummy"

CASE_LOCAL = "local"
CASE_OFFLOAD = "offload"
CASE_EXCHANGE = "exchange"
CASE_IDLE = "idle"


class InconsistentRoundError(ValueError):
    """A task references a device that is not part of the round."""


class CoverageError(ValueError):
    """A matching left some task-owner node unmatched."""


@dataclass(frozen=True)
class MatchNode:
    """One matching-graph node: a device, its replica, or its idle dummy."""

    kind: str
    device: int

    def __post_init__(self) -> None:
        if self.kind not in (REAL, REPLICA, IDLE_DUMMY):
            raise ValueError(f"unknown node kind {self.kind!r}")


@dataclass(frozen=True)
class MatchingGraph:
    """Weighted matching graph for one round.

    `edges` holds (node index, node index, weight in joules) with the
    parallel `cases` tuple naming each edge's decision meaning.
    `pair_energy` keeps the directed per-task energies the weights were
    assembled from: (owner, owner) is local execution, (owner, executor)
    is one offload leg.  Baseline schemes read their candidate costs from
    here so every scheme prices decisions identically.
    """

    nodes: tuple[MatchNode, ...]
    edges: tuple[tuple[int, int, float], ...]
    cases: tuple[str, ...]
    pair_energy: Mapping[tuple[int, int], float]
    node_index: Mapping[tuple[str, int], int] = field(repr=False, default_factory=dict)

    def index_of(self, kind: str, device: int) -> int:
        return self.node_index[(kind, device)]


@dataclass(frozen=True)
class Assignment:
    """Feasible executor choice per task owner, with per-task energies.

    `executors[i] = j` reads: owner i's task runs on device j (j = i means
    local execution).  `energies[i]` is the full energy of running i's
    task under that choice, transfer included.
    """

    executors: Mapping[int, int]
    energies: Mapping[int, float]
    total_energy: float


_EnergyFn = Callable[[DeviceProfile, DeviceProfile, Task, float, float], float]


def _default_local(dev: DeviceProfile, task: Task) -> float:
    return local_energy(dev, task).total


def _default_offload(
    owner: DeviceProfile, executor: DeviceProfile, task: Task, r_ij: float, r_ji: float
) -> float:
    return offload_energy(owner, executor, task, r_ij, r_ji).total


def build(
    graph: ConnectivityGraph,
    tasks: Iterable[Task],
    devices: Iterable[DeviceProfile],
    local_fn: Callable[[DeviceProfile, Task], float] = _default_local,
    offload_fn: _EnergyFn = _default_offload,
) -> MatchingGraph:
    """Build the matching graph for one round.

    Energy callbacks default to the energy model and exist so tests can
    inject hand-picked weights.  Raises InconsistentRoundError when a task
    references an unknown device or a device owns two tasks.
    """
    dev_by_id: dict[int, DeviceProfile] = {}
    for d in devices:
        dev_by_id[d.id] = d
    task_by_owner: dict[int, Task] = {}
    for t in tasks:
        if t.owner not in dev_by_id:
            raise InconsistentRoundError(f"task owner {t.owner} is not a known device")
        if t.owner in task_by_owner:
            raise InconsistentRoundError(f"device {t.owner} owns more than one task")
        task_by_owner[t.owner] = t

    owners = set(task_by_owner)
    nbrs = graph.neighbor_map()
    # prune: keep owners, and idles adjacent to at least one owner
    kept = sorted(
        i
        for i in dev_by_id
        if i in owners or any(j in owners for j in nbrs.get(i, ()))
    )
    kept_set = set(kept)

    nodes: list[MatchNode] = [MatchNode(REAL, i) for i in kept]
    for i in kept:
        nodes.append(MatchNode(REPLICA if i in owners else IDLE_DUMMY, i))
    n_kept = len(kept)
    real_idx = {i: pos for pos, i in enumerate(kept)}
    mate_idx = {i: n_kept + pos for pos, i in enumerate(kept)}
    node_index = {(node.kind, node.device): pos for pos, node in enumerate(nodes)}

    edges: list[tuple[int, int, float]] = []
    cases: list[str] = []
    pair_energy: dict[tuple[int, int], float] = {}

    for i in kept:
        if i in owners:
            e_local = local_fn(dev_by_id[i], task_by_owner[i])
            pair_energy[(i, i)] = e_local
            edges.append((real_idx[i], mate_idx[i], e_local))
            cases.append(CASE_LOCAL)
        else:
            edges.append((real_idx[i], mate_idx[i], 0.0))
            cases.append(CASE_IDLE)

    for (i, j) in sorted(graph.rates):
        if i not in kept_set or j not in kept_set:
            continue
        i_owns, j_owns = i in owners, j in owners
        if not i_owns and not j_owns:
            continue  # two idles can never carry a task
        rate = graph.rate(i, j)
        if i_owns:
            e_ij = offload_fn(dev_by_id[i], dev_by_id[j], task_by_owner[i], rate, rate)
            pair_energy[(i, j)] = e_ij
        if j_owns:
            e_ji = offload_fn(dev_by_id[j], dev_by_id[i], task_by_owner[j], rate, rate)
            pair_energy[(j, i)] = e_ji
        if i_owns and j_owns:
            edges.append((real_idx[i], real_idx[j], e_ij + e_ji))
            cases.append(CASE_EXCHANGE)
        elif i_owns:
            edges.append((real_idx[i], real_idx[j], e_ij))
            cases.append(CASE_OFFLOAD)
        else:
            edges.append((real_idx[i], real_idx[j], e_ji))
            cases.append(CASE_OFFLOAD)
        # zero-weight mirror between the two private mates keeps the
        # matching perfect when this decision edge is chosen
        edges.append((mate_idx[i], mate_idx[j], 0.0))
        cases.append(CASE_IDLE)

    return MatchingGraph(
        nodes=tuple(nodes),
        edges=tuple(edges),
        cases=tuple(cases),
        pair_energy=pair_energy,
        node_index=node_index,
    )


def decode(
    mgraph: MatchingGraph, matching_pairs: Iterable[tuple[int, int]]
) -> Assignment:
    """Map a perfect matching of the graph back to a feasible assignment.

    Local edges become self-assignments, offload edges send the owner's
    task to the idle endpoint, exchange edges swap the two owners' tasks,
    and idle/mirror edges decode to nothing.  Raises CoverageError when a
    task-owner node is unmatched and ValueError on pairs that are not
    edges of the graph.
    """
    by_key: dict[tuple[int, int], int] = {}
    for pos, (u, v, _w) in enumerate(mgraph.edges):
        by_key[(u, v)] = pos
        by_key[(v, u)] = pos

    executors: dict[int, int] = {}
    energies: dict[int, float] = {}
    for (a, b) in matching_pairs:
        pos = by_key.get((a, b))
        if pos is None:
            raise ValueError(f"matched pair ({a}, {b}) is not an edge of the graph")
        case = mgraph.cases[pos]
        na, nb = mgraph.nodes[a], mgraph.nodes[b]
        if case == CASE_LOCAL:
            i = na.device
            executors[i] = i
            energies[i] = mgraph.pair_energy[(i, i)]
        elif case == CASE_OFFLOAD:
            i, j = na.device, nb.device
            if (i, j) not in mgraph.pair_energy:
                i, j = j, i
            executors[i] = j
            energies[i] = mgraph.pair_energy[(i, j)]
        elif case == CASE_EXCHANGE:
            i, j = na.device, nb.device
            executors[i] = j
            executors[j] = i
            energies[i] = mgraph.pair_energy[(i, j)]
            energies[j] = mgraph.pair_energy[(j, i)]
        # CASE_IDLE pairs (idle-dummy and mirror edges) carry no decision

    # every owner's real node must have been matched on a decision edge
    owners = {node.device for node in mgraph.nodes if node.kind == REPLICA}
    missing = owners - set(executors)
    if missing:
        raise CoverageError(f"task owners {sorted(missing)} received no executor")

    total = sum(energies.values())
    return Assignment(executors=executors, energies=energies, total_energy=total)


def validate_assignment(rnd: Round, assignment: Assignment) -> list[str]:
    """Check an assignment against the feasibility constraints.

    Returns a list of human-readable violations (empty = feasible):
    cross-device choices must follow live D2D links, every task must be
    assigned exactly once, no device may execute two tasks, and a pair of
    task owners may only cross-assign mutually.
    """
    violations: list[str] = []
    owners = {t.owner for t in rnd.tasks}
    device_ids = {d.id for d in rnd.devices}
    ex = assignment.executors

    missing = owners - set(ex)
    if missing:
        violations.append(f"tasks of owners {sorted(missing)} are unassigned")
    extra = set(ex) - owners
    if extra:
        violations.append(f"assignments exist for task-less devices {sorted(extra)}")

    load: dict[int, int] = {}
    for i, j in ex.items():
        if j not in device_ids:
            violations.append(f"owner {i} assigned to unknown device {j}")
            continue
        load[j] = load.get(j, 0) + 1
        if i != j:
            if not rnd.connectivity.has_edge(i, j):
                violations.append(f"owner {i} assigned to {j} without a D2D link")
            if j in owners and ex.get(j) != i:
                violations.append(f"owners {i} and {j} cross-assigned non-mutually")
    for j, count in load.items():
        if count > 1:
            violations.append(f"device {j} executes {count} tasks")

    bad_energy = [i for i, e in assignment.energies.items() if not e >= 0.0]
    if bad_energy:
        violations.append(f"negative or NaN energies for owners {sorted(bad_energy)}")
    if abs(assignment.total_energy - sum(assignment.energies.values())) > 1e-9 * max(
        1.0, abs(assignment.total_energy)
    ):
        violations.append("total energy does not equal the sum of per-task energies")
    return violations
