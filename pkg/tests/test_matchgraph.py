"""Reduction tests: graph construction, decoding, and assignment round-trips.

The round-trip suite enumerates every perfect matching of built graphs on
small rounds and checks the decoded assignments are exactly the feasible
assignments, with matching weight equal to assignment energy.
"""

import math

import numpy as np
import pytest

from d2dmatch import (
    PURE_CPU,
    Assignment,
    ConnectivityGraph,
    CoverageError,
    DeviceProfile,
    InconsistentRoundError,
    Round,
    ScenarioConfig,
    Task,
    build,
    build_connectivity,
    decode,
    generate_devices,
    generate_round,
    local_energy,
    offload_energy,
    validate_assignment,
)
from d2dmatch.matchgraph import (
    CASE_EXCHANGE,
    CASE_IDLE,
    CASE_LOCAL,
    CASE_OFFLOAD,
    IDLE_DUMMY,
    REAL,
    REPLICA,
)


def device(dev_id, load=0.4, cellular_rate=5e6, position=(0.0, 0.0)):
    return DeviceProfile(
        id=dev_id, cpu_capacity=2e9, load=load, compute_power=0.9,
        cellular_tx_power=0.6, cellular_rate=cellular_rate,
        d2d_tx_power=0.2, d2d_rx_power=0.2, position=position,
    )


def cpu_task(owner, size=8e6):
    return Task(owner=owner, input_size=size, cpu_cycles=3000 * size,
                output_size=0.2 * size, cellular_traffic=0.0, kind=PURE_CPU)


def five_device_round():
    """Line 1-2-3-4-5 plus idle-idle chord (1,4); tasks at 2 and 3 only.

    Device 5 neighbors only the idle device 4, so it can never execute
    anything and must be pruned; the (1,4) edge joins two idles and must
    not appear as a decision edge.
    """
    devices = tuple(device(i, load=0.1 * i) for i in range(1, 6))
    tasks = (cpu_task(2), cpu_task(3))
    conn = ConnectivityGraph(
        device_ids=(1, 2, 3, 4, 5),
        rates={(1, 2): 2e7, (2, 3): 3e7, (3, 4): 2.5e7, (4, 5): 2e7, (1, 4): 1e7},
    )
    return Round(devices=devices, tasks=tasks, connectivity=conn)


def all_perfect_matchings(node_count, edges):
    """Yield every perfect matching as a frozenset of edge positions."""
    adj = [[] for _ in range(node_count)]
    for pos, (u, v, _w) in enumerate(edges):
        adj[u].append((v, pos))
        adj[v].append((u, pos))
    matched = [False] * node_count
    chosen = []

    def recurse():
        u = next((v for v in range(node_count) if not matched[v]), -1)
        if u == -1:
            yield frozenset(chosen)
            return
        matched[u] = True
        for (v, pos) in adj[u]:
            if not matched[v]:
                matched[v] = True
                chosen.append(pos)
                yield from recurse()
                chosen.pop()
                matched[v] = False
        matched[u] = False

    yield from recurse()


def all_feasible_assignments(rnd):
    """Every feasible executor map, enumerated straight from the constraints."""
    owners = sorted(t.owner for t in rnd.tasks)
    owner_set = set(owners)
    conn = rnd.connectivity
    out = []
    cur = {}
    used_idle = set()

    def recurse(pos):
        while pos < len(owners) and owners[pos] in cur:
            pos += 1
        if pos == len(owners):
            out.append(dict(cur))
            return
        i = owners[pos]
        cur[i] = i
        recurse(pos + 1)
        del cur[i]
        for j in conn.neighbors(i):
            if j in owner_set:
                if j > i and j not in cur:
                    cur[i], cur[j] = j, i
                    recurse(pos + 1)
                    del cur[i], cur[j]
            elif j not in used_idle:
                cur[i] = j
                used_idle.add(j)
                recurse(pos + 1)
                del cur[i]
                used_idle.discard(j)

    recurse(0)
    return out


def small_random_round(rng, n_max=6):
    n = int(rng.integers(1, n_max + 1))
    side = float(rng.choice([100.0, 250.0, 400.0]))
    cfg = ScenarioConfig(
        device_count=n, area=(side, side),
        task_frequency=float(rng.choice([0.4, 0.7, 1.0])), rng_seed=0,
    )
    devices = generate_devices(cfg, rng)
    return generate_round(devices, cfg, rng)


class TestBuild:
    def test_prunes_idles_without_owner_neighbors(self):
        g = build(*(lambda r: (r.connectivity, r.tasks, r.devices))(five_device_round()))
        kept = {node.device for node in g.nodes if node.kind == REAL}
        assert kept == {1, 2, 3, 4}
        kinds = {(node.kind, node.device) for node in g.nodes}
        assert (REPLICA, 2) in kinds and (REPLICA, 3) in kinds
        assert (IDLE_DUMMY, 1) in kinds and (IDLE_DUMMY, 4) in kinds
        assert not any(node.device == 5 for node in g.nodes)

    def test_edge_cases_and_weights(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices)
        dev = {d.id: d for d in rnd.devices}
        task = {t.owner: t for t in rnd.tasks}
        by_case = {}
        for pos, (u, v, w) in enumerate(g.edges):
            key = (g.nodes[u].kind, g.nodes[u].device, g.nodes[v].kind, g.nodes[v].device)
            by_case.setdefault(g.cases[pos], []).append((key, w))

        locals_ = {(k[1], w) for (k, w) in by_case[CASE_LOCAL]}
        assert locals_ == {
            (2, local_energy(dev[2], task[2]).total),
            (3, local_energy(dev[3], task[3]).total),
        }

        offloads = {(k[1], k[3]): w for (k, w) in by_case[CASE_OFFLOAD]}
        e21 = offload_energy(dev[2], dev[1], task[2], 2e7, 2e7).total
        e34 = offload_energy(dev[3], dev[4], task[3], 2.5e7, 2.5e7).total
        assert math.isclose(offloads[(1, 2)], e21, rel_tol=1e-12)
        assert math.isclose(offloads[(3, 4)], e34, rel_tol=1e-12)

        (key, w), = by_case[CASE_EXCHANGE]
        e23 = offload_energy(dev[2], dev[3], task[2], 3e7, 3e7).total
        e32 = offload_energy(dev[3], dev[2], task[3], 3e7, 3e7).total
        assert math.isclose(w, e23 + e32, rel_tol=1e-12)

        # idle edges: one private mate per kept device plus one zero-weight
        # mirror per decision edge; the idle-idle link (1,4) adds nothing
        assert all(w == 0.0 for (_k, w) in by_case[CASE_IDLE]
                   if _k[0] != REAL or _k[2] != REPLICA)
        decision_devices = {(1, 2), (2, 3), (3, 4)}
        mirrors = {
            (min(k[1], k[3]), max(k[1], k[3]))
            for (k, _w) in by_case[CASE_IDLE]
            if k[0] in (REPLICA, IDLE_DUMMY) and k[2] in (REPLICA, IDLE_DUMMY)
        }
        assert mirrors == decision_devices

    def test_no_tasks_builds_empty_graph(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, (), rnd.devices)
        assert g.nodes == () and g.edges == ()

    def test_isolated_owners_get_local_edges_only(self):
        devices = (device(0), device(1))
        tasks = (cpu_task(0), cpu_task(1))
        conn = ConnectivityGraph(device_ids=(0, 1), rates={})
        g = build(conn, tasks, devices)
        assert len(g.nodes) == 4
        assert all(case == CASE_LOCAL for case in g.cases)
        assert len(g.edges) == 2

    def test_inconsistent_rounds_rejected(self):
        devices = (device(0),)
        conn = ConnectivityGraph(device_ids=(0,), rates={})
        with pytest.raises(InconsistentRoundError):
            build(conn, (cpu_task(5),), devices)
        with pytest.raises(InconsistentRoundError):
            build(conn, (cpu_task(0), cpu_task(0)), devices)

    def test_node_index_lookup(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices)
        for pos, node in enumerate(g.nodes):
            assert g.index_of(node.kind, node.device) == pos

    def test_injected_energy_callbacks(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices,
                  local_fn=lambda d, t: 7.0,
                  offload_fn=lambda o, x, t, rij, rji: 1.0)
        for pos, (_u, _v, w) in enumerate(g.edges):
            if g.cases[pos] == CASE_LOCAL:
                assert w == 7.0
            elif g.cases[pos] == CASE_OFFLOAD:
                assert w == 1.0
            elif g.cases[pos] == CASE_EXCHANGE:
                assert w == 2.0


class TestDecode:
    def test_local_plus_offload(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices)
        pairs = [
            (g.index_of(REAL, 2), g.index_of(REPLICA, 2)),
            (g.index_of(REAL, 3), g.index_of(REAL, 4)),
        ]
        a = decode(g, pairs)
        assert a.executors == {2: 2, 3: 4}
        assert math.isclose(a.energies[2], g.pair_energy[(2, 2)])
        assert math.isclose(a.energies[3], g.pair_energy[(3, 4)])
        assert validate_assignment(rnd, a) == []

    def test_all_local(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices)
        pairs = [
            (g.index_of(REAL, 2), g.index_of(REPLICA, 2)),
            (g.index_of(REAL, 3), g.index_of(REPLICA, 3)),
        ]
        a = decode(g, pairs)
        assert a.executors == {2: 2, 3: 3}
        assert math.isclose(
            a.total_energy, g.pair_energy[(2, 2)] + g.pair_energy[(3, 3)]
        )

    def test_exchange_counted_once_per_direction(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices)
        pairs = [(g.index_of(REAL, 2), g.index_of(REAL, 3))]
        a = decode(g, pairs)
        assert a.executors == {2: 3, 3: 2}
        assert math.isclose(
            a.total_energy, g.pair_energy[(2, 3)] + g.pair_energy[(3, 2)]
        )

    def test_mirror_edges_decode_to_nothing(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices)
        pairs = [
            (g.index_of(REAL, 2), g.index_of(REAL, 3)),
            (g.index_of(REPLICA, 2), g.index_of(REPLICA, 3)),
            (g.index_of(REAL, 1), g.index_of(IDLE_DUMMY, 1)),
            (g.index_of(REAL, 4), g.index_of(IDLE_DUMMY, 4)),
        ]
        a = decode(g, pairs)
        assert a.executors == {2: 3, 3: 2}

    def test_unmatched_owner_is_coverage_error(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices)
        pairs = [(g.index_of(REAL, 2), g.index_of(REPLICA, 2))]
        with pytest.raises(CoverageError):
            decode(g, pairs)

    def test_non_edge_pair_rejected(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices)
        with pytest.raises(ValueError):
            decode(g, [(g.index_of(REAL, 2), g.index_of(IDLE_DUMMY, 4))])


class TestRoundTrip:
    def test_matchings_decode_to_exactly_the_feasible_assignments(self):
        rng = np.random.default_rng(55)
        checked_rounds = 0
        for _ in range(60):
            rnd = small_random_round(rng)
            if not rnd.tasks:
                continue
            g = build(rnd.connectivity, rnd.tasks, rnd.devices)
            weight = {pos: w for pos, (_u, _v, w) in enumerate(g.edges)}
            decoded = {}
            for matching in all_perfect_matchings(len(g.nodes), g.edges):
                pairs = [(g.edges[pos][0], g.edges[pos][1]) for pos in matching]
                a = decode(g, pairs)
                assert validate_assignment(rnd, a) == []
                total_w = sum(weight[pos] for pos in matching)
                assert math.isclose(a.total_energy, total_w,
                                    rel_tol=1e-9, abs_tol=1e-9)
                key = frozenset(a.executors.items())
                decoded.setdefault(key, a.total_energy)
            feasible = {
                frozenset(m.items()) for m in all_feasible_assignments(rnd)
            }
            assert set(decoded) == feasible
            checked_rounds += 1
        assert checked_rounds >= 30

    def test_min_matching_weight_equals_min_assignment_energy(self):
        rng = np.random.default_rng(66)
        for _ in range(40):
            rnd = small_random_round(rng, n_max=5)
            if not rnd.tasks:
                continue
            g = build(rnd.connectivity, rnd.tasks, rnd.devices)
            weight = {pos: w for pos, (_u, _v, w) in enumerate(g.edges)}
            best_matching = min(
                (sum(weight[pos] for pos in m)
                 for m in all_perfect_matchings(len(g.nodes), g.edges)),
                default=None,
            )
            assert best_matching is not None  # private mates guarantee one
            dev = {d.id: d for d in rnd.devices}
            task = {t.owner: t for t in rnd.tasks}

            def price(m):
                total = 0.0
                for i, j in m.items():
                    if i == j:
                        total += local_energy(dev[i], task[i]).total
                    else:
                        r = rnd.connectivity.rate(i, j)
                        total += offload_energy(dev[i], dev[j], task[i], r, r).total
                return total

            best_assignment = min(price(m) for m in all_feasible_assignments(rnd))
            assert math.isclose(best_matching, best_assignment,
                                rel_tol=1e-9, abs_tol=1e-9)


class TestValidate:
    def test_flags_every_violation_kind(self):
        rnd = five_device_round()

        a = Assignment(executors={2: 2}, energies={2: 1.0}, total_energy=1.0)
        assert any("unassigned" in v for v in validate_assignment(rnd, a))

        a = Assignment(executors={2: 2, 3: 3, 4: 1},
                       energies={2: 1.0, 3: 1.0, 4: 1.0}, total_energy=3.0)
        assert any("task-less" in v for v in validate_assignment(rnd, a))

        a = Assignment(executors={2: 9, 3: 3}, energies={2: 1.0, 3: 1.0},
                       total_energy=2.0)
        assert any("unknown device" in v for v in validate_assignment(rnd, a))

        a = Assignment(executors={2: 4, 3: 3}, energies={2: 1.0, 3: 1.0},
                       total_energy=2.0)
        assert any("without a D2D link" in v for v in validate_assignment(rnd, a))

        a = Assignment(executors={2: 3, 3: 3}, energies={2: 1.0, 3: 1.0},
                       total_energy=2.0)
        violations = validate_assignment(rnd, a)
        assert any("non-mutually" in v for v in violations)
        assert any("executes 2 tasks" in v for v in violations)

        a = Assignment(executors={2: 2, 3: 3}, energies={2: -1.0, 3: 1.0},
                       total_energy=0.0)
        assert any("negative or NaN" in v for v in validate_assignment(rnd, a))

        a = Assignment(executors={2: 2, 3: 3}, energies={2: 1.0, 3: 1.0},
                       total_energy=5.0)
        assert any("does not equal" in v for v in validate_assignment(rnd, a))

    def test_accepts_feasible(self):
        rnd = five_device_round()
        g = build(rnd.connectivity, rnd.tasks, rnd.devices)
        a = decode(g, [
            (g.index_of(REAL, 2), g.index_of(REAL, 1)),
            (g.index_of(REAL, 3), g.index_of(REAL, 4)),
        ])
        assert validate_assignment(rnd, a) == []
