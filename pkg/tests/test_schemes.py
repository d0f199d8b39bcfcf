"""Scheme tests: optimality, baseline semantics, dominance, oracle agreement."""

import math

import numpy as np
import pytest

from d2dmatch import (
    PURE_CELLULAR,
    PURE_CPU,
    SCHEMES,
    ConnectivityGraph,
    DeviceProfile,
    Round,
    ScenarioConfig,
    Task,
    all_local_assignment,
    all_local_energy,
    assign_greedy,
    assign_optimal,
    assign_random,
    assign_reciprocal,
    brute_force_assignment,
    generate_devices,
    generate_round,
    local_energy,
    offload_energy,
    saving_ratio,
    validate_assignment,
)


def device(dev_id, load=0.4, cellular_rate=5e6, position=(0.0, 0.0)):
    return DeviceProfile(
        id=dev_id, cpu_capacity=2e9, load=load, compute_power=0.9,
        cellular_tx_power=0.6, cellular_rate=cellular_rate,
        d2d_tx_power=0.2, d2d_rx_power=0.2, position=position,
    )


def cpu_task(owner, cycles, size=8e6):
    return Task(owner=owner, input_size=size, cpu_cycles=cycles,
                output_size=0.2 * size, cellular_traffic=0.0, kind=PURE_CPU)


def cell_task(owner, size=8e6):
    return Task(owner=owner, input_size=size, cpu_cycles=0.0,
                output_size=0.0, cellular_traffic=size, kind=PURE_CELLULAR)


def random_round(rng, n_max=10):
    n = int(rng.integers(1, n_max + 1))
    side = float(rng.choice([100.0, 250.0, 400.0]))
    cfg = ScenarioConfig(
        device_count=n, area=(side, side),
        task_frequency=float(rng.choice([0.3, 0.5, 0.8, 1.0])), rng_seed=0,
    )
    devices = generate_devices(cfg, rng)
    return generate_round(devices, cfg, rng)


class TestOptimal:
    def test_lone_owner_runs_locally(self):
        rnd = Round(
            devices=(device(0, load=0.6),),
            tasks=(cpu_task(0, 2.4e10),),
            connectivity=ConnectivityGraph(device_ids=(0,), rates={}),
        )
        a = assign_optimal(rnd)
        assert a.executors == {0: 0}
        assert math.isclose(a.total_energy, all_local_energy(rnd))

    def test_takes_cheaper_offload(self):
        # executor idle at load 0, owner heavily loaded: offloading wins
        rnd = Round(
            devices=(device(0, load=0.7), device(1, load=0.0)),
            tasks=(cpu_task(0, 2.4e10),),
            connectivity=ConnectivityGraph(device_ids=(0, 1), rates={(0, 1): 1e8}),
        )
        a = assign_optimal(rnd)
        assert a.executors == {0: 1}
        dev = {d.id: d for d in rnd.devices}
        want = offload_energy(dev[0], dev[1], rnd.tasks[0], 1e8, 1e8).total
        assert math.isclose(a.total_energy, want, rel_tol=1e-12)

    def test_keeps_local_when_offload_costs_more(self):
        # slow link makes the transfer dearer than the local compute gap
        rnd = Round(
            devices=(device(0, load=0.1), device(1, load=0.0)),
            tasks=(cpu_task(0, 1e9),),
            connectivity=ConnectivityGraph(device_ids=(0, 1), rates={(0, 1): 1e5}),
        )
        a = assign_optimal(rnd)
        assert a.executors == {0: 0}


class TestGreedy:
    def blocking_round(self):
        """The cheapest edge steals the shared idle device from a better plan.

        B's offload to X is globally cheapest, but taking it forces A to a
        far dearer second option; the optimum gives X to A and runs B on
        its own still-decent CPU.
        """
        devices = (
            device(0, load=0.6),   # owner A, local is expensive
            device(1, load=0.3),   # owner B, local is acceptable
            device(2, load=0.0),   # idle X, the contested executor
            device(3, load=0.5),   # idle Y, A's fallback executor
        )
        tasks = (cpu_task(0, 2.4e10), cpu_task(1, 1.8e10))
        conn = ConnectivityGraph(
            device_ids=(0, 1, 2, 3),
            rates={(0, 2): 2e7, (0, 3): 2e7, (1, 2): 2e7},
        )
        return Round(devices=devices, tasks=tasks, connectivity=conn)

    def test_blocking_instance_beats_greedy(self):
        rnd = self.blocking_round()
        greedy = assign_greedy(rnd)
        optimal = assign_optimal(rnd)
        oracle = brute_force_assignment(rnd)
        assert math.isclose(optimal.total_energy, oracle.total_energy, rel_tol=1e-9)
        assert greedy.total_energy > optimal.total_energy + 1.0
        # greedy grabbed the globally cheapest edge (B -> X) first
        assert greedy.executors[1] == 2
        assert optimal.executors == {0: 2, 1: 1}
        assert validate_assignment(rnd, greedy) == []

    def test_accepts_cheap_offload(self):
        rnd = Round(
            devices=(device(0, load=0.7), device(1, load=0.0)),
            tasks=(cpu_task(0, 2.4e10),),
            connectivity=ConnectivityGraph(device_ids=(0, 1), rates={(0, 1): 1e8}),
        )
        a = assign_greedy(rnd)
        assert a.executors == {0: 1}

    def test_no_tasks_is_empty(self):
        rnd = Round(
            devices=(device(0), device(1)),
            tasks=(),
            connectivity=ConnectivityGraph(device_ids=(0, 1), rates={(0, 1): 1e7}),
        )
        a = assign_greedy(rnd)
        assert a.executors == {} and a.total_energy == 0.0

    def test_never_worse_than_all_local(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            rnd = random_round(rng)
            if not rnd.tasks:
                continue
            a = assign_greedy(rnd)
            assert a.total_energy <= all_local_energy(rnd) * (1 + 1e-12)
            assert saving_ratio(a.total_energy, all_local_energy(rnd)) >= -1e-12


class TestReciprocal:
    def reciprocal_round(self):
        """Complementary owners: 0 has CPU headroom but a slow cellular link
        and owns pure traffic; 1 has a fast link but a busy CPU and owns
        pure compute.  Exchanging helps both; neither direction alone would.
        """
        devices = (
            device(0, load=0.0, cellular_rate=1e6),
            device(1, load=0.8, cellular_rate=1e7),
        )
        tasks = (cell_task(0), cpu_task(1, 2.4e10))
        conn = ConnectivityGraph(device_ids=(0, 1), rates={(0, 1): 2e7})
        return Round(devices=devices, tasks=tasks, connectivity=conn)

    def test_mutual_improvement_exchanged(self):
        rnd = self.reciprocal_round()
        a = assign_reciprocal(rnd)
        assert a.executors == {0: 1, 1: 0}
        dev = {d.id: d for d in rnd.devices}
        t = {t.owner: t for t in rnd.tasks}
        e01 = offload_energy(dev[0], dev[1], t[0], 2e7, 2e7).total
        e10 = offload_energy(dev[1], dev[0], t[1], 2e7, 2e7).total
        assert e01 < local_energy(dev[0], t[0]).total
        assert e10 < local_energy(dev[1], t[1]).total
        assert math.isclose(a.total_energy, e01 + e10, rel_tol=1e-12)

    def test_one_sided_gain_stays_local(self):
        # both own compute; only the busier device would benefit
        devices = (device(0, load=0.7), device(1, load=0.1))
        tasks = (cpu_task(0, 2.4e10), cpu_task(1, 2.4e10))
        conn = ConnectivityGraph(device_ids=(0, 1), rates={(0, 1): 1e8})
        a = assign_reciprocal(Round(devices=devices, tasks=tasks, connectivity=conn))
        assert a.executors == {0: 0, 1: 1}

    def test_ignores_idle_neighbors(self):
        # reciprocal trades only owner-to-owner; idle helpers are off-limits
        rnd = Round(
            devices=(device(0, load=0.7), device(1, load=0.0)),
            tasks=(cpu_task(0, 2.4e10),),
            connectivity=ConnectivityGraph(device_ids=(0, 1), rates={(0, 1): 1e8}),
        )
        a = assign_reciprocal(rnd)
        assert a.executors == {0: 0}

    def test_never_worse_than_all_local(self):
        rng = np.random.default_rng(32)
        for _ in range(100):
            rnd = random_round(rng)
            if not rnd.tasks:
                continue
            a = assign_reciprocal(rnd)
            assert a.total_energy <= all_local_energy(rnd) * (1 + 1e-12)


class TestRandomScheme:
    def test_reproducible_under_seed(self):
        rng = np.random.default_rng(77)
        rnd = random_round(rng, n_max=12)
        a = assign_random(rnd, np.random.default_rng(5))
        b = assign_random(rnd, np.random.default_rng(5))
        assert a.executors == b.executors
        assert a.total_energy == b.total_energy

    def test_no_idle_neighbors_all_local(self):
        devices = (device(0, load=0.6), device(1, load=0.6))
        tasks = (cpu_task(0, 1e10), cpu_task(1, 1e10))
        conn = ConnectivityGraph(device_ids=(0, 1), rates={(0, 1): 1e8})
        a = assign_random(Round(devices=devices, tasks=tasks, connectivity=conn),
                          np.random.default_rng(0))
        assert a.executors == {0: 0, 1: 1}

    def test_feasible_and_owner_free(self):
        rng = np.random.default_rng(33)
        for _ in range(100):
            rnd = random_round(rng)
            if not rnd.tasks:
                continue
            a = assign_random(rnd, rng)
            assert validate_assignment(rnd, a) == []
            owners = {t.owner for t in rnd.tasks}
            for i, j in a.executors.items():
                assert i == j or j not in owners

    def test_expected_total_at_least_optimal(self):
        rng = np.random.default_rng(34)
        rnd = random_round(rng, n_max=10)
        while not rnd.tasks:
            rnd = random_round(rng, n_max=10)
        opt = assign_optimal(rnd).total_energy
        totals = [assign_random(rnd, rng).total_energy for _ in range(200)]
        assert np.mean(totals) >= opt - 1e-9


class TestDominanceAndOracle:
    def test_optimal_dominates_everything(self):
        rng = np.random.default_rng(35)
        for _ in range(150):
            rnd = random_round(rng, n_max=12)
            opt = assign_optimal(rnd).total_energy
            tol = 1e-9 * max(1.0, opt)
            assert opt <= assign_greedy(rnd).total_energy + tol
            assert opt <= assign_reciprocal(rnd).total_energy + tol
            assert opt <= assign_random(rnd, rng).total_energy + tol
            assert opt <= all_local_energy(rnd) + tol

    def test_matches_brute_force(self):
        rng = np.random.default_rng(36)
        checked = 0
        for _ in range(200):
            rnd = random_round(rng, n_max=7)
            opt = assign_optimal(rnd, verify=True)
            oracle = brute_force_assignment(rnd)
            tol = 1e-9 * max(1.0, abs(oracle.total_energy))
            assert abs(opt.total_energy - oracle.total_energy) <= tol
            assert validate_assignment(rnd, opt) == []
            assert validate_assignment(rnd, oracle) == []
            if rnd.tasks:
                checked += 1
        assert checked >= 100

    def test_brute_force_cap(self):
        rng = np.random.default_rng(0)
        cfg = ScenarioConfig(device_count=9, rng_seed=0)
        devices = generate_devices(cfg, rng)
        rnd = generate_round(devices, cfg, rng)
        with pytest.raises(ValueError):
            brute_force_assignment(rnd)


class TestHelpers:
    def test_all_local_assignment(self):
        rnd = Round(
            devices=(device(0, load=0.5), device(1, load=0.5)),
            tasks=(cpu_task(0, 1e10), cpu_task(1, 2e10)),
            connectivity=ConnectivityGraph(device_ids=(0, 1), rates={(0, 1): 1e7}),
        )
        a = all_local_assignment(rnd)
        assert a.executors == {0: 0, 1: 1}
        dev = {d.id: d for d in rnd.devices}
        want = sum(local_energy(dev[t.owner], t).total for t in rnd.tasks)
        assert math.isclose(a.total_energy, want, rel_tol=1e-12)

    def test_saving_ratio_values(self):
        assert saving_ratio(10.0, 10.0) == 0.0
        assert saving_ratio(5.0, 10.0) == 0.5
        assert saving_ratio(0.0, 0.0) == 0.0
        assert saving_ratio(15.0, 10.0) == -0.5

    def test_scheme_registry(self):
        assert set(SCHEMES) == {"optimal", "greedy", "reciprocal", "random"}
