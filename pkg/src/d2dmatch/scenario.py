"""Randomized scenario generation: devices, tasks, connectivity, mobility.

A scenario is a crowd of mobile devices in a rectangular area.  Each round,
devices own tasks with a fixed frequency, D2D links exist between devices
within radio range, and link rates follow a Shannon-capacity model.  All
sampling goes through a caller-supplied numpy Generator, so a fixed seed
reproduces every artifact bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .model import HYBRID, PURE_CELLULAR, PURE_CPU, DeviceProfile, Task

__all__ = [
    "ScenarioConfig",
    "ConnectivityGraph",
    "Round",
    "d2d_rate",
    "generate_devices",
    "build_connectivity",
    "generate_tasks",
    "step_mobility",
    "generate_round",
    "with_device_count",
]

# 1 KB = 8192 bits; input sizes span 500 KB to 2000 KB
_DEFAULT_INPUT_RANGE = (500 * 8192.0, 2000 * 8192.0)


def _check_range(name: str, rng: tuple[float, float], lo_ok: float = 0.0) -> None:
    if len(rng) != 2 or rng[0] > rng[1]:
        raise ValueError(f"{name} must be (min, max) with min <= max, got {rng}")
    if rng[0] < lo_ok:
        raise ValueError(f"{name} minimum must be >= {lo_ok}, got {rng[0]}")


@dataclass(frozen=True)
class ScenarioConfig:
    """All knobs of the simulated crowd; defaults follow the reference setup.

    Sizes are bits, rates bits/s, powers watts, distances meters, CPU
    figures cycles and cycles/s.  `task_type_mix` orders probabilities as
    (pure-cpu, pure-cellular, hybrid).  `processing_density` maps task
    kind to cycles/bit; kinds missing from the map get density 0.
    """

    device_count: int = 50
    area: tuple[float, float] = (500.0, 500.0)
    max_d2d_distance: float = 200.0
    d2d_bandwidth: float = 2.0e7
    path_loss_exponent: float = 3.0
    noise: float = 1.0e-8
    task_frequency: float = 0.5
    task_type_mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    input_size_range: tuple[float, float] = _DEFAULT_INPUT_RANGE
    processing_density: Mapping[str, float] = field(
        default_factory=lambda: {PURE_CPU: 3000.0, HYBRID: 1000.0}
    )
    output_ratio: float = 0.2
    hybrid_cellular_ratio: float = 0.1
    cellular_rate_range: tuple[float, float] = (1.0e6, 1.0e7)
    load_range: tuple[float, float] = (0.0, 0.7)
    cpu_capacity: float = 2.0e9
    compute_power: float = 0.9
    cellular_power: float = 0.6
    d2d_power: float = 0.2
    mobility_speed_range: tuple[float, float] = (0.0, 50.0)
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.device_count < 0:
            raise ValueError(f"device_count must be >= 0, got {self.device_count}")
        if len(self.area) != 2 or self.area[0] <= 0 or self.area[1] <= 0:
            raise ValueError(f"area must be positive (width, height), got {self.area}")
        for name in ("max_d2d_distance", "d2d_bandwidth", "path_loss_exponent",
                     "noise", "cpu_capacity"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("compute_power", "cellular_power", "d2d_power",
                     "output_ratio", "hybrid_cellular_ratio"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0.0 <= self.task_frequency <= 1.0:
            raise ValueError(f"task_frequency must be in [0, 1], got {self.task_frequency}")
        if len(self.task_type_mix) != 3 or any(q < 0 for q in self.task_type_mix):
            raise ValueError(f"task_type_mix must be 3 probabilities, got {self.task_type_mix}")
        if abs(sum(self.task_type_mix) - 1.0) > 1e-9:
            raise ValueError(f"task_type_mix must sum to 1, got {self.task_type_mix}")
        _check_range("input_size_range", self.input_size_range)
        if self.input_size_range[0] <= 0:
            raise ValueError("input_size_range minimum must be > 0")
        _check_range("cellular_rate_range", self.cellular_rate_range)
        if self.cellular_rate_range[0] <= 0:
            raise ValueError("cellular_rate_range minimum must be > 0")
        _check_range("load_range", self.load_range)
        if self.load_range[1] >= 1.0:
            raise ValueError("load_range maximum must be < 1 (some CPU must remain)")
        _check_range("mobility_speed_range", self.mobility_speed_range)
        for kind, dens in self.processing_density.items():
            if dens < 0:
                raise ValueError(f"processing density for {kind} must be >= 0, got {dens}")


@dataclass(frozen=True)
class ConnectivityGraph:
    """Symmetric D2D reachability with per-edge rates.

    Edges are stored once under the (min id, max id) key; `rate` and
    `has_edge` accept either orientation.
    """

    device_ids: tuple[int, ...]
    rates: Mapping[tuple[int, int], float]

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.rates or (j, i) in self.rates

    def rate(self, i: int, j: int) -> float:
        r = self.rates.get((i, j))
        if r is None:
            r = self.rates.get((j, i))
        if r is None:
            raise KeyError(f"no D2D edge between {i} and {j}")
        return r

    def neighbors(self, i: int) -> tuple[int, ...]:
        out = [b for (a, b) in self.rates if a == i]
        out.extend(a for (a, b) in self.rates if b == i)
        return tuple(sorted(out))

    def neighbor_map(self) -> dict[int, list[int]]:
        nbrs: dict[int, list[int]] = {i: [] for i in self.device_ids}
        for (a, b) in self.rates:
            nbrs[a].append(b)
            nbrs[b].append(a)
        for lst in nbrs.values():
            lst.sort()
        return nbrs

    @property
    def mean_degree(self) -> float:
        if not self.device_ids:
            return 0.0
        return 2.0 * len(self.rates) / len(self.device_ids)


@dataclass(frozen=True)
class Round:
    """One simulation round: the crowd, its tasks, and its D2D links."""

    devices: tuple[DeviceProfile, ...]
    tasks: tuple[Task, ...]
    connectivity: ConnectivityGraph


def d2d_rate(dist: float, cfg: ScenarioConfig) -> float:
    """Shannon-capacity D2D rate at a given link distance.

    D = W * log2(1 + P_tx * dist^-alpha / N0), with distance clamped to a
    1 m minimum so the path-loss term stays finite.  Raises ValueError
    outside (0, max_d2d_distance].
    """
    if dist <= 0.0:
        raise ValueError(f"distance must be > 0, got {dist}")
    if dist > cfg.max_d2d_distance:
        raise ValueError(
            f"distance {dist} exceeds max D2D distance {cfg.max_d2d_distance}"
        )
    d = max(dist, 1.0)
    snr = cfg.d2d_power * d ** (-cfg.path_loss_exponent) / cfg.noise
    return cfg.d2d_bandwidth * math.log2(1.0 + snr)


def generate_devices(cfg: ScenarioConfig, rng: np.random.Generator) -> list[DeviceProfile]:
    """Sample the crowd: uniform positions, loads, and cellular rates."""
    devices = []
    for i in range(cfg.device_count):
        x = rng.uniform(0.0, cfg.area[0])
        y = rng.uniform(0.0, cfg.area[1])
        load = rng.uniform(cfg.load_range[0], cfg.load_range[1])
        cell = rng.uniform(cfg.cellular_rate_range[0], cfg.cellular_rate_range[1])
        devices.append(
            DeviceProfile(
                id=i,
                cpu_capacity=cfg.cpu_capacity,
                load=load,
                compute_power=cfg.compute_power,
                cellular_tx_power=cfg.cellular_power,
                cellular_rate=cell,
                d2d_tx_power=cfg.d2d_power,
                d2d_rx_power=cfg.d2d_power,
                position=(x, y),
            )
        )
    return devices


def build_connectivity(
    devices: list[DeviceProfile], cfg: ScenarioConfig
) -> ConnectivityGraph:
    """Connect every device pair within radio range; annotate Shannon rates."""
    n = len(devices)
    ids = tuple(d.id for d in devices)
    if n < 2:
        return ConnectivityGraph(device_ids=ids, rates={})
    pos = np.array([d.position for d in devices], dtype=np.float64)
    iu, ju = np.triu_indices(n, k=1)
    diff = pos[iu] - pos[ju]
    dist = np.hypot(diff[:, 0], diff[:, 1])
    keep = dist <= cfg.max_d2d_distance
    d = np.maximum(dist[keep], 1.0)  # 1 m propagation floor
    snr = cfg.d2d_power * d ** (-cfg.path_loss_exponent) / cfg.noise
    rate = cfg.d2d_bandwidth * np.log2(1.0 + snr)
    rates: dict[tuple[int, int], float] = {}
    for a, b, r in zip(iu[keep], ju[keep], rate):
        rates[(ids[a], ids[b])] = float(r)
    return ConnectivityGraph(device_ids=ids, rates=rates)


def generate_tasks(
    devices: list[DeviceProfile], cfg: ScenarioConfig, rng: np.random.Generator
) -> list[Task]:
    """Each device owns a task with probability task_frequency.

    Kind follows task_type_mix; input size is uniform over the configured
    range; CPU cycles and cellular traffic derive from the kind:
    pure-cpu tasks compute only, pure-cellular tasks ship their input over
    the cellular link, hybrid tasks do both at reduced density.  Only
    kinds that produce a result return output over the D2D link.
    """
    c1 = cfg.task_type_mix[0]
    c2 = c1 + cfg.task_type_mix[1]
    tasks = []
    for dev in devices:
        if rng.random() >= cfg.task_frequency:
            continue
        u = rng.random()
        kind = PURE_CPU if u < c1 else (PURE_CELLULAR if u < c2 else HYBRID)
        size = rng.uniform(cfg.input_size_range[0], cfg.input_size_range[1])
        if kind == PURE_CPU:
            cycles = cfg.processing_density.get(PURE_CPU, 0.0) * size
            traffic = 0.0
        elif kind == PURE_CELLULAR:
            cycles = 0.0  # nothing to compute, the task is pure traffic
            traffic = size
        else:
            cycles = cfg.processing_density.get(HYBRID, 0.0) * size
            traffic = cfg.hybrid_cellular_ratio * size
        output = 0.0 if kind == PURE_CELLULAR else cfg.output_ratio * size
        tasks.append(
            Task(
                owner=dev.id,
                input_size=size,
                cpu_cycles=cycles,
                output_size=output,
                cellular_traffic=traffic,
                kind=kind,
            )
        )
    return tasks


def _reflect(x: float, hi: float) -> float:
    # Fold an out-of-bounds coordinate back into [0, hi].
    period = 2.0 * hi
    x = math.fmod(x, period)
    if x < 0.0:
        x += period
    return period - x if x > hi else x


def step_mobility(
    devices: list[DeviceProfile], cfg: ScenarioConfig, rng: np.random.Generator
) -> list[DeviceProfile]:
    """Move each device one bounded random step; resample its CPU load.

    Steps have uniform random heading and a length from
    mobility_speed_range; positions reflect off the area boundary.  Load
    resampling models run-time resource fluctuation between rounds.
    """
    out = []
    for dev in devices:
        speed = rng.uniform(cfg.mobility_speed_range[0], cfg.mobility_speed_range[1])
        heading = rng.uniform(0.0, 2.0 * math.pi)
        x = _reflect(dev.position[0] + speed * math.cos(heading), cfg.area[0])
        y = _reflect(dev.position[1] + speed * math.sin(heading), cfg.area[1])
        load = rng.uniform(cfg.load_range[0], cfg.load_range[1])
        out.append(replace(dev, position=(x, y), load=load))
    return out


def generate_round(
    devices: list[DeviceProfile], cfg: ScenarioConfig, rng: np.random.Generator
) -> Round:
    """Assemble one round from an existing crowd: tasks plus connectivity."""
    tasks = generate_tasks(devices, cfg, rng)
    graph = build_connectivity(devices, cfg)
    return Round(devices=tuple(devices), tasks=tuple(tasks), connectivity=graph)


def with_device_count(cfg: ScenarioConfig, n: int, fixed_density: bool = True) -> ScenarioConfig:
    """Rescale a config to n devices; by default the area grows with n so
    spatial density (and hence mean D2D degree) stays constant."""
    if not fixed_density or cfg.device_count == 0:
        return replace(cfg, device_count=n)
    scale = math.sqrt(n / cfg.device_count)
    return replace(
        cfg, device_count=n, area=(cfg.area[0] * scale, cfg.area[1] * scale)
    )
