"""Device and task domain types plus closed-form energy accounting.

A device executes a task either locally (own CPU plus own cellular link)
or on a D2D neighbor that receives the input, computes, handles the
cellular traffic, and ships the output back.  Both paths reduce to a
handful of power-times-duration products over the task tuple
<input_size, cpu_cycles, output_size, cellular_traffic>.

All quantities are SI: cycles/second, bits/second, watts, joules.
Every type here is an immutable value object and every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PURE_CPU",
    "PURE_CELLULAR",
    "HYBRID",
    "TASK_KINDS",
    "DeviceProfile",
    "Task",
    "EnergyBreakdown",
    "CapacityExhaustedError",
    "RateError",
    "local_energy",
    "offload_energy",
]

PURE_CPU = "pure-cpu"
PURE_CELLULAR = "pure-cellular"
HYBRID = "hybrid"
TASK_KINDS = (PURE_CPU, PURE_CELLULAR, HYBRID)


class CapacityExhaustedError(ValueError):
    """A compute-bearing task was given to a device with zero available CPU."""


class RateError(ValueError):
    """A required transfer rate is zero or negative."""


@dataclass(frozen=True)
class DeviceProfile:
    """One device's compute, cellular, and D2D capabilities and power costs."""

    id: int
    cpu_capacity: float        # Z, cycles/s
    load: float                # delta, fraction of Z already busy
    compute_power: float       # watts drawn while computing
    cellular_tx_power: float   # watts drawn on the cellular link
    cellular_rate: float       # bits/s on the cellular link
    d2d_tx_power: float        # watts drawn while sending on a D2D link
    d2d_rx_power: float        # watts drawn while receiving on a D2D link
    position: tuple[float, float]  # meters (x, y)

    def __post_init__(self) -> None:
        if not 0.0 <= self.load <= 1.0:
            raise ValueError(f"load must be in [0, 1], got {self.load}")
        if self.cpu_capacity <= 0.0:
            raise ValueError(f"cpu_capacity must be > 0, got {self.cpu_capacity}")
        if self.cellular_rate <= 0.0:
            raise ValueError(f"cellular_rate must be > 0, got {self.cellular_rate}")
        for name in ("compute_power", "cellular_tx_power", "d2d_tx_power", "d2d_rx_power"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def available_capacity(self) -> float:
        """Cycles/s left over for one offloaded or local task: (1 - load) * Z."""
        return (1.0 - self.load) * self.cpu_capacity


@dataclass(frozen=True)
class Task:
    """One device's task: input bits, CPU cycles, output bits, cellular bits."""

    owner: int
    input_size: float       # I, bits shipped to the executor
    cpu_cycles: float       # Psi, cycles to compute
    output_size: float      # O, bits shipped back to the owner
    cellular_traffic: float  # B, bits the executor exchanges with the base station
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in TASK_KINDS:
            raise ValueError(f"kind must be one of {TASK_KINDS}, got {self.kind!r}")
        if self.input_size <= 0.0:
            raise ValueError("input_size must be > 0")
        if self.cpu_cycles < 0.0 or self.output_size < 0.0 or self.cellular_traffic < 0.0:
            raise ValueError("cpu_cycles, output_size, cellular_traffic must be >= 0")
        if self.kind == PURE_CPU and self.cellular_traffic != 0.0:
            raise ValueError("pure-cpu task must have cellular_traffic == 0")
        if self.kind == PURE_CELLULAR and self.cpu_cycles != 0.0:
            raise ValueError("pure-cellular task must have cpu_cycles == 0")


@dataclass(frozen=True)
class EnergyBreakdown:
    """Joules split into compute, cellular, and D2D transfer components."""

    compute: float
    cellular: float
    d2d_transfer: float
    total: float

    @classmethod
    def of(cls, compute: float, cellular: float, d2d_transfer: float) -> "EnergyBreakdown":
        return cls(compute, cellular, d2d_transfer, compute + cellular + d2d_transfer)

    def __post_init__(self) -> None:
        parts = self.compute + self.cellular + self.d2d_transfer
        if not math.isclose(self.total, parts, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError("total must equal the sum of its components")


def _compute_energy(executor: DeviceProfile, cycles: float) -> float:
    # cycles == 0 short-circuits so a fully loaded device can still hold an
    # empty-compute task without dividing by zero.
    if cycles == 0.0:
        return 0.0
    c = executor.available_capacity
    if c <= 0.0:
        raise CapacityExhaustedError(
            f"device {executor.id} has no available CPU capacity for {cycles} cycles"
        )
    return executor.compute_power * (cycles / c)


def _cellular_energy(executor: DeviceProfile, traffic: float) -> float:
    if traffic == 0.0:
        return 0.0
    return executor.cellular_tx_power * (traffic / executor.cellular_rate)


def local_energy(dev: DeviceProfile, task: Task) -> EnergyBreakdown:
    """Energy for `dev` to run its own task: CPU time plus cellular time.

    compute = compute_power * cpu_cycles / available_capacity
    cellular = cellular_tx_power * cellular_traffic / cellular_rate
    """
    if task.owner != dev.id:
        raise ValueError(f"task owner {task.owner} is not device {dev.id}")
    return EnergyBreakdown.of(
        compute=_compute_energy(dev, task.cpu_cycles),
        cellular=_cellular_energy(dev, task.cellular_traffic),
        d2d_transfer=0.0,
    )


def offload_energy(
    owner: DeviceProfile,
    executor: DeviceProfile,
    task: Task,
    rate_ij: float,
    rate_ji: float,
) -> EnergyBreakdown:
    """Energy for `executor` to run `owner`'s task over a D2D link.

    d2d_transfer covers both directions of the link:
        (owner tx + executor rx) * input_size / rate_ij
      + (executor tx + owner rx) * output_size / rate_ji
    compute and cellular are paid by the executor at its own capacity and
    cellular rate.  `rate_ji` may be 0 when the task returns no output.
    """
    if owner.id == executor.id:
        raise ValueError(f"owner and executor are the same device {owner.id}")
    if rate_ij <= 0.0:
        raise RateError(f"input transfer rate must be > 0, got {rate_ij}")
    transfer = (owner.d2d_tx_power + executor.d2d_rx_power) * (task.input_size / rate_ij)
    if task.output_size > 0.0:
        if rate_ji <= 0.0:
            raise RateError(f"output transfer rate must be > 0, got {rate_ji}")
        transfer += (executor.d2d_tx_power + owner.d2d_rx_power) * (task.output_size / rate_ji)
    return EnergyBreakdown.of(
        compute=_compute_energy(executor, task.cpu_cycles),
        cellular=_cellular_energy(executor, task.cellular_traffic),
        d2d_transfer=transfer,
    )
