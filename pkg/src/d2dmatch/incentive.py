"""Resource tit-for-tat incentives: credit ledger and eligibility filter.

Devices earn contribution credit (Y) by executing others' tasks and
accrue consumption debt (X) when their own tasks run elsewhere, tracked
separately for CPU cycles and cellular bits.  A device stays eligible to
offload while alpha * X <= beta + Y holds for both resources; ineligible
owners keep computing locally until their balance recovers.  The filter
runs before assignment: it removes the D2D options of ineligible owners,
so every scheme downstream automatically respects the policy.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .matchgraph import Assignment
from .scenario import ConnectivityGraph, Round, ScenarioConfig
from .model import HYBRID, PURE_CELLULAR, PURE_CPU, Task

__all__ = [
    "TitForTatParams",
    "CreditLedger",
    "mean_task_demand",
    "default_params",
    "eligible",
    "record",
    "filter_round",
]


@dataclass(frozen=True)
class TitForTatParams:
    """Eligibility coefficients: alpha scales consumption, beta is slack.

    Alphas are dimensionless in [0, 1]; betas carry resource units
    (cycles, bits) and act as the credit a device may consume before
    contributing anything.
    """

    alpha_cpu: float = 1.0
    beta_cpu: float = 0.0
    alpha_cell: float = 1.0
    beta_cell: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha_cpu", "alpha_cell"):
            a = getattr(self, name)
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {a}")
        for name in ("beta_cpu", "beta_cell"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class CreditLedger:
    """Cumulative per-device credit state; update with `record`.

    X counters accumulate resources a device consumed from others (its
    tasks' cycles and bits executed elsewhere); Y counters accumulate
    what it contributed by executing for others.  Counters only grow.
    """

    params: Mapping[int, TitForTatParams]
    x_cpu: Mapping[int, float] = field(default_factory=dict)
    y_cpu: Mapping[int, float] = field(default_factory=dict)
    x_cell: Mapping[int, float] = field(default_factory=dict)
    y_cell: Mapping[int, float] = field(default_factory=dict)

    @classmethod
    def fresh(
        cls,
        device_ids: Iterable[int],
        params: TitForTatParams | Mapping[int, TitForTatParams],
    ) -> "CreditLedger":
        """Zeroed ledger; `params` may be shared or per-device."""
        ids = list(device_ids)
        if isinstance(params, TitForTatParams):
            params = {i: params for i in ids}
        else:
            missing = [i for i in ids if i not in params]
            if missing:
                raise ValueError(f"no tit-for-tat params for devices {missing}")
        return cls(params=dict(params))

    def totals(self) -> tuple[float, float, float, float]:
        """(sum X_cpu, sum Y_cpu, sum X_cell, sum Y_cell) over all devices."""
        return (
            sum(self.x_cpu.values()),
            sum(self.y_cpu.values()),
            sum(self.x_cell.values()),
            sum(self.y_cell.values()),
        )

    def as_dict(self) -> dict:
        """JSON-friendly audit dump of counters and parameters."""
        return {
            "params": {
                str(i): {
                    "alpha_cpu": p.alpha_cpu,
                    "beta_cpu": p.beta_cpu,
                    "alpha_cell": p.alpha_cell,
                    "beta_cell": p.beta_cell,
                }
                for i, p in sorted(self.params.items())
            },
            "x_cpu": {str(i): v for i, v in sorted(self.x_cpu.items())},
            "y_cpu": {str(i): v for i, v in sorted(self.y_cpu.items())},
            "x_cell": {str(i): v for i, v in sorted(self.x_cell.items())},
            "y_cell": {str(i): v for i, v in sorted(self.y_cell.items())},
        }


def mean_task_demand(cfg: ScenarioConfig) -> tuple[float, float]:
    """Expected (CPU cycles, cellular bits) of one task under the config."""
    mean_size = 0.5 * (cfg.input_size_range[0] + cfg.input_size_range[1])
    p_cpu, p_cell, p_hyb = cfg.task_type_mix
    cycles = mean_size * (
        p_cpu * cfg.processing_density.get(PURE_CPU, 0.0)
        + p_hyb * cfg.processing_density.get(HYBRID, 0.0)
    )
    bits = mean_size * (p_cell + p_hyb * cfg.hybrid_cellular_ratio)
    return cycles, bits


def default_params(
    cfg: ScenarioConfig,
    alpha: float = 1.0,
    beta_fraction: float = 0.5,
) -> TitForTatParams:
    """Params whose beta slack equals `beta_fraction` of one mean task.

    A fractional beta anchored to the mean task demand gives fresh
    devices roughly one task's worth of credit to bootstrap with.
    """
    if not 0.0 <= beta_fraction <= 1.0:
        raise ValueError(f"beta_fraction must be in [0, 1], got {beta_fraction}")
    cycles, bits = mean_task_demand(cfg)
    return TitForTatParams(
        alpha_cpu=alpha,
        beta_cpu=beta_fraction * cycles,
        alpha_cell=alpha,
        beta_cell=beta_fraction * bits,
    )


def eligible(device_id: int, ledger: CreditLedger) -> bool:
    """True when the device may offload: alpha*X <= beta + Y for both resources."""
    p = ledger.params[device_id]
    x_cpu = ledger.x_cpu.get(device_id, 0.0)
    y_cpu = ledger.y_cpu.get(device_id, 0.0)
    x_cell = ledger.x_cell.get(device_id, 0.0)
    y_cell = ledger.y_cell.get(device_id, 0.0)
    return (
        p.alpha_cpu * x_cpu <= p.beta_cpu + y_cpu
        and p.alpha_cell * x_cell <= p.beta_cell + y_cell
    )


def record(
    assignment: Assignment, tasks: Iterable[Task], ledger: CreditLedger
) -> CreditLedger:
    """Credit one round's offloads; returns a new ledger (input unchanged).

    For every task executed away from its owner, the owner's X counters
    grow by the task's demand and the executor's Y counters by the same
    amount, so the grand totals stay balanced by construction.
    """
    x_cpu = dict(ledger.x_cpu)
    y_cpu = dict(ledger.y_cpu)
    x_cell = dict(ledger.x_cell)
    y_cell = dict(ledger.y_cell)
    by_owner = {t.owner: t for t in tasks}
    for i, j in sorted(assignment.executors.items()):
        if i == j:
            continue
        t = by_owner[i]
        x_cpu[i] = x_cpu.get(i, 0.0) + t.cpu_cycles
        y_cpu[j] = y_cpu.get(j, 0.0) + t.cpu_cycles
        x_cell[i] = x_cell.get(i, 0.0) + t.cellular_traffic
        y_cell[j] = y_cell.get(j, 0.0) + t.cellular_traffic
    return CreditLedger(
        params=ledger.params, x_cpu=x_cpu, y_cpu=y_cpu, x_cell=x_cell, y_cell=y_cell
    )


def filter_round(rnd: Round, ledger: CreditLedger) -> Round:
    """Strip the D2D options of ineligible task owners.

    Removes every connectivity edge incident to an ineligible owner, so
    downstream schemes can only run those tasks locally.  Devices without
    tasks are untouched: executing for others is how they earn credit.
    """
    owners = {t.owner for t in rnd.tasks}
    blocked = {i for i in owners if not eligible(i, ledger)}
    if not blocked:
        return rnd
    rates = {
        (a, b): r
        for (a, b), r in rnd.connectivity.rates.items()
        if a not in blocked and b not in blocked
    }
    graph = ConnectivityGraph(
        device_ids=rnd.connectivity.device_ids, rates=rates
    )
    return replace(rnd, connectivity=graph)
