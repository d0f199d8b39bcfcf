"""Multi-round experiment driver, aggregation, and result persistence.

`run_experiment` walks a mobile crowd through R rounds: step mobility,
resample loads and tasks, rebuild connectivity, then hand the identical
round to every configured scheme (verified by an input hash carried in
each record).  With incentives enabled, each scheme evolves its own
credit ledger: assignments differ between schemes, so their credit
histories must too.

Persistence is split by determinism: `rounds.csv` and `summary.csv`
contain only seed-reproducible numbers and are byte-identical across
reruns of one (config, seed); wall-clock measurements live apart in
`timing.csv`.  `manifest.json` records the full config for audit.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np

from . import __version__
from .incentive import CreditLedger, default_params, filter_round, record
from .matchgraph import Assignment
from .scenario import (
    Round,
    ScenarioConfig,
    generate_devices,
    generate_round,
    step_mobility,
    with_device_count,
)
from .schemes import (
    SCHEMES,
    all_local_energy,
    assign_optimal,
    assign_random,
    saving_ratio,
)

__all__ = [
    "ExperimentConfig",
    "RoundResult",
    "SchemeStats",
    "ExperimentSummary",
    "RoundObservation",
    "SWEEP_PARAMS",
    "round_hash",
    "run_experiment",
    "sweep",
    "write_outputs",
    "write_sweep_outputs",
]

ROUNDS_COLUMNS = (
    "round",
    "scheme",
    "tasks",
    "energy_j",
    "saving_ratio",
    "n_local",
    "n_offload",
    "n_exchange",
    "input_hash",
)
TIMING_COLUMNS = ("round", "scheme", "solve_ms")
SUMMARY_COLUMNS = (
    "scheme",
    "rounds",
    "mean_energy_j",
    "mean_saving_ratio",
    "ci_halfwidth",
)
SWEEP_COLUMNS = ("param", "value") + SUMMARY_COLUMNS

SWEEP_PARAMS = ("devices", "task-freq")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a scenario, how long to run it, and what to compare."""

    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    rounds: int = 100
    schemes: tuple[str, ...] = ("optimal", "greedy", "reciprocal", "random")
    incentive: bool = False
    incentive_alpha: float = 1.0
    incentive_beta_fraction: float = 0.5
    confidence: float = 0.90
    verify_certificates: bool = False
    jobs: int = 1
    out_dir: str | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if not self.schemes:
            raise ValueError("schemes must be nonempty")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown:
            raise ValueError(f"unknown schemes {unknown}; valid: {sorted(SCHEMES)}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ValueError(f"duplicate scheme names in {self.schemes}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must be in (0, 1), got {self.confidence}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")


@dataclass(frozen=True)
class RoundResult:
    """One scheme's outcome on one round; the raw record everything else derives from."""

    round_index: int
    scheme: str
    task_count: int
    total_energy_j: float
    saving_ratio: float
    solve_ms: float
    n_local: int
    n_offload: int
    n_exchange: int
    input_hash: str


@dataclass(frozen=True)
class SchemeStats:
    """Per-scheme aggregate over all rounds."""

    scheme: str
    rounds: int
    mean_energy_j: float
    mean_saving_ratio: float
    ci_halfwidth: float
    mean_solve_ms: float
    p50_solve_ms: float
    p95_solve_ms: float


@dataclass(frozen=True)
class RoundObservation:
    """Callback payload handed to an observer after each round (sequential runs)."""

    index: int
    rnd: Round
    inputs: Mapping[str, Round]
    assignments: Mapping[str, Assignment]
    ledgers: Mapping[str, CreditLedger] | None


@dataclass(frozen=True)
class ExperimentSummary:
    """Everything one experiment produced: config, raw records, aggregates."""

    config: ExperimentConfig
    results: tuple[RoundResult, ...]
    stats: tuple[SchemeStats, ...]
    final_ledgers: Mapping[str, CreditLedger] | None = None


def round_hash(rnd: Round) -> str:
    """Stable digest of one round's full input (devices, tasks, links)."""
    h = hashlib.sha256()
    for d in rnd.devices:
        h.update(
            f"d|{d.id}|{d.cpu_capacity!r}|{d.load!r}|{d.compute_power!r}"
            f"|{d.cellular_tx_power!r}|{d.cellular_rate!r}|{d.d2d_tx_power!r}"
            f"|{d.d2d_rx_power!r}|{d.position[0]!r}|{d.position[1]!r}\n".encode()
        )
    for t in rnd.tasks:
        h.update(
            f"t|{t.owner}|{t.input_size!r}|{t.cpu_cycles!r}|{t.output_size!r}"
            f"|{t.cellular_traffic!r}|{t.kind}\n".encode()
        )
    for (a, b) in sorted(rnd.connectivity.rates):
        h.update(f"e|{a}|{b}|{rnd.connectivity.rates[(a, b)]!r}\n".encode())
    return h.hexdigest()


def _breakdown(a: Assignment) -> tuple[int, int, int]:
    """Task counts by decision: (local, offload-to-idle, exchanged)."""
    owners = set(a.executors)
    n_local = n_offload = n_exchange = 0
    for i, j in a.executors.items():
        if i == j:
            n_local += 1
        elif j in owners:
            n_exchange += 1
        else:
            n_offload += 1
    return n_local, n_offload, n_exchange


def _run_schemes(
    index: int,
    rnd: Round,
    cfg: ExperimentConfig,
    random_rng: np.random.Generator,
    ledgers: dict[str, CreditLedger] | None,
) -> tuple[list[RoundResult], dict[str, Round], dict[str, Assignment]]:
    """Run every configured scheme on one round; returns records and raw outputs."""
    rhash = round_hash(rnd)
    e_local = all_local_energy(rnd)
    results = []
    inputs: dict[str, Round] = {}
    assignments: dict[str, Assignment] = {}
    for scheme in cfg.schemes:
        srnd = filter_round(rnd, ledgers[scheme]) if ledgers is not None else rnd
        inputs[scheme] = srnd
        t0 = time.perf_counter()
        if scheme == "optimal":
            a = assign_optimal(srnd, verify=cfg.verify_certificates)
        elif scheme == "random":
            a = assign_random(srnd, random_rng)
        else:
            a = SCHEMES[scheme](srnd)
        solve_ms = (time.perf_counter() - t0) * 1e3
        assignments[scheme] = a
        n_local, n_offload, n_exchange = _breakdown(a)
        results.append(
            RoundResult(
                round_index=index,
                scheme=scheme,
                task_count=len(rnd.tasks),
                total_energy_j=a.total_energy,
                saving_ratio=saving_ratio(a.total_energy, e_local),
                solve_ms=solve_ms,
                n_local=n_local,
                n_offload=n_offload,
                n_exchange=n_exchange,
                input_hash=rhash,
            )
        )
        if ledgers is not None:
            ledgers[scheme] = record(a, rnd.tasks, ledgers[scheme])
    return results, inputs, assignments


def _parallel_round(payload) -> list[RoundResult]:
    index, devices, gen_rng, random_ss, cfg = payload
    rnd = generate_round(list(devices), cfg.scenario, gen_rng)
    results, _inputs, _assignments = _run_schemes(
        index, rnd, cfg, np.random.default_rng(random_ss), None
    )
    return results


def run_experiment(
    cfg: ExperimentConfig,
    observer: Callable[[RoundObservation], None] | None = None,
) -> ExperimentSummary:
    """Run R rounds of the scenario and aggregate per-scheme statistics.

    Everything is reproducible from the scenario's rng_seed: device
    initialization, per-round mobility and tasks, and the random scheme's
    draws all flow from independent derived streams.  `observer`, if
    given, receives each round's full inputs and outputs (sequential mode
    only).  jobs > 1 distributes rounds over processes; wall-clock
    timings then reflect contention, so timing studies should use jobs=1.
    Parallel mode cannot run with incentives (the ledger is a sequential
    dependency between rounds) or an observer.
    """
    scen = cfg.scenario
    if cfg.jobs > 1 and (cfg.incentive or observer is not None):
        raise ValueError("jobs > 1 is incompatible with incentives or an observer")

    root = np.random.SeedSequence(scen.rng_seed)
    ss_init, ss_rounds, ss_random = root.spawn(3)
    round_streams = ss_rounds.spawn(cfg.rounds)
    random_streams = ss_random.spawn(cfg.rounds)

    devices = generate_devices(scen, np.random.default_rng(ss_init))
    ledgers: dict[str, CreditLedger] | None = None
    if cfg.incentive:
        params = default_params(
            scen, alpha=cfg.incentive_alpha, beta_fraction=cfg.incentive_beta_fraction
        )
        ids = [d.id for d in devices]
        ledgers = {s: CreditLedger.fresh(ids, params) for s in cfg.schemes}

    all_results: list[RoundResult] = []
    if cfg.jobs == 1:
        for r in range(1, cfg.rounds + 1):
            rng = np.random.default_rng(round_streams[r - 1])
            devices = step_mobility(devices, scen, rng)
            rnd = generate_round(devices, scen, rng)
            results, inputs, assignments = _run_schemes(
                r, rnd, cfg, np.random.default_rng(random_streams[r - 1]), ledgers
            )
            all_results.extend(results)
            if observer is not None:
                observer(
                    RoundObservation(
                        index=r,
                        rnd=rnd,
                        inputs=inputs,
                        assignments=assignments,
                        ledgers=dict(ledgers) if ledgers is not None else None,
                    )
                )
    else:
        # mobility chains round to round, so positions are advanced here
        # and each worker resumes the round's generator stream for tasks
        payloads = []
        for r in range(1, cfg.rounds + 1):
            rng = np.random.default_rng(round_streams[r - 1])
            devices = step_mobility(devices, scen, rng)
            payloads.append((r, tuple(devices), rng, random_streams[r - 1], cfg))
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            for results in pool.map(_parallel_round, payloads):
                all_results.extend(results)

    all_results.sort(key=lambda x: (x.round_index, cfg.schemes.index(x.scheme)))
    stats = tuple(
        _scheme_stats(all_results, s, cfg.confidence) for s in cfg.schemes
    )
    return ExperimentSummary(
        config=cfg,
        results=tuple(all_results),
        stats=stats,
        final_ledgers=dict(ledgers) if ledgers is not None else None,
    )


def _percentile(sorted_vals: list[float], q: float) -> float:
    # nearest-rank percentile; deterministic and simple
    if not sorted_vals:
        return 0.0
    rank = max(1, math.ceil(q * len(sorted_vals)))
    return sorted_vals[rank - 1]


def _scheme_stats(
    results: Iterable[RoundResult], scheme: str, confidence: float
) -> SchemeStats:
    rows = [r for r in results if r.scheme == scheme]
    savings = [r.saving_ratio for r in rows]
    energies = [r.total_energy_j for r in rows]
    times = sorted(r.solve_ms for r in rows)
    n = len(rows)
    sd = statistics.stdev(savings) if n > 1 else 0.0
    z = statistics.NormalDist().inv_cdf(0.5 + confidence / 2.0)
    return SchemeStats(
        scheme=scheme,
        rounds=n,
        mean_energy_j=statistics.fmean(energies),
        mean_saving_ratio=statistics.fmean(savings),
        ci_halfwidth=z * sd / math.sqrt(n),
        mean_solve_ms=statistics.fmean(times),
        p50_solve_ms=_percentile(times, 0.50),
        p95_solve_ms=_percentile(times, 0.95),
    )


def sweep(
    cfg: ExperimentConfig, parameter: str, values: Iterable
) -> list[tuple[float, ExperimentSummary]]:
    """Run one experiment per parameter value; returns (value, summary) pairs.

    `devices` rescales the crowd at fixed spatial density (area grows with
    the device count); `task-freq` varies the task generation frequency.
    Each value gets an independent seed derived from the base seed, so
    results are reproducible and uncorrelated across values.
    """
    values = list(values)
    if parameter not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; valid: {SWEEP_PARAMS}")
    if not values:
        raise ValueError("sweep needs at least one value")
    base = np.random.SeedSequence(cfg.scenario.rng_seed)
    children = base.spawn(len(values))
    out = []
    for v, child in zip(values, children):
        seed = int(child.generate_state(1, np.uint64)[0])
        if parameter == "devices":
            scen = with_device_count(cfg.scenario, int(v), fixed_density=True)
        else:
            scen = replace(cfg.scenario, task_frequency=float(v))
        scen = replace(scen, rng_seed=seed)
        out.append((float(v), run_experiment(replace(cfg, scenario=scen))))
    return out


# -- persistence ---------------------------------------------------------


def _cell(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _write_csv(path: Path, header: tuple[str, ...], rows: Iterable[tuple]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["scenario"]["processing_density"] = dict(d["scenario"]["processing_density"])
    return d


def _rounds_rows(results: Iterable[RoundResult]) -> list[tuple]:
    return [
        (
            r.round_index,
            r.scheme,
            r.task_count,
            r.total_energy_j,
            r.saving_ratio,
            r.n_local,
            r.n_offload,
            r.n_exchange,
            r.input_hash,
        )
        for r in results
    ]


def _summary_rows(stats: Iterable[SchemeStats]) -> list[tuple]:
    return [
        (s.scheme, s.rounds, s.mean_energy_j, s.mean_saving_ratio, s.ci_halfwidth)
        for s in stats
    ]


def _timing_rows(summary: ExperimentSummary) -> list[tuple]:
    rows: list[tuple] = [
        (r.round_index, r.scheme, r.solve_ms) for r in summary.results
    ]
    for s in summary.stats:
        rows.append(("mean", s.scheme, s.mean_solve_ms))
        rows.append(("p50", s.scheme, s.p50_solve_ms))
        rows.append(("p95", s.scheme, s.p95_solve_ms))
    return rows


def write_outputs(summary: ExperimentSummary, out_dir: str | Path) -> list[Path]:
    """Write rounds/summary/timing/manifest files; returns the paths written.

    CSV format writes rounds.csv, summary.csv, timing.csv; JSON format
    writes the same records as .json files.  manifest.json and (with
    incentives) ledgers.json are always JSON.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fmt = summary.config.format
    written: list[Path] = []

    if fmt == "csv":
        p = out / "rounds.csv"
        _write_csv(p, ROUNDS_COLUMNS, _rounds_rows(summary.results))
        written.append(p)
        p = out / "summary.csv"
        _write_csv(p, SUMMARY_COLUMNS, _summary_rows(summary.stats))
        written.append(p)
        p = out / "timing.csv"
        _write_csv(p, TIMING_COLUMNS, _timing_rows(summary))
        written.append(p)
    else:
        p = out / "rounds.json"
        p.write_text(
            json.dumps(
                [
                    dict(zip(ROUNDS_COLUMNS, row))
                    for row in _rounds_rows(summary.results)
                ],
                indent=2,
                sort_keys=True,
            )
            + "\n",
            encoding="utf-8",
        )
        written.append(p)
        p = out / "summary.json"
        p.write_text(
            json.dumps(
                [dict(zip(SUMMARY_COLUMNS, row)) for row in _summary_rows(summary.stats)],
                indent=2,
                sort_keys=True,
            )
            + "\n",
            encoding="utf-8",
        )
        written.append(p)
        p = out / "timing.json"
        p.write_text(
            json.dumps(
                [dict(zip(TIMING_COLUMNS, row)) for row in _timing_rows(summary)],
                indent=2,
                sort_keys=True,
            )
            + "\n",
            encoding="utf-8",
        )
        written.append(p)

    if summary.final_ledgers is not None:
        p = out / "ledgers.json"
        p.write_text(
            json.dumps(
                {s: led.as_dict() for s, led in sorted(summary.final_ledgers.items())},
                indent=2,
                sort_keys=True,
            )
            + "\n",
            encoding="utf-8",
        )
        written.append(p)

    manifest = {
        "version": __version__,
        "seed": summary.config.scenario.rng_seed,
        "config": _config_dict(summary.config),
        "files": sorted(p.name for p in written) + ["manifest.json"],
        "schema": {
            "rounds": list(ROUNDS_COLUMNS),
            "summary": list(SUMMARY_COLUMNS),
            "timing": list(TIMING_COLUMNS),
        },
        "notes": {
            "determinism": "rounds and summary files are reproducible from (config, seed); timing files hold wall-clock measurements and vary between runs",
        },
    }
    p = out / "manifest.json"
    p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(p)
    return written


def write_sweep_outputs(
    param: str,
    results: list[tuple[float, ExperimentSummary]],
    out_dir: str | Path,
    base_cfg: ExperimentConfig,
) -> list[Path]:
    """Write one plot-ready table: a row per (value, scheme), plus a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fmt = base_cfg.format
    rows: list[tuple] = []
    for value, summary in results:
        for s in summary.stats:
            rows.append(
                (param, value, s.scheme, s.rounds, s.mean_energy_j,
                 s.mean_saving_ratio, s.ci_halfwidth)
            )
    written: list[Path] = []
    if fmt == "csv":
        p = out / "sweep.csv"
        _write_csv(p, SWEEP_COLUMNS, rows)
        written.append(p)
    else:
        p = out / "sweep.json"
        p.write_text(
            json.dumps(
                [dict(zip(SWEEP_COLUMNS, row)) for row in rows],
                indent=2,
                sort_keys=True,
            )
            + "\n",
            encoding="utf-8",
        )
        written.append(p)
    manifest = {
        "version": __version__,
        "param": param,
        "values": [v for (v, _s) in results],
        "seed": base_cfg.scenario.rng_seed,
        "config": _config_dict(base_cfg),
        "files": sorted(p.name for p in written) + ["manifest.json"],
        "schema": {"sweep": list(SWEEP_COLUMNS)},
    }
    p = out / "manifest.json"
    p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(p)
    return written
