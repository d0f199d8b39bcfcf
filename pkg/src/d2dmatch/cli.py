"""Command-line front end: run experiments, sweep parameters, self-verify.

Subcommands:
  run     one experiment -> rounds/summary/timing/manifest files
  sweep   one experiment per parameter value -> plot-ready sweep table
  verify  randomized self-checks of the optimal pipeline against
          brute-force oracles and the solver's dual certificates

Configuration comes from a JSON file whose keys mirror ExperimentConfig
(with a nested "scenario" object for ScenarioConfig); flags override the
file.  The D2DMATCH_OUT environment variable overrides the output
directory.  All randomness flows from one seed; no wall-clock seeding.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from .matchgraph import validate_assignment
from .matching import (
    CertificateError,
    MatchingInfeasibleError,
    WeightedGraph,
    brute_force_min_matching,
    min_weight_perfect_matching,
    verify_certificate,
)
from .scenario import ConnectivityGraph, Round, ScenarioConfig, generate_devices, generate_round
from .schemes import assign_optimal, brute_force_assignment
from .simkit import (
    SWEEP_PARAMS,
    ExperimentConfig,
    run_experiment,
    sweep,
    write_outputs,
    write_sweep_outputs,
)

__all__ = ["main", "console_main", "load_config"]

OUT_ENV_VAR = "D2DMATCH_OUT"

_SCENARIO_FIELDS = {f.name for f in fields(ScenarioConfig)}
_EXPERIMENT_FIELDS = {f.name for f in fields(ExperimentConfig)} - {"scenario"}
_TUPLE_FIELDS = {
    "area",
    "task_type_mix",
    "input_size_range",
    "cellular_rate_range",
    "load_range",
    "mobility_speed_range",
    "schemes",
}


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a JSON config file into an ExperimentConfig.

    Top-level keys are ExperimentConfig fields plus a nested "scenario"
    object with ScenarioConfig fields.  Unknown keys raise, naming the
    offender, so typos cannot silently fall back to defaults.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {p}")
    with p.open(encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"config root must be a JSON object, got {type(raw).__name__}")

    unknown = set(raw) - _EXPERIMENT_FIELDS - {"scenario"}
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}")
    scen_raw = raw.get("scenario", {})
    if not isinstance(scen_raw, dict):
        raise ValueError("'scenario' must be a JSON object")
    unknown = set(scen_raw) - _SCENARIO_FIELDS
    if unknown:
        raise ValueError(f"unknown scenario keys {sorted(unknown)}")

    scen_kwargs = {
        k: tuple(v) if k in _TUPLE_FIELDS and isinstance(v, list) else v
        for k, v in scen_raw.items()
    }
    exp_kwargs = {
        k: tuple(v) if k in _TUPLE_FIELDS and isinstance(v, list) else v
        for k, v in raw.items()
        if k != "scenario"
    }
    return ExperimentConfig(scenario=ScenarioConfig(**scen_kwargs), **exp_kwargs)


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    scen = cfg.scenario
    if args.seed is not None:
        scen = replace(scen, rng_seed=args.seed)
    updates: dict = {"scenario": scen}
    if args.rounds is not None:
        updates["rounds"] = args.rounds
    if args.schemes is not None:
        updates["schemes"] = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
    if args.incentive:
        updates["incentive"] = True
    if args.format is not None:
        updates["format"] = args.format
    if args.jobs is not None:
        updates["jobs"] = args.jobs
    if getattr(args, "verify_certificates", False):
        updates["verify_certificates"] = True
    if args.out is not None:
        updates["out_dir"] = args.out
    return replace(cfg, **updates)


def _resolve_out_dir(cfg: ExperimentConfig) -> Path:
    env = os.environ.get(OUT_ENV_VAR)
    if env:
        return Path(env)
    return Path(cfg.out_dir) if cfg.out_dir else Path("out")


def _load_base_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        return load_config(args.config)
    return ExperimentConfig()


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(_load_base_config(args), args)
    summary = run_experiment(cfg)
    out = _resolve_out_dir(cfg)
    written = write_outputs(summary, out)
    for s in summary.stats:
        print(
            f"{s.scheme}: mean saving {s.mean_saving_ratio:.4f} "
            f"(+-{s.ci_halfwidth:.4f}), mean energy {s.mean_energy_j:.3f} J, "
            f"mean solve {s.mean_solve_ms:.2f} ms over {s.rounds} rounds"
        )
    print(f"wrote {len(written)} files to {out}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(_load_base_config(args), args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        print(f"error: --values must be comma-separated numbers, got {args.values!r}",
              file=sys.stderr)
        return 1
    if args.param == "devices":
        bad = [v for v in values if v != int(v) or v < 1]
        if bad:
            print(f"error: device counts must be positive integers, got {bad}",
                  file=sys.stderr)
            return 1
    results = sweep(cfg, args.param, values)
    out = _resolve_out_dir(cfg)
    written = write_sweep_outputs(args.param, results, out, cfg)
    for value, summary in results:
        for s in summary.stats:
            print(f"{args.param}={value:g} {s.scheme}: mean saving {s.mean_saving_ratio:.4f}")
    print(f"wrote {len(written)} files to {out}")
    return 0


def _random_verify_round(rng: np.random.Generator, max_devices: int) -> Round:
    """Small random round with varied density and task pressure."""
    n = int(rng.integers(1, max_devices + 1))
    side = float(rng.choice([100.0, 200.0, 350.0]))
    p = float(rng.choice([0.3, 0.5, 0.8, 1.0]))
    cfg = ScenarioConfig(
        device_count=n,
        area=(side, side),
        task_frequency=p,
        rng_seed=0,  # unused: generation below consumes the caller's rng
    )
    devices = generate_devices(cfg, rng)
    return generate_round(devices, cfg, rng)


def _perturb_round(rnd: Round, rng: np.random.Generator) -> Round:
    """Scale one D2D rate; the perturbed instance prices offloads differently."""
    if not rnd.connectivity.rates:
        return rnd
    keys = sorted(rnd.connectivity.rates)
    k = keys[int(rng.integers(0, len(keys)))]
    rates = dict(rnd.connectivity.rates)
    rates[k] *= 1.25
    return replace(
        rnd,
        connectivity=ConnectivityGraph(
            device_ids=rnd.connectivity.device_ids, rates=rates
        ),
    )


def _random_even_graph(rng: np.random.Generator) -> WeightedGraph:
    n = int(rng.choice([2, 4, 6, 8, 10, 12]))
    density = float(rng.choice([0.3, 0.5, 0.8, 1.0]))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                edges.append((u, v, float(rng.uniform(0.0, 50.0))))
    return WeightedGraph(n, edges)


def cmd_verify(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    instances = args.instances

    # phase 1: assignment pipeline vs exhaustive assignment search
    agree = mismatch = 0
    for _ in range(instances):
        rnd = _random_verify_round(rng, args.max_devices)
        solver_input = _perturb_round(rnd, rng) if args.perturb else rnd
        opt = assign_optimal(solver_input, verify=True)
        oracle = brute_force_assignment(rnd)
        tol = 1e-9 * max(1.0, abs(oracle.total_energy))
        ok = abs(opt.total_energy - oracle.total_energy) <= tol
        ok = ok and not validate_assignment(rnd, oracle)
        ok = ok and not validate_assignment(rnd, opt)
        if ok:
            agree += 1
        else:
            mismatch += 1
    print(f"assignment oracle: {agree}/{instances} agreements, {mismatch} mismatches")

    # phase 2: matching solver vs exhaustive matching, with certificates
    m_ok = m_bad = 0
    for _ in range(instances):
        g = _random_even_graph(rng)
        try:
            oracle_w = brute_force_min_matching(g).weight
        except MatchingInfeasibleError:
            oracle_w = None
        try:
            m = min_weight_perfect_matching(g)
        except MatchingInfeasibleError:
            m = None
        if (m is None) != (oracle_w is None):
            m_bad += 1
            continue
        if m is None:
            m_ok += 1
            continue
        good = abs(m.weight - oracle_w) <= 1e-9 * max(1.0, abs(oracle_w))
        check_graph = g
        if args.perturb and m.pairs:
            # raise a matched edge's weight: its tightness check must trip
            target = m.pairs[0]
            bumped = [
                (u, v, w + 1.0 + 0.1 * max(e[2] for e in g.edges))
                if (u, v) == target
                else (u, v, w)
                for (u, v, w) in g.edges
            ]
            check_graph = WeightedGraph(g.node_count, bumped)
        try:
            verify_certificate(check_graph, m)
        except CertificateError:
            good = False
        if good:
            m_ok += 1
        else:
            m_bad += 1
    print(f"matching oracle + certificates: {m_ok}/{instances} clean, {m_bad} failures")

    if args.perturb:
        detected = mismatch + m_bad
        if detected > 0:
            print(f"negative control: perturbation detected in {detected} instances")
        else:
            print("negative control FAILED: no perturbation detected", file=sys.stderr)
        return 1  # perturbed runs never report a clean pass
    return 0 if mismatch == 0 and m_bad == 0 else 1


def _add_common_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (defaults used when omitted)")
    p.add_argument("--seed", type=int, help="override the scenario RNG seed")
    p.add_argument("--rounds", type=int, help="override the round count")
    p.add_argument("--schemes", help="comma-separated scheme subset to run")
    p.add_argument("--incentive", action="store_true", help="enable tit-for-tat incentives")
    p.add_argument("--out", help=f"output directory (overridden by ${OUT_ENV_VAR})")
    p.add_argument("--format", choices=("csv", "json"), help="output file format")
    p.add_argument("--jobs", type=int, help="parallel round workers (default 1)")
    p.add_argument(
        "--verify-certificates",
        action="store_true",
        help="check the solver's dual certificate on every optimal solve",
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="d2dmatch",
        description="Energy-optimal D2D task assignment simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one multi-round experiment")
    _add_common_run_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run one experiment per parameter value")
    _add_common_run_flags(p_sweep)
    p_sweep.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="randomized oracle and certificate checks")
    p_verify.add_argument("--instances", type=int, default=500)
    p_verify.add_argument("--max-devices", type=int, default=8)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument(
        "--perturb",
        action="store_true",
        help="negative control: inject a weight perturbation and expect detection",
    )
    p_verify.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
