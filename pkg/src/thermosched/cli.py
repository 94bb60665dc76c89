"""Command-line entry point: run scenarios, validate them, check the solver.

Three subcommands:

  run       simulate a scenario and emit metrics.csv, summary.json, and
            normalized.csv into --out
  validate  cross-check a scenario document without simulating
  oracle    compare the iterative solver against brute-force enumeration
            on a small instance file

Any failure prints a single-line JSON error object and exits nonzero.
Outputs are byte-stable for a fixed scenario, seed, and flag set: rows
are emitted in sorted order and floats use repr round-tripping.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .admm import admm_solve
from .errors import ThermoschedError
from .oracle import instance_from_json, oracle_solve
from .scheduling import MODE_WEIGHTS, ObjectiveWeights
from .simulator import RunSummary, Scenario, run_simulation, ttft_stats
from .scenario import SCHEMA_VERSION, load_scenario, validate_scenario

METRICS_COLUMNS = (
    "epoch",
    "site_id",
    "mode",
    "e_it_kwh",
    "e_crac_kwh",
    "e_cooling_kwh",
    "e_cond_kwh",
    "e_total_kwh",
    "cost",
    "w_evap_l",
    "w_blowdown_l",
    "w_grid_l",
    "c_grid_kg",
    "c_water_kg",
    "ttft_mean_s",
    "ttft_p95_s",
    "requests",
    "schema_version",
)

NORMALIZED_COLUMNS = ("metric", "mode", "value", "schema_version")


def _fmt(v: float) -> str:
    return repr(float(v))


def write_metrics_csv(path, summary: RunSummary) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        for label in sorted(summary.epoch_metrics):
            for m in sorted(summary.epoch_metrics[label], key=lambda m: m.epoch):
                for site_id in sorted(m.energy):
                    e = m.energy[site_id]
                    w = m.water[site_id]
                    c = m.carbon[site_id]
                    mean, p95 = ttft_stats(m.site_ttfts[site_id])
                    writer.writerow(
                        [
                            m.epoch,
                            site_id,
                            label,
                            _fmt(e.e_it),
                            _fmt(e.e_crac),
                            _fmt(e.e_cooling),
                            _fmt(e.e_conditioning),
                            _fmt(e.e_total),
                            _fmt(m.site_cost[site_id]),
                            _fmt(w.w_evap_l),
                            _fmt(w.w_blowdown_l),
                            _fmt(w.w_grid_l),
                            _fmt(c.c_grid_kg),
                            _fmt(c.c_water_kg),
                            _fmt(mean),
                            _fmt(p95),
                            len(m.site_ttfts[site_id]),
                            SCHEMA_VERSION,
                        ]
                    )


def write_normalized_csv(path, summary: RunSummary) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(NORMALIZED_COLUMNS)
        for metric in sorted(summary.normalized):
            for label in sorted(summary.normalized[metric]):
                writer.writerow(
                    [metric, label, _fmt(summary.normalized[metric][label]), SCHEMA_VERSION]
                )


def _echo_parameters(scenario: Scenario, seed) -> dict:
    env_samples = scenario.environment.samples.values()
    return {
        "epoch_hours": scenario.epoch_hours,
        "idle_floor": scenario.idle_floor,
        "scheduler": scenario.scheduler,
        "modes": list(scenario.run_labels()),
        "seed": seed,
        "admm": {
            "rho": scenario.admm_params.rho,
            "max_iters": scenario.admm_params.max_iters,
            "eps_primal": scenario.admm_params.eps_primal,
            "eps_dual": scenario.admm_params.eps_dual,
        },
        "sites": [
            {
                "site_id": s.site_id,
                "region": s.region,
                "node_count": s.node_count,
                "tdp_watts": s.node.tdp_watts,
                "bandwidth_bytes_per_s": s.node.bandwidth_bytes_per_s,
                "node_mem_capacity_bytes": s.node_mem_capacity_bytes,
                "state_proportions": {
                    "on": s.state_profile.on,
                    "idle": s.state_profile.idle,
                    "off": s.state_profile.off,
                },
                "water_heat_capacity_kwh_per_l": s.water.heat_capacity_kwh_per_l,
                "water_blowdown_ratio": s.water.blowdown_ratio,
                "cop_anchors": [list(a) for a in s.cop_curve.anchors],
            }
            for s in sorted(scenario.sites, key=lambda s: s.site_id)
        ],
        "profiles": [
            {
                "model_id": p.model_id,
                "param_bytes": p.param_bytes,
                "kv_bytes_per_token": p.kv_bytes_per_token,
                "prefill_rate_tokens_per_s": p.prefill_rate_tokens_per_s,
            }
            for p in sorted(scenario.profiles.values(), key=lambda p: p.model_id)
        ],
        "potable_ei_kwh_per_l": sorted({s.potable_ei_kwh_per_l for s in env_samples}),
        "wastewater_ei_kwh_per_l": sorted(
            {s.wastewater_ei_kwh_per_l for s in env_samples}
        ),
    }


def write_summary_json(path, summary: RunSummary, scenario: Scenario, seed) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "scenario": summary.scenario_name,
        "normalize_against": summary.normalize_against,
        "parameters": _echo_parameters(scenario, seed),
        "aggregates": {
            label: {
                "cost": agg.cost,
                "carbon_kg": agg.carbon_kg,
                "water_l": agg.water_l,
                "energy_kwh": agg.energy_kwh,
                "ttft_mean_s": agg.ttft_mean_s,
                "ttft_p95_s": agg.ttft_p95_s,
                "requests": agg.requests,
            }
            for label, agg in summary.aggregates.items()
        },
        "normalized": summary.normalized,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def cmd_run(args) -> int:
    modes = args.modes.split(",") if args.modes else None
    scenario = load_scenario(
        args.scenario, seed=args.seed, scheduler=args.scheduler, modes=modes
    )
    summary = run_simulation(scenario, normalize_against=args.normalize_against)
    os.makedirs(args.out, exist_ok=True)
    metrics_path = os.path.join(args.out, "metrics.csv")
    summary_path = os.path.join(args.out, "summary.json")
    normalized_path = os.path.join(args.out, "normalized.csv")
    write_metrics_csv(metrics_path, summary)
    write_summary_json(summary_path, summary, scenario, args.seed)
    write_normalized_csv(normalized_path, summary)
    for p in (metrics_path, summary_path, normalized_path):
        print(p)
    return 0


def cmd_validate(args) -> int:
    results = validate_scenario(args.scenario, seed=args.seed)
    ok = True
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
        ok = ok and r.ok
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    with open(args.instance) as fh:
        costs = instance_from_json(fh.read())
    weights = MODE_WEIGHTS.get(args.mode) or ObjectiveWeights(0.25, 0.25, 0.25, 0.25)
    oracle_value, _ = oracle_solve(costs, weights)
    report = admm_solve(costs, weights, mode=args.mode)
    gap = (report.objective_fractional - oracle_value) / max(abs(oracle_value), 1e-12)
    print(
        json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "instance": args.instance,
                "mode": args.mode,
                "oracle_objective": oracle_value,
                "admm_objective_fractional": report.objective_fractional,
                "admm_objective_integral": report.objective_integral,
                "relative_gap": gap,
                "iterations": report.iterations,
                "converged": report.converged,
            },
            sort_keys=True,
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermosched",
        description="Temperature-aware multi-objective scheduling simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate a scenario and emit metrics")
    run_p.add_argument("--scenario", required=True, help="scenario JSON path")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument(
        "--scheduler", choices=("admm", "queue-split", "flow-greedy"), default=None
    )
    run_p.add_argument("--modes", default=None, help="comma-separated run labels")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--normalize-against", default="queue-split")
    run_p.set_defaults(fn=cmd_run)

    val_p = sub.add_parser("validate", help="cross-check a scenario document")
    val_p.add_argument("--scenario", required=True)
    val_p.add_argument("--seed", type=int, default=None)
    val_p.set_defaults(fn=cmd_validate)

    orc_p = sub.add_parser("oracle", help="solver-vs-enumeration comparison")
    orc_p.add_argument("--instance", required=True, help="instance JSON path")
    orc_p.add_argument(
        "--mode", choices=tuple(MODE_WEIGHTS), default="opt-balance"
    )
    orc_p.set_defaults(fn=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ThermoschedError, OSError) as exc:
        print(
            json.dumps(
                {"error": type(exc).__name__, "message": str(exc)}, sort_keys=True
            )
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
