"""Regenerate the bundled scenarios under scenarios/.

Three inputs ship with the repo:

  tiny         two sites, three epochs, six requests from a fixed trace
               file -- the smoke-test scenario the CLI tests lean on.
  twosite_temp two sites identical except ambient temperature (35 C vs
               -3.9 C, the CoP curve endpoints) -- isolates the
               temperature signal.
  aus20        twenty sites x 200 nodes across Australian regions, 24
               hourly epochs, synthetic trace -- the mode-comparison
               scenario. Cool southeastern sites sit near the dominant
               traffic origins; hot northern/inland sites are remote.

Everything is deterministic: fixed seeds, rounded values. Run from the
repo root:  python3 tools/gen_scenarios.py
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from thermosched.environment import ENVIRONMENT_COLUMNS
from thermosched.scenario import load_scenario
from thermosched.scheduling import nodes_for_request
from thermosched.workload import LATENCY_COLUMNS, TRACE_COLUMNS

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
OUT = os.path.join(ROOT, "scenarios")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------------------- tiny


def gen_tiny():
    out = os.path.join(OUT, "tiny")
    os.makedirs(out, exist_ok=True)

    env_rows = []
    for epoch in range(3):
        env_rows.append(["a", epoch, 12.0 + epoch, 0.22, 0.4, 0.15, 0.004, 0.001])
        env_rows.append(["b", epoch, 31.0 + epoch, 0.35, 0.8, 0.25, 0.004, 0.001])
    _write_csv(os.path.join(out, "environment.csv"), ENVIRONMENT_COLUMNS, env_rows)

    _write_csv(
        os.path.join(out, "latency.csv"),
        LATENCY_COLUMNS,
        [
            ["syd", "a", 0.010],
            ["syd", "b", 0.030],
            ["melb", "a", 0.020],
            ["melb", "b", 0.015],
        ],
    )

    trace = [
        ["req-000001", 0, "m-14b", 1000, 256, "syd"],
        ["req-000002", 0, "m-14b", 520, 180, "melb"],
        ["req-000003", 1, "m-14b", 760, 300, "syd"],
        ["req-000004", 1, "m-14b", 410, 120, "melb"],
        ["req-000005", 2, "m-14b", 980, 410, "syd"],
        ["req-000006", 2, "m-14b", 650, 256, "syd"],
    ]
    _write_csv(os.path.join(out, "trace.csv"), TRACE_COLUMNS, trace)

    _write_json(
        os.path.join(out, "scenario.json"),
        {
            "name": "tiny",
            "site_defaults": {
                "node_count": 8,
                "node": {"tdp_watts": 400.0, "bandwidth_bytes_per_s": 2.0e9},
                "node_mem_capacity_bytes": 8.0e10,
            },
            "sites": [
                {"site_id": "a", "region": "nsw"},
                {"site_id": "b", "region": "qld"},
            ],
            "profiles": [
                {
                    "model_id": "m-14b",
                    "param_bytes": 1.4e10,
                    "kv_bytes_per_token": 524288.0,
                    "prefill_rate_tokens_per_s": 2000.0,
                }
            ],
            "environment": "environment.csv",
            "latency": "latency.csv",
            "trace": {"file": "trace.csv"},
            "epoch_hours": 1.0,
        },
    )
    print("tiny: 2 sites x 3 epochs, 6 requests")


# ------------------------------------------------------------- twosite_temp


def gen_twosite_temp():
    out = os.path.join(OUT, "twosite_temp")
    os.makedirs(out, exist_ok=True)

    epochs = 6
    env_rows = []
    for epoch in range(epochs):
        # identical tariffs/intensities; only the thermometer differs
        env_rows.append(["hot", epoch, 35.0, 0.30, 0.7, 0.2, 0.004, 0.001])
        env_rows.append(["cold", epoch, -3.9, 0.30, 0.7, 0.2, 0.004, 0.001])
    _write_csv(os.path.join(out, "environment.csv"), ENVIRONMENT_COLUMNS, env_rows)

    _write_csv(
        os.path.join(out, "latency.csv"),
        LATENCY_COLUMNS,
        [["melb", "hot", 0.020], ["melb", "cold", 0.020]],
    )

    rng = np.random.default_rng(20)
    trace = []
    n = 0
    for epoch in range(epochs):
        for _ in range(4):
            n += 1
            trace.append(
                [
                    f"req-{n:06d}",
                    epoch,
                    "m-14b",
                    int(rng.integers(300, 1200)),
                    int(rng.integers(100, 500)),
                    "melb",
                ]
            )
    _write_csv(os.path.join(out, "trace.csv"), TRACE_COLUMNS, trace)

    _write_json(
        os.path.join(out, "scenario.json"),
        {
            "name": "twosite_temp",
            "site_defaults": {
                "node_count": 8,
                "node": {"tdp_watts": 400.0, "bandwidth_bytes_per_s": 2.0e9},
                "node_mem_capacity_bytes": 8.0e10,
            },
            "sites": [
                {"site_id": "cold", "region": "tas"},
                {"site_id": "hot", "region": "nt"},
            ],
            "profiles": [
                {
                    "model_id": "m-14b",
                    "param_bytes": 1.4e10,
                    "kv_bytes_per_token": 524288.0,
                    "prefill_rate_tokens_per_s": 2000.0,
                }
            ],
            "environment": "environment.csv",
            "latency": "latency.csv",
            "trace": {"file": "trace.csv"},
            "modes": ["opt-cost", "flow-greedy"],
            "epoch_hours": 1.0,
        },
    )
    print(f"twosite_temp: 2 sites x {epochs} epochs, {len(trace)} requests")


# -------------------------------------------------------------------- aus20


# site_id -> (lon, lat, state, mean temp C, daily swing C)
AUS_SITES = {
    "dc-01": (151.2, -33.9, "nsw", 14.0, 5.0),
    "dc-02": (150.9, -34.4, "nsw", 15.0, 5.0),
    "dc-03": (145.0, -37.8, "vic", 12.0, 5.0),
    "dc-04": (144.4, -38.1, "vic", 11.0, 5.0),
    "dc-05": (147.3, -42.9, "tas", 9.0, 4.0),
    "dc-06": (146.3, -41.4, "tas", 8.0, 4.0),
    "dc-07": (138.6, -34.9, "sa", 14.0, 6.0),
    "dc-08": (149.1, -35.3, "act", 12.0, 6.0),
    "dc-09": (153.0, -27.5, "qld", 22.0, 5.0),
    "dc-10": (152.8, -27.6, "qld", 23.0, 5.0),
    "dc-11": (151.8, -32.9, "nsw", 18.0, 5.0),
    "dc-12": (137.8, -30.5, "sa_n", 24.0, 6.0),
    "dc-13": (130.8, -12.5, "nt", 32.0, 4.0),
    "dc-14": (131.0, -13.2, "nt", 33.0, 4.0),
    "dc-15": (145.8, -16.9, "qld_n", 31.0, 4.0),
    "dc-16": (118.6, -20.3, "wa_n", 34.0, 5.0),
    "dc-17": (115.9, -31.9, "wa", 18.0, 6.0),
    "dc-18": (115.8, -32.3, "wa", 19.0, 6.0),
    "dc-19": (121.5, -30.7, "wa_i", 26.0, 7.0),
    "dc-20": (133.9, -23.7, "nt_i", 30.0, 7.0),
}

# per-state tariff multiplier, grid carbon intensity, grid water intensity:
# remote grids run on gas/diesel (dear and dirty), Tasmania on hydro,
# South Australia on wind
STATE_GRID = {
    "nsw": (1.05, 0.66, 0.20),
    "vic": (0.90, 0.85, 0.24),
    "tas": (0.78, 0.12, 0.30),
    "sa": (0.98, 0.35, 0.10),
    "sa_n": (1.08, 0.40, 0.12),
    "act": (1.00, 0.58, 0.18),
    "qld": (1.03, 0.72, 0.22),
    "qld_n": (1.25, 0.78, 0.26),
    "nt": (1.50, 0.82, 0.32),
    "nt_i": (1.55, 0.88, 0.34),
    "wa": (1.05, 0.58, 0.15),
    "wa_n": (1.40, 0.78, 0.28),
    "wa_i": (1.42, 0.76, 0.28),
}

# climate band by mean temperature: hot towers evaporate more per kWh of
# heat and purge more often -> (heat capacity kWh/L, blowdown ratio)
WATER_BANDS = (
    (16.0, (0.80, 0.12)),
    (21.0, (0.72, 0.18)),
    (27.0, (0.65, 0.22)),
    (99.0, (0.55, 0.28)),
)


def _water_for(t_mean):
    for cutoff, params in WATER_BANDS:
        if t_mean < cutoff:
            return params
    raise AssertionError("unreachable")

AUS_ORIGINS = {
    "syd": (151.2, -33.9, 0.35),
    "melb": (145.0, -37.8, 0.30),
    "bris": (153.0, -27.5, 0.15),
    "adel": (138.6, -34.9, 0.12),
    "per": (115.9, -31.9, 0.08),
}

# hourly request rates: overnight trough, afternoon peak
AUS_RATES = [
    62, 58, 54, 54, 58, 68, 80, 100, 120, 140, 152, 162,
    166, 162, 152, 144, 134, 130, 126, 116, 104, 90, 76, 68,
]


def _tou_base(epoch):
    if epoch < 7:
        return 0.18
    if 17 <= epoch <= 20:
        return 0.45
    if epoch >= 21:
        return 0.30
    return 0.28


def gen_aus20():
    out = os.path.join(OUT, "aus20")
    os.makedirs(out, exist_ok=True)
    rng = np.random.default_rng(1234)
    epochs = 24

    env_rows = []
    for site_id, (lon, lat, state, t_mean, t_amp) in AUS_SITES.items():
        mult, ci_base, wi = STATE_GRID[state]
        for epoch in range(epochs):
            # afternoon temperature peak at 15:00
            temp = t_mean + t_amp * math.sin(2 * math.pi * (epoch - 9) / 24)
            temp += float(rng.uniform(-0.8, 0.8))
            # solar generation dents the grid's carbon intensity midday
            solar = max(0.0, math.sin(2 * math.pi * (epoch - 6) / 24))
            ci = ci_base * (1.0 - 0.25 * solar) * float(rng.uniform(0.97, 1.03))
            tou = _tou_base(epoch) * mult * float(rng.uniform(0.99, 1.01))
            env_rows.append(
                [
                    site_id,
                    epoch,
                    round(temp, 3),
                    round(tou, 5),
                    round(ci, 5),
                    round(wi * float(rng.uniform(0.9, 1.1)), 5),
                    0.004,
                    0.001,
                ]
            )
    _write_csv(os.path.join(out, "environment.csv"), ENVIRONMENT_COLUMNS, env_rows)

    lat_rows = []
    for origin, (olon, olat, _) in AUS_ORIGINS.items():
        for site_id, (slon, slat, *_rest) in AUS_SITES.items():
            dist_km = 111.0 * math.hypot(olon - slon, olat - slat)
            ms = 4.0 + dist_km / 18.0 + float(rng.uniform(-1.5, 1.5))
            lat_rows.append([origin, site_id, round(max(ms, 1.0) / 1000.0, 6)])
    _write_csv(os.path.join(out, "latency.csv"), LATENCY_COLUMNS, lat_rows)

    _write_json(
        os.path.join(out, "scenario.json"),
        {
            "name": "aus20",
            "seed": 42,
            "site_defaults": {
                "node_count": 200,
                "node": {"tdp_watts": 400.0, "bandwidth_bytes_per_s": 2.0e11},
                "node_mem_capacity_bytes": 2.0e9,
            },
            "sites": [
                {
                    "site_id": site_id,
                    "region": state,
                    "water": {
                        "heat_capacity_kwh_per_l": _water_for(t_mean)[0],
                        "blowdown_ratio": _water_for(t_mean)[1],
                    },
                }
                for site_id, (_, _, state, t_mean, _) in AUS_SITES.items()
            ],
            "profiles": [
                {
                    "model_id": "m-14b",
                    "param_bytes": 1.4e10,
                    "kv_bytes_per_token": 524288.0,
                    "prefill_rate_tokens_per_s": 1500.0,
                },
                {
                    "model_id": "m-70b",
                    "param_bytes": 7.0e10,
                    "kv_bytes_per_token": 655360.0,
                    "prefill_rate_tokens_per_s": 550.0,
                },
            ],
            "environment": "environment.csv",
            "latency": "latency.csv",
            "trace": {
                "synth": {
                    "epochs": epochs,
                    "mean_rate": AUS_RATES,
                    "model_ids": ["m-14b", "m-70b"],
                    "model_weights": [0.65, 0.35],
                    "origin_regions": list(AUS_ORIGINS),
                    "origin_weights": [w for _, _, w in AUS_ORIGINS.values()],
                }
            },
            "epoch_hours": 1.0,
        },
    )

    # sanity: realized node demand must leave headroom at every epoch
    scenario = load_scenario(os.path.join(out, "scenario.json"))
    capacity = sum(s.node_count for s in scenario.sites)
    demand = {}
    for r in scenario.requests:
        nodes = nodes_for_request(r, scenario.profiles[r.model_id], scenario.sites[0])
        demand[r.arrival_epoch] = demand.get(r.arrival_epoch, 0) + nodes
    worst = max(demand.values())
    if worst > 0.85 * capacity:
        raise SystemExit(
            f"aus20: peak node demand {worst} exceeds 85% of fleet capacity {capacity}"
        )
    print(
        f"aus20: 20 sites x {epochs} epochs, {len(scenario.requests)} requests, "
        f"peak demand {worst}/{capacity} nodes"
    )


def main():
    gen_tiny()
    gen_twosite_temp()
    gen_aus20()


if __name__ == "__main__":
    main()
