"""Scenario documents: one JSON file referencing CSVs by relative path.

The document names the sites (with an optional site_defaults block
merged under each entry), the model profiles, the environment / latency
CSVs, and either a trace CSV or synthetic-trace parameters. Loading
produces a fully validated simulator.Scenario; validate_scenario runs
the same steps as individually reported checks without simulating.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .admm import AdmmParams
from .environment import (
    CopCurve,
    EnvironmentTable,
    NodeSpec,
    SiteSpec,
    WaterParams,
    WorkingStateProfile,
    load_environment,
)
from .errors import ConfigError, ThermoschedError
from .scheduling import MODE_WEIGHTS
from .simulator import Scenario
from .workload import (
    InferenceRequest,
    LatencyMatrix,
    ModelProfile,
    ingest_trace,
    load_latency_matrix,
    synth_trace,
)

SCHEMA_VERSION = 1


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"{where}: missing required field {key!r}")
    return doc[key]


def _site_from_doc(doc: dict, defaults: dict) -> SiteSpec:
    merged = {**defaults, **doc}
    site_id = _require(merged, "site_id", "site entry")
    node_doc = _require(merged, "node", f"site {site_id!r}")
    kwargs = {
        "site_id": site_id,
        "node_count": int(_require(merged, "node_count", f"site {site_id!r}")),
        "node": NodeSpec(**node_doc),
        "region": merged.get("region", site_id),
    }
    if "node_mem_capacity_bytes" in merged:
        kwargs["node_mem_capacity_bytes"] = float(merged["node_mem_capacity_bytes"])
    if "state_profile" in merged:
        kwargs["state_profile"] = WorkingStateProfile(**merged["state_profile"])
    if "water" in merged:
        kwargs["water"] = WaterParams(**merged["water"])
    if "cop_anchors" in merged:
        kwargs["cop_curve"] = CopCurve(tuple(map(tuple, merged["cop_anchors"])))
    return SiteSpec(**kwargs)


def _profiles_from_doc(entries: list) -> dict[str, ModelProfile]:
    profiles = {}
    for entry in entries:
        p = ModelProfile(**entry)
        if p.model_id in profiles:
            raise ConfigError(f"duplicate model profile {p.model_id!r}")
        profiles[p.model_id] = p
    return profiles


def _trace_from_doc(doc: dict, base_dir: str, seed: int | None) -> list[InferenceRequest]:
    if "file" in doc:
        return ingest_trace(os.path.join(base_dir, doc["file"]))
    if "synth" in doc:
        params = dict(doc["synth"])
        if seed is not None:
            params["seed"] = seed
        if "seed" not in params:
            raise ConfigError("synthetic trace needs a seed (config or --seed)")
        return synth_trace(**params)
    raise ConfigError("trace block must contain either 'file' or 'synth'")


def load_scenario_doc(path) -> tuple[dict, str]:
    if not os.path.exists(path):
        raise ConfigError(f"scenario file not found: {path}")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: scenario document must be a JSON object")
    return doc, os.path.dirname(os.path.abspath(path))


def load_scenario(
    path,
    seed: int | None = None,
    scheduler: str | None = None,
    modes: list[str] | None = None,
) -> Scenario:
    """Build a Scenario from a JSON document; CLI-style overrides win."""
    doc, base_dir = load_scenario_doc(path)

    defaults = doc.get("site_defaults", {})
    sites = [_site_from_doc(entry, defaults) for entry in _require(doc, "sites", path)]
    ids = [s.site_id for s in sites]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"{path}: duplicate site_id in sites list")

    profiles = _profiles_from_doc(_require(doc, "profiles", path))

    env_path = os.path.join(base_dir, _require(doc, "environment", path))
    environment = load_environment(env_path, known_sites=ids)

    latency = load_latency_matrix(os.path.join(base_dir, _require(doc, "latency", path)))

    requests = _trace_from_doc(
        _require(doc, "trace", path), base_dir, seed if seed is not None else doc.get("seed")
    )
    for r in requests:
        if r.model_id not in profiles:
            raise ConfigError(
                f"trace request {r.request_id!r} references unknown model "
                f"{r.model_id!r}"
            )
    missing = latency.missing_pairs([r.origin_region for r in requests], ids)
    if missing:
        raise ConfigError(f"latency matrix missing pairs: {missing[:5]}")

    mode_list = modes or doc.get("modes") or list(MODE_WEIGHTS)
    return Scenario(
        sites=sites,
        environment=environment,
        requests=requests,
        profiles=profiles,
        latency=latency,
        epoch_hours=float(doc.get("epoch_hours", 1.0)),
        scheduler=scheduler or doc.get("scheduler", "admm"),
        admm_params=AdmmParams(**doc.get("admm", {})),
        modes=tuple(mode_list),
        idle_floor=int(doc.get("idle_floor", 0)),
        name=doc.get("name", os.path.splitext(os.path.basename(path))[0]),
    )


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def validate_scenario(path, seed: int | None = None) -> list[CheckResult]:
    """Run every cross-reference check, reporting each independently."""
    results: list[CheckResult] = []

    def record(name: str, fn) -> bool:
        try:
            detail = fn()
            results.append(CheckResult(name, True, detail or "ok"))
            return True
        except ThermoschedError as exc:
            results.append(CheckResult(name, False, str(exc)))
            return False

    state: dict = {}

    def parse():
        state["doc"], state["base"] = load_scenario_doc(path)
        return f"parsed {path}"

    if not record("parse", parse):
        return results
    doc, base = state["doc"], state["base"]

    def sites():
        defaults = doc.get("site_defaults", {})
        site_list = [_site_from_doc(e, defaults) for e in _require(doc, "sites", path)]
        ids = [s.site_id for s in site_list]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate site_id in sites list")
        state["sites"] = site_list
        return f"{len(site_list)} sites"

    def profiles():
        state["profiles"] = _profiles_from_doc(_require(doc, "profiles", path))
        return f"{len(state['profiles'])} model profiles"

    def environment():
        ids = [s.site_id for s in state["sites"]]
        state["env"] = load_environment(
            os.path.join(base, _require(doc, "environment", path)), known_sites=ids
        )
        return (
            f"complete over {len(state['env'].sites)} sites x "
            f"{len(state['env'].epochs)} epochs"
        )

    def trace():
        reqs = _trace_from_doc(
            _require(doc, "trace", path), base,
            seed if seed is not None else doc.get("seed"),
        )
        for r in reqs:
            if r.model_id not in state["profiles"]:
                raise ConfigError(
                    f"request {r.request_id!r} references unknown model {r.model_id!r}"
                )
        if "env" in state:
            covered = set(state["env"].epochs)
            spanned = {r.arrival_epoch for r in reqs}
            if spanned - covered:
                raise ConfigError(
                    f"trace epochs {sorted(spanned - covered)} lack environment rows"
                )
        state["requests"] = reqs
        return f"{len(reqs)} requests"

    def latency():
        mat = load_latency_matrix(os.path.join(base, _require(doc, "latency", path)))
        origins = [r.origin_region for r in state.get("requests", [])]
        missing = mat.missing_pairs(origins, [s.site_id for s in state["sites"]])
        if missing:
            raise ConfigError(f"missing latency pairs: {missing}")
        return f"{len(mat.entries)} latency entries"

    sites_ok = record("sites", sites)
    profiles_ok = record("profiles", profiles)
    if sites_ok:
        record("environment", environment)
    else:
        results.append(CheckResult("environment", False, "not checked: sites failed"))
    if profiles_ok:
        trace_ok = record("trace", trace)
    else:
        results.append(CheckResult("trace", False, "not checked: profiles failed"))
        trace_ok = False
    if sites_ok and trace_ok:
        record("latency", latency)
    else:
        results.append(
            CheckResult("latency", False, "not checked: sites or trace failed")
        )
    return results
