"""Epoch loop: schedule, derive node states, account energy/water/carbon/TTFT.

Each epoch we gather the requests arriving then, hand them to the
selected scheduler, and derive site node states from the resulting
assignment: enough nodes ON to hold the aggregate memory placed at the
site, further nodes IDLE up to the scenario's idle floor, the rest OFF.
Accounting then walks the full chain — IT energy, cooling at the site's
current CoP, conditioning, tariffs, evaporative/blowdown/grid water,
grid and water-processing carbon — plus realized TTFT per request,
where the queue term is the site's total assigned prefill work divided
by its node count.

Model residency carries forward one epoch: a site that served a model
holds its weights resident for the next epoch only, so back-to-back
demand skips the load overhead while idle models age out.

Accounting reads only the assignment, never the scheduler, so any
fixed assignment sequence yields identical metrics regardless of how
it was produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .admm import AdmmParams, Assignment, solve_mode
from .baselines import SCHEDULERS
from .energy import (
    EpochDuration,
    SiteEnergyBreakdown,
    site_energy_breakdown,
    site_it_energy,
)
from .environment import (
    EnvironmentTable,
    SiteSpec,
    WorkingState,
    cop_at,
)
from .errors import ContractError, InfeasibleError
from .scheduling import MODE_WEIGHTS, build_epoch_costs
from .water_carbon import (
    SiteCarbonBreakdown,
    SiteWaterBreakdown,
    site_carbon_breakdown,
    site_water_breakdown,
)
from .workload import (
    InferenceRequest,
    LatencyMatrix,
    ModelProfile,
    load_overhead,
    prefill_seconds,
    request_memory,
)

BASELINE_LABELS = tuple(SCHEDULERS)
MODE_LABELS = tuple(MODE_WEIGHTS) + BASELINE_LABELS


@dataclass
class Scenario:
    sites: list[SiteSpec]
    environment: EnvironmentTable
    requests: list[InferenceRequest]
    profiles: dict[str, ModelProfile]
    latency: LatencyMatrix
    epoch_hours: float = 1.0
    scheduler: str = "admm"
    admm_params: AdmmParams = field(default_factory=AdmmParams)
    modes: tuple[str, ...] = tuple(MODE_WEIGHTS)
    idle_floor: int = 0
    name: str = "scenario"

    def __post_init__(self):
        if self.scheduler not in ("admm",) + BASELINE_LABELS:
            raise ContractError(f"unknown scheduler {self.scheduler!r}")
        for m in self.modes:
            if m not in MODE_LABELS:
                raise ContractError(
                    f"unknown mode {m!r}; expected one of {sorted(MODE_LABELS)}"
                )
        if self.idle_floor < 0:
            raise ContractError("idle_floor must be >= 0")
        if self.epoch_hours <= 0:
            raise ContractError("epoch_hours must be > 0")

    @property
    def duration(self) -> EpochDuration:
        return EpochDuration(self.epoch_hours)

    def epochs(self) -> list[int]:
        return self.environment.epochs

    def run_labels(self) -> tuple[str, ...]:
        """Scheduler runs this scenario executes: the mode list under the
        admm scheduler, otherwise just the named baseline."""
        if self.scheduler == "admm":
            return tuple(self.modes)
        return (self.scheduler,)


@dataclass
class EpochMetrics:
    epoch: int
    energy: dict[str, SiteEnergyBreakdown]
    water: dict[str, SiteWaterBreakdown]
    carbon: dict[str, SiteCarbonBreakdown]
    site_cost: dict[str, float]
    site_ttfts: dict[str, list[float]]
    fleet_cost: float
    fleet_water_l: float
    fleet_carbon_kg: float
    ttft_mean_s: float
    ttft_p95_s: float
    requests_served: int

    def all_ttfts(self) -> list[float]:
        out = []
        for site_id in sorted(self.site_ttfts):
            out.extend(self.site_ttfts[site_id])
        return out


def ttft_stats(ttfts) -> tuple[float, float]:
    if len(ttfts) == 0:
        return 0.0, 0.0
    arr = np.asarray(ttfts)
    return float(arr.mean()), float(np.percentile(arr, 95))


def account_epoch(
    epoch: int,
    requests: list[InferenceRequest],
    site_choice: np.ndarray,
    scenario: Scenario,
    resident: set[tuple[str, str]],
) -> tuple[EpochMetrics, set[tuple[str, str]]]:
    """Evaluate one epoch's metrics for a fixed request->site assignment.

    site_choice[i] indexes scenario.sites. Returns the metrics and the
    residency set for the next epoch.
    """
    if len(site_choice) != len(requests):
        raise ContractError("one site choice per request required")
    duration = scenario.duration
    env = scenario.environment.for_epoch(epoch)

    by_site: dict[str, list[InferenceRequest]] = {s.site_id: [] for s in scenario.sites}
    for req, s in zip(requests, site_choice):
        by_site[scenario.sites[int(s)].site_id].append(req)

    energy: dict[str, SiteEnergyBreakdown] = {}
    water: dict[str, SiteWaterBreakdown] = {}
    carbon: dict[str, SiteCarbonBreakdown] = {}
    site_cost: dict[str, float] = {}
    site_ttfts: dict[str, list[float]] = {}
    next_resident: set[tuple[str, str]] = set()

    for site in scenario.sites:
        served = by_site[site.site_id]
        sample = env[site.site_id]

        agg_mem = sum(
            request_memory(r, scenario.profiles[r.model_id]) for r in served
        )
        nodes_on = min(
            site.node_count, int(math.ceil(agg_mem / site.node_mem_capacity_bytes))
        )
        nodes_idle = min(scenario.idle_floor, site.node_count - nodes_on)
        states = (
            [WorkingState.ON] * nodes_on
            + [WorkingState.IDLE] * nodes_idle
            + [WorkingState.OFF] * (site.node_count - nodes_on - nodes_idle)
        )
        e_it = site_it_energy(states, duration, site)
        cop = cop_at(site.cop_curve, sample.ambient_temp_c)
        breakdown = site_energy_breakdown(site.site_id, epoch, e_it, cop)
        energy[site.site_id] = breakdown
        site_cost[site.site_id] = breakdown.e_total * sample.tou_price_per_kwh

        wb = site_water_breakdown(
            site.site_id,
            epoch,
            e_it,
            breakdown.e_total,
            site.water,
            sample.water_intensity_l_per_kwh,
        )
        water[site.site_id] = wb
        carbon[site.site_id] = site_carbon_breakdown(wb, breakdown.e_total, sample)

        backlog = sum(
            prefill_seconds(r, scenario.profiles[r.model_id]) for r in served
        )
        queue = backlog / site.node_count
        ttfts = []
        for r in served:
            profile = scenario.profiles[r.model_id]
            was_resident = (site.site_id, r.model_id) in resident
            load = 0.0 if was_resident else load_overhead(profile, site.node)
            ttfts.append(
                scenario.latency.get(r.origin_region, site.site_id)
                + queue
                + load
                + prefill_seconds(r, profile)
            )
            next_resident.add((site.site_id, r.model_id))
        site_ttfts[site.site_id] = ttfts

    mean, p95 = ttft_stats([t for ts in site_ttfts.values() for t in ts])
    metrics = EpochMetrics(
        epoch=epoch,
        energy=energy,
        water=water,
        carbon=carbon,
        site_cost=site_cost,
        site_ttfts=site_ttfts,
        fleet_cost=sum(site_cost.values()),
        fleet_water_l=sum(w.total_l for w in water.values()),
        fleet_carbon_kg=sum(c.total_kg for c in carbon.values()),
        ttft_mean_s=mean,
        ttft_p95_s=p95,
        requests_served=len(requests),
    )
    return metrics, next_resident


def schedule_epoch(
    epoch: int,
    requests: list[InferenceRequest],
    scenario: Scenario,
    resident: set[tuple[str, str]],
    label: str,
) -> Assignment:
    """Produce this epoch's integral assignment under the given run label."""
    costs = build_epoch_costs(
        requests,
        scenario.sites,
        scenario.environment.for_epoch(epoch),
        scenario.profiles,
        scenario.latency,
        resident,
        scenario.duration,
    )
    try:
        if label in SCHEDULERS:
            return SCHEDULERS[label](costs)
        return solve_mode(costs, label, scenario.admm_params).integral
    except InfeasibleError as exc:
        raise InfeasibleError(f"epoch {epoch}: {exc}") from exc


def run_epoch(
    epoch: int,
    requests: list[InferenceRequest],
    scenario: Scenario,
    resident: set[tuple[str, str]],
    label: str,
) -> tuple[EpochMetrics, set[tuple[str, str]]]:
    assignment = schedule_epoch(epoch, requests, scenario, resident, label)
    choice = (
        assignment.site_indices() if len(requests) else np.zeros(0, dtype=int)
    )
    return account_epoch(epoch, requests, choice, scenario, resident)


@dataclass
class ModeAggregate:
    cost: float
    carbon_kg: float
    water_l: float
    energy_kwh: float
    ttft_mean_s: float
    ttft_p95_s: float
    requests: int


@dataclass
class RunSummary:
    scenario_name: str
    epoch_metrics: dict[str, list[EpochMetrics]]
    aggregates: dict[str, ModeAggregate]
    normalized: dict[str, dict[str, float]]
    normalize_against: str


def aggregate_run(metrics: list[EpochMetrics]) -> ModeAggregate:
    ttfts = [t for m in metrics for t in m.all_ttfts()]
    mean, p95 = ttft_stats(ttfts)
    return ModeAggregate(
        cost=sum(m.fleet_cost for m in metrics),
        carbon_kg=sum(m.fleet_carbon_kg for m in metrics),
        water_l=sum(m.fleet_water_l for m in metrics),
        energy_kwh=sum(
            b.e_total for m in metrics for b in m.energy.values()
        ),
        ttft_mean_s=mean,
        ttft_p95_s=p95,
        requests=sum(m.requests_served for m in metrics),
    )


NORMALIZED_METRIC_FIELDS = {
    "cost": "cost",
    "carbon": "carbon_kg",
    "water": "water_l",
    "ttft": "ttft_mean_s",
}


def normalize_aggregates(
    aggregates: dict[str, ModeAggregate], against: str
) -> dict[str, dict[str, float]]:
    """Per-metric ratios relative to the named run; the reference run's
    own normalized values are exactly 1.0."""
    if against not in aggregates:
        raise ContractError(
            f"normalization baseline {against!r} is not among the runs "
            f"{sorted(aggregates)}"
        )
    base = aggregates[against]
    out: dict[str, dict[str, float]] = {}
    for metric, attr in NORMALIZED_METRIC_FIELDS.items():
        denom = getattr(base, attr)
        if denom == 0:
            raise ContractError(
                f"cannot normalize {metric}: baseline {against!r} total is 0"
            )
        out[metric] = {
            label: getattr(agg, attr) / denom for label, agg in aggregates.items()
        }
    return out


def run_simulation(
    scenario: Scenario, normalize_against: str = "queue-split"
) -> RunSummary:
    by_epoch: dict[int, list[InferenceRequest]] = {}
    for r in scenario.requests:
        by_epoch.setdefault(r.arrival_epoch, []).append(r)
    epochs = scenario.epochs()
    spanned = set(by_epoch)
    missing = spanned - set(epochs)
    if missing:
        raise ContractError(
            f"trace spans epochs {sorted(missing)} not covered by the "
            "environment table"
        )

    labels = scenario.run_labels()
    epoch_metrics: dict[str, list[EpochMetrics]] = {}
    for label in labels:
        resident: set[tuple[str, str]] = set()
        series = []
        for epoch in epochs:
            metrics, resident = run_epoch(
                epoch, by_epoch.get(epoch, []), scenario, resident, label
            )
            series.append(metrics)
        epoch_metrics[label] = series

    aggregates = {label: aggregate_run(ms) for label, ms in epoch_metrics.items()}
    if normalize_against not in aggregates:
        # normalization reference must exist; run it on demand
        resident = set()
        series = []
        for epoch in epochs:
            metrics, resident = run_epoch(
                epoch, by_epoch.get(epoch, []), scenario, resident, normalize_against
            )
            series.append(metrics)
        epoch_metrics[normalize_against] = series
        aggregates[normalize_against] = aggregate_run(series)

    return RunSummary(
        scenario_name=scenario.name,
        epoch_metrics=epoch_metrics,
        aggregates=aggregates,
        normalized=normalize_aggregates(aggregates, normalize_against),
        normalize_against=normalize_against,
    )
