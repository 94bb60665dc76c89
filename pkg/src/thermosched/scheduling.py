"""Per-epoch scheduling problem: marginal cost vectors and scalarization.

For each (request, site) pair we compute a four-component marginal cost
vector: monetary cost, carbon, water, and estimated TTFT. The energy
components assume the request occupies ceil(memory / node capacity)
nodes for the epoch, each stepping from IDLE to ON, priced through the
site's cooling efficiency and grid intensities at that epoch. The queue
wait inside TTFT is a linear congestion proxy: outstanding prefill work
(node-seconds) divided by the site's node count.

All four components are linear in the assignment, so the relaxed
problem each scheduler faces is an LP over per-request simplices with
site capacity coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import CONDITIONING_FRACTION, COOLING_MULTIPLIER, EpochDuration
from .environment import EnvironmentSample, SiteSpec, cop_at
from .errors import ContractError
from .workload import (
    InferenceRequest,
    LatencyMatrix,
    ModelProfile,
    load_overhead,
    prefill_seconds,
    request_memory,
)

METRICS = ("cost", "carbon", "water", "ttft")


@dataclass(frozen=True)
class ObjectiveWeights:
    """Relative emphasis on cost, carbon, water, and TTFT; see MODE_WEIGHTS.

    Rescaled to sum to 1 on construction.
    """

    cost: float
    carbon: float
    water: float
    ttft: float

    def __post_init__(self):
        vals = (self.cost, self.carbon, self.water, self.ttft)
        if any(v < 0 for v in vals):
            raise ContractError(f"objective weights must be >= 0, got {vals}")
        total = sum(vals)
        if total <= 0:
            raise ContractError("objective weights must not all be zero")
        for name, v in zip(("cost", "carbon", "water", "ttft"), vals):
            object.__setattr__(self, name, v / total)

    def as_array(self) -> np.ndarray:
        return np.array([self.cost, self.carbon, self.water, self.ttft])


MODE_WEIGHTS = {
    "opt-cost": ObjectiveWeights(1.0, 0.0, 0.0, 0.0),
    "opt-carbon": ObjectiveWeights(0.0, 1.0, 0.0, 0.0),
    "opt-water": ObjectiveWeights(0.0, 0.0, 1.0, 0.0),
    "opt-ttft": ObjectiveWeights(0.0, 0.0, 0.0, 1.0),
    "opt-balance": ObjectiveWeights(0.25, 0.25, 0.25, 0.25),
}


def nodes_for_request(
    req: InferenceRequest, profile: ModelProfile, site: SiteSpec
) -> int:
    """Node slots the request occupies at the site."""
    mem = request_memory(req, profile)
    return int(math.ceil(mem / site.node_mem_capacity_bytes))


def marginal_cost_vector(
    req: InferenceRequest,
    profile: ModelProfile,
    site: SiteSpec,
    env: EnvironmentSample,
    net_latency: float,
    queue_wait: float,
    model_resident: bool,
    duration: EpochDuration,
) -> np.ndarray:
    """(cost, carbon_kg, water_l, ttft_s) of placing the request at the site."""
    nodes = nodes_for_request(req, profile, site)
    delta = site.state_profile.on - site.state_profile.idle
    e_it = nodes * delta * (site.node.tdp_watts / 1000.0) * duration.hours

    cop = cop_at(site.cop_curve, env.ambient_temp_c)
    e_total = e_it * (1.0 + CONDITIONING_FRACTION + COOLING_MULTIPLIER / cop)

    money = e_total * env.tou_price_per_kwh

    w_evap = e_it / site.water.heat_capacity_kwh_per_l
    w_blowdown = w_evap / (1.0 - site.water.blowdown_ratio)
    w_grid = e_total * env.water_intensity_l_per_kwh
    water = w_evap + w_blowdown + w_grid

    c_grid = env.carbon_intensity_kg_per_kwh * e_total
    c_water = env.carbon_intensity_kg_per_kwh * (
        (w_blowdown + w_evap) * env.potable_ei_kwh_per_l
        + w_grid * env.wastewater_ei_kwh_per_l
    )
    carbon = c_grid + c_water

    load = 0.0 if model_resident else load_overhead(profile, site.node)
    ttft = net_latency + queue_wait + load + prefill_seconds(req, profile)

    return np.array([money, carbon, water, ttft])


@dataclass
class EpochCosts:
    """Dense cost tensors for one epoch's placement problem.

    vectors has shape (requests, sites, 4) in METRICS order; demand[i]
    is the node count request i occupies (same at every site as long as
    node memory capacity is uniform, stored per request for the uniform
    case we support); capacity[s] is the site node count; work[i] is the
    request's prefill time in node-seconds, the quantity the queue proxy
    accumulates.
    """

    request_ids: list[str]
    site_ids: list[str]
    vectors: np.ndarray
    demand: np.ndarray
    capacity: np.ndarray
    work: np.ndarray = None

    def __post_init__(self):
        if self.work is None:
            self.work = np.zeros(len(self.request_ids))

    @property
    def num_requests(self) -> int:
        return len(self.request_ids)

    @property
    def num_sites(self) -> int:
        return len(self.site_ids)


def build_epoch_costs(
    requests: list[InferenceRequest],
    sites: list[SiteSpec],
    env_by_site: dict[str, EnvironmentSample],
    profiles: dict[str, ModelProfile],
    latency: LatencyMatrix,
    resident: set[tuple[str, str]],
    duration: EpochDuration,
    base_load_s: dict[str, float] | None = None,
) -> EpochCosts:
    """Assemble the epoch's cost tensors.

    resident holds (site_id, model_id) pairs already loaded at the start
    of the epoch. base_load_s is pre-existing prefill backlog per site
    in node-seconds; the queue proxy for request i at site s is
    (base_load_s[s] + prefill_seconds(i)) / node_count_s.
    """
    base_load_s = base_load_s or {}
    site_caps = {s.site_id: s.node_mem_capacity_bytes for s in sites}
    if len(set(site_caps.values())) > 1:
        raise ContractError(
            "sites must share a node memory capacity (per-request demand "
            "would otherwise vary by site)"
        )

    vectors = np.zeros((len(requests), len(sites), len(METRICS)))
    demand = np.zeros(len(requests))
    work = np.zeros(len(requests))
    for i, req in enumerate(requests):
        try:
            profile = profiles[req.model_id]
        except KeyError:
            raise ContractError(
                f"request {req.request_id}: unknown model {req.model_id!r}"
            ) from None
        work[i] = prefill_seconds(req, profile)
        for s, site in enumerate(sites):
            env = env_by_site[site.site_id]
            queue = (base_load_s.get(site.site_id, 0.0) + work[i]) / site.node_count
            vectors[i, s] = marginal_cost_vector(
                req,
                profile,
                site,
                env,
                net_latency=latency.get(req.origin_region, site.site_id),
                queue_wait=queue,
                model_resident=(site.site_id, req.model_id) in resident,
                duration=duration,
            )
        demand[i] = nodes_for_request(req, profile, sites[0])

    capacity = np.array([float(s.node_count) for s in sites])
    return EpochCosts(
        request_ids=[r.request_id for r in requests],
        site_ids=[s.site_id for s in sites],
        vectors=vectors,
        demand=demand,
        capacity=capacity,
        work=work,
    )


def metric_normalizers(costs: EpochCosts) -> np.ndarray:
    """Per-metric scale: sum over requests of the worst-site component.

    An upper bound on what any feasible assignment can accrue, so each
    normalized component lands in [0, 1]. Clamped away from zero so a
    degenerate all-zero metric cannot poison the scalarization.
    """
    if costs.num_requests == 0:
        return np.ones(len(METRICS))
    worst = costs.vectors.max(axis=1).sum(axis=0)
    return np.maximum(worst, 1e-12)


def scalarize(costs: EpochCosts, weights: ObjectiveWeights) -> np.ndarray:
    """Collapse the 4-vector tensor to a (requests, sites) cost matrix."""
    w = weights.as_array()
    scale = metric_normalizers(costs)
    return np.einsum("isk,k->is", costs.vectors / scale, w)


def assignment_metric_totals(costs: EpochCosts, assignment: np.ndarray) -> np.ndarray:
    """Sum each metric over an integral assignment (site index per request)."""
    if assignment.shape != (costs.num_requests,):
        raise ContractError("assignment must give one site index per request")
    idx = np.arange(costs.num_requests)
    return costs.vectors[idx, assignment].sum(axis=0)
