"""Brute-force verification oracle for the placement problem.

Enumerates every integral assignment (sites^requests) under the site
capacity constraint and returns the scalarized optimum. Because the
objective is linear and, on the instances we enumerate, every integral
assignment is capacity-feasible, the LP relaxation attains its optimum
at an integral vertex — so the enumerated value doubles as the relaxed
optimum the iterative solver is checked against.

Deliberately small: hard caps on instance size keep enumeration exact
and fast rather than clever.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ContractError, InfeasibleError
from .scheduling import METRICS, EpochCosts, ObjectiveWeights, scalarize

MAX_ORACLE_REQUESTS = 12
MAX_ORACLE_SITES = 4

_CHUNK = 1 << 16


def oracle_solve(
    costs: EpochCosts, weights: ObjectiveWeights
) -> tuple[float, np.ndarray]:
    """Exhaustive optimum: (best scalarized value, site index per request).

    Ties resolve to the lexicographically smallest assignment tuple.
    """
    R, S = costs.num_requests, costs.num_sites
    if R > MAX_ORACLE_REQUESTS or S > MAX_ORACLE_SITES:
        raise ContractError(
            f"oracle handles at most {MAX_ORACLE_REQUESTS} requests x "
            f"{MAX_ORACLE_SITES} sites, got {R} x {S}"
        )
    if S == 0:
        raise ContractError("oracle needs at least one site")
    if R == 0:
        return 0.0, np.zeros(0, dtype=int)

    scalar_cost = scalarize(costs, weights)
    # request 0 is the most significant digit, so ascending n enumerates
    # assignment tuples in lexicographic order
    powers = S ** np.arange(R - 1, -1, -1, dtype=np.int64)
    total = S**R
    req_idx = np.arange(R)

    best_val = np.inf
    best: np.ndarray | None = None
    for start in range(0, total, _CHUNK):
        ns = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (ns[:, None] // powers[None, :]) % S
        loads = np.zeros((len(ns), S))
        for s in range(S):
            loads[:, s] = (digits == s) @ costs.demand
        feasible = np.all(loads <= costs.capacity[None, :] + 1e-9, axis=1)
        vals = scalar_cost[req_idx[None, :], digits].sum(axis=1)
        vals = np.where(feasible, vals, np.inf)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best = digits[k].copy()

    if best is None or not np.isfinite(best_val):
        raise InfeasibleError("no capacity-feasible integral assignment exists")
    return best_val, best


def oracle_metric_minimum(costs: EpochCosts, metric: str) -> float:
    """Best achievable total of a single metric, via the same enumeration."""
    weights = ObjectiveWeights(*(1.0 if m == metric else 0.0 for m in METRICS))
    value, assignment = oracle_solve(costs, weights)
    idx = np.arange(costs.num_requests)
    k = METRICS.index(metric)
    return float(costs.vectors[idx, assignment, k].sum()) if costs.num_requests else 0.0


def make_random_instance(
    seed: int,
    num_requests: int | None = None,
    num_sites: int | None = None,
) -> EpochCosts:
    """Random placement instance with capacity slack on every site.

    Every site's capacity covers the full demand, so all sites**requests
    assignments are feasible and the LP relaxation is tight at an
    integral vertex (the property oracle_solve relies on).
    """
    rng = np.random.default_rng(seed)
    R = int(num_requests) if num_requests is not None else int(rng.integers(3, 11))
    S = int(num_sites) if num_sites is not None else int(rng.integers(2, 5))
    if R > MAX_ORACLE_REQUESTS or S > MAX_ORACLE_SITES:
        raise ContractError("requested instance exceeds oracle size limits")

    vectors = rng.uniform(0.05, 1.0, size=(R, S, len(METRICS)))
    demand = rng.integers(1, 4, size=R).astype(float)
    capacity = np.full(S, demand.sum())
    return EpochCosts(
        request_ids=[f"req-{i:03d}" for i in range(R)],
        site_ids=[f"site-{s}" for s in range(S)],
        vectors=vectors,
        demand=demand,
        capacity=capacity,
    )


def instance_to_json(costs: EpochCosts) -> str:
    payload = {
        "request_ids": costs.request_ids,
        "site_ids": costs.site_ids,
        "vectors": [[list(v) for v in row] for row in costs.vectors],
        "demand": list(costs.demand),
        "capacity": list(costs.capacity),
        "metrics": list(METRICS),
    }
    return json.dumps(payload, sort_keys=True, indent=2)


def instance_from_json(text: str) -> EpochCosts:
    try:
        payload = json.loads(text)
        costs = EpochCosts(
            request_ids=list(payload["request_ids"]),
            site_ids=list(payload["site_ids"]),
            vectors=np.asarray(payload["vectors"], dtype=float),
            demand=np.asarray(payload["demand"], dtype=float),
            capacity=np.asarray(payload["capacity"], dtype=float),
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ContractError(f"malformed instance document: {exc}") from exc
    if costs.vectors.shape != (costs.num_requests, costs.num_sites, len(METRICS)):
        raise ContractError(
            f"instance vectors have shape {costs.vectors.shape}, expected "
            f"({costs.num_requests}, {costs.num_sites}, {len(METRICS)})"
        )
    return costs
