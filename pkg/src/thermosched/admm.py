"""Consensus ADMM for the per-epoch placement LP, plus rounding.

The relaxed problem is min <C, x> over x in [0,1]^(R x S) with each row
on the probability simplex and per-site node capacity. We split it so
each site owns its column of x (local linear cost plus the quadratic
penalty gives a closed-form clipped update), while a coordinator
variable z carries the coupling constraints: exact row-wise simplex
projection followed by a capacity repair step that water-fills excess
mass from saturated sites toward the cheapest sites with headroom.
Scaled duals u accumulate x - z.

The iteration is deterministic: no randomness, tie-breaks by site then
request index, so identical inputs give byte-identical reports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, InfeasibleError
from .scheduling import METRICS, EpochCosts, ObjectiveWeights, scalarize

ROW_SUM_TOL = 1e-6


@dataclass(frozen=True)
class AdmmParams:
    rho: float = 1.0
    max_iters: int = 500
    eps_primal: float = 1e-4
    eps_dual: float = 1e-4

    def __post_init__(self):
        if self.rho <= 0:
            raise ContractError(f"rho must be > 0, got {self.rho}")
        if self.max_iters < 1:
            raise ContractError("max_iters must be >= 1")
        if self.eps_primal <= 0 or self.eps_dual <= 0:
            raise ContractError("tolerances must be > 0")


@dataclass
class Assignment:
    """Request-to-site placement, fractional or one-hot."""

    x: np.ndarray
    integral: bool

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 2:
            raise ContractError("assignment matrix must be 2-D")
        if np.any(x < -ROW_SUM_TOL) or np.any(x > 1 + ROW_SUM_TOL):
            raise ContractError("assignment entries must lie in [0, 1]")
        rows = x.sum(axis=1)
        if self.integral:
            if not np.all(np.isin(x, (0.0, 1.0))) or not np.all(rows == 1.0):
                raise ContractError("integral assignment must be one-hot per row")
        elif x.shape[0] and np.max(np.abs(rows - 1.0)) > ROW_SUM_TOL:
            raise ContractError("fractional assignment rows must sum to 1")
        self.x = x

    def site_indices(self) -> np.ndarray:
        if not self.integral:
            raise ContractError("site_indices requires an integral assignment")
        return self.x.argmax(axis=1)


@dataclass
class SolveReport:
    fractional: Assignment
    integral: Assignment
    iterations: int
    converged: bool
    primal_residuals: list[float]
    dual_residuals: list[float]
    objective_fractional: float
    objective_integral: float
    metrics_fractional: dict[str, float]
    metrics_integral: dict[str, float]
    mode: str | None = None
    site_ids: list[str] = field(default_factory=list)
    request_ids: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "mode": self.mode,
            "iterations": self.iterations,
            "converged": self.converged,
            "primal_residuals": self.primal_residuals,
            "dual_residuals": self.dual_residuals,
            "objective_fractional": self.objective_fractional,
            "objective_integral": self.objective_integral,
            "metrics_fractional": self.metrics_fractional,
            "metrics_integral": self.metrics_integral,
            "site_ids": self.site_ids,
            "request_ids": self.request_ids,
            "fractional": [list(row) for row in self.fractional.x],
            "assignment": [int(s) for s in self.integral.site_indices()],
        }
        return json.dumps(payload, sort_keys=True)


def project_rows_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex."""
    if v.size == 0:
        return v.copy()
    n = v.shape[1]
    sorted_desc = -np.sort(-v, axis=1)
    cssv = np.cumsum(sorted_desc, axis=1) - 1.0
    ind = np.arange(1, n + 1)
    cond = sorted_desc - cssv / ind > 0
    rho = n - 1 - cond[:, ::-1].argmax(axis=1)  # last index where cond holds
    theta = cssv[np.arange(v.shape[0]), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0)


def _site_loads(x: np.ndarray, demand: np.ndarray) -> np.ndarray:
    return x.T @ demand


def repair_capacity(
    z: np.ndarray,
    demand: np.ndarray,
    capacity: np.ndarray,
    scalar_cost: np.ndarray,
) -> np.ndarray:
    """Shift fractional mass off saturated sites into cheapest headroom.

    Preserves row sums. Mass leaves each saturated site in ascending
    order of the cost regret of the move, and lands on the cheapest
    sites that still have headroom, splitting across several if needed.
    """
    z = z.copy()
    loads = _site_loads(z, demand)
    for s in range(z.shape[1]):
        excess = loads[s] - capacity[s]
        if excess <= ROW_SUM_TOL:
            continue
        holders = np.flatnonzero(z[:, s] > 0)
        open_sites = [
            t for t in range(z.shape[1])
            if t != s and loads[t] < capacity[t] - ROW_SUM_TOL
        ]
        if not open_sites:
            continue
        cheapest = [min(open_sites, key=lambda t: (scalar_cost[i, t], t)) for i in holders]
        regret = np.array(
            [scalar_cost[i, t] - scalar_cost[i, s] for i, t in zip(holders, cheapest)]
        )
        for k in np.argsort(regret, kind="stable"):
            if excess <= ROW_SUM_TOL:
                break
            i = holders[k]
            movable = z[i, s] * demand[i]  # in node units
            for t in sorted(open_sites, key=lambda t: (scalar_cost[i, t], t)):
                headroom = capacity[t] - loads[t]
                if headroom <= 0:
                    continue
                moved = min(movable, excess, headroom)
                if moved <= 0:
                    continue
                frac = moved / demand[i]
                z[i, s] -= frac
                z[i, t] += frac
                loads[s] -= moved
                loads[t] += moved
                excess -= moved
                movable -= moved
                if excess <= ROW_SUM_TOL or movable <= 0:
                    break
    return z


def admm_solve(
    costs: EpochCosts,
    weights: ObjectiveWeights,
    params: AdmmParams = AdmmParams(),
    mode: str | None = None,
) -> SolveReport:
    """Solve the epoch placement problem; returns fractional + rounded plans."""
    total_demand = float(costs.demand.sum())
    total_capacity = float(costs.capacity.sum())
    if total_demand > total_capacity:
        raise InfeasibleError(
            f"total demand {total_demand:g} nodes exceeds fleet capacity "
            f"{total_capacity:g} nodes"
        )

    R, S = costs.num_requests, costs.num_sites
    scalar_cost = scalarize(costs, weights)
    # The iteration behaves best when cost deltas are O(1) relative to rho;
    # rescaling the objective does not move its minimizer.
    scale = float(np.max(np.abs(scalar_cost))) if scalar_cost.size else 0.0
    c = scalar_cost / scale if scale > 0 else scalar_cost

    z = np.full((R, S), 1.0 / S) if S else np.zeros((R, S))
    u = np.zeros((R, S))
    x = z.copy()
    primal_hist: list[float] = []
    dual_hist: list[float] = []
    converged = R == 0

    for _ in range(params.max_iters if R else 0):
        x = np.clip(z - u - c / params.rho, 0.0, 1.0)
        z_prev = z
        z = project_rows_to_simplex(x + u)
        z = repair_capacity(z, costs.demand, costs.capacity, scalar_cost)
        u = u + x - z

        primal = float(np.linalg.norm(x - z))
        dual = float(params.rho * np.linalg.norm(z - z_prev))
        primal_hist.append(primal)
        dual_hist.append(dual)
        if primal <= params.eps_primal and dual <= params.eps_dual:
            converged = True
            break

    fractional = Assignment(z, integral=False)
    integral = round_assignment(fractional, costs, weights)

    frac_metrics = np.einsum("isk,is->k", costs.vectors, fractional.x)
    idx = np.arange(R)
    int_metrics = costs.vectors[idx, integral.site_indices()].sum(axis=0) if R else np.zeros(len(METRICS))

    return SolveReport(
        fractional=fractional,
        integral=integral,
        iterations=len(primal_hist),
        converged=converged,
        primal_residuals=primal_hist,
        dual_residuals=dual_hist,
        objective_fractional=float(np.sum(scalar_cost * fractional.x)),
        objective_integral=float(
            scalar_cost[idx, integral.site_indices()].sum() if R else 0.0
        ),
        metrics_fractional=dict(zip(METRICS, (float(v) for v in frac_metrics))),
        metrics_integral=dict(zip(METRICS, (float(v) for v in int_metrics))),
        mode=mode,
        site_ids=list(costs.site_ids),
        request_ids=list(costs.request_ids),
    )


def round_assignment(
    fractional: Assignment, costs: EpochCosts, weights: ObjectiveWeights
) -> Assignment:
    """Argmax rounding with capacity eviction.

    Each request goes to its largest-fraction site (ties to the lower
    site index). While any site exceeds its node capacity, the request
    with the smallest fractional mass there moves to its next-best site
    with headroom, repeating to a fixed point.
    """
    R, S = fractional.x.shape
    if R == 0:
        return Assignment(np.zeros((0, S)), integral=True)
    rows = fractional.x.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > ROW_SUM_TOL:
        raise ContractError("cannot round: row sums deviate from 1")

    choice = fractional.x.argmax(axis=1)
    loads = np.zeros(S)
    for i in range(R):
        loads[choice[i]] += costs.demand[i]

    while True:
        over = np.flatnonzero(loads > costs.capacity + ROW_SUM_TOL)
        if over.size == 0:
            break
        s = int(over[0])
        here = np.flatnonzero(choice == s)
        # smallest fractional commitment leaves first; request index breaks ties
        victim = here[np.lexsort((here, fractional.x[here, s]))][0]
        pref = np.lexsort((np.arange(S), -fractional.x[victim]))
        dest = next(
            (
                int(t) for t in pref
                if t != s and loads[t] + costs.demand[victim] <= costs.capacity[t] + ROW_SUM_TOL
            ),
            None,
        )
        if dest is None:
            raise InfeasibleError(
                f"rounding failed: request {costs.request_ids[victim]!r} has "
                "no site with spare node capacity"
            )
        choice[victim] = dest
        loads[s] -= costs.demand[victim]
        loads[dest] += costs.demand[victim]

    x = np.zeros((R, S))
    x[np.arange(R), choice] = 1.0
    return Assignment(x, integral=True)


def solve_mode(
    costs: EpochCosts, mode: str, params: AdmmParams = AdmmParams()
) -> SolveReport:
    from .scheduling import MODE_WEIGHTS

    try:
        weights = MODE_WEIGHTS[mode]
    except KeyError:
        raise ContractError(
            f"unknown mode {mode!r}; expected one of {sorted(MODE_WEIGHTS)}"
        ) from None
    return admm_solve(costs, weights, params, mode=mode)
