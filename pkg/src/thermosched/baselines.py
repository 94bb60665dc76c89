"""Comparison schedulers: a TTFT-greedy policy and a load-balancing policy.

queue-split chases first-token latency: requests are placed one at a
time, in arrival order, on whichever site currently promises the lowest
estimated TTFT — network, queue backlog so far, model-load overhead,
prefill — and never looks at price, carbon, or water.

flow-greedy chases utilization: each request lands on the site with the
lowest node-utilization fraction at that moment, breaking ties toward
larger capacity and then lower site index. It is blind to both latency
and environmental signals.
"""

from __future__ import annotations

import numpy as np

from .admm import Assignment
from .errors import InfeasibleError
from .scheduling import METRICS, EpochCosts

_TTFT = METRICS.index("ttft")


def _one_hot(choice: np.ndarray, num_sites: int) -> Assignment:
    x = np.zeros((len(choice), num_sites))
    if len(choice):
        x[np.arange(len(choice)), choice] = 1.0
    return Assignment(x, integral=True)


def queue_split_schedule(costs: EpochCosts) -> Assignment:
    """Greedy minimum-estimated-TTFT placement in arrival order."""
    R, S = costs.num_requests, costs.num_sites
    choice = np.zeros(R, dtype=int)
    backlog = np.zeros(S)  # node-seconds of prefill work committed so far
    loads = np.zeros(S)
    for i in range(R):
        ttft = costs.vectors[i, :, _TTFT] + backlog / costs.capacity
        feasible = loads + costs.demand[i] <= costs.capacity + 1e-9
        if not feasible.any():
            raise InfeasibleError(
                f"queue-split: no site can hold request {costs.request_ids[i]!r}"
            )
        ttft = np.where(feasible, ttft, np.inf)
        s = int(np.argmin(ttft))  # first minimum -> lowest site index on ties
        choice[i] = s
        backlog[s] += costs.work[i]
        loads[s] += costs.demand[i]
    return _one_hot(choice, S)


def flow_greedy_schedule(costs: EpochCosts) -> Assignment:
    """Utilization-equalizing placement, blind to latency and environment."""
    R, S = costs.num_requests, costs.num_sites
    choice = np.zeros(R, dtype=int)
    loads = np.zeros(S)
    order = np.lexsort((np.arange(S), -costs.capacity))  # capacity desc, index asc
    for i in range(R):
        best = None
        best_util = np.inf
        for s in order:
            if loads[s] + costs.demand[i] > costs.capacity[s] + 1e-9:
                continue
            util = loads[s] / costs.capacity[s]
            if util < best_util - 1e-12:
                best, best_util = int(s), util
        if best is None:
            raise InfeasibleError(
                f"flow-greedy: no site can hold request {costs.request_ids[i]!r}"
            )
        choice[i] = best
        loads[best] += costs.demand[i]
    return _one_hot(choice, S)


SCHEDULERS = {
    "queue-split": queue_split_schedule,
    "flow-greedy": flow_greedy_schedule,
}
