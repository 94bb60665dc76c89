"""Temperature-aware multi-objective scheduling simulator for LLM inference
across geo-distributed edge data centers.

The library models, per discrete epoch: IT energy from node working
states, mechanical cooling whose efficiency tracks ambient temperature,
power conditioning, time-of-use energy cost, evaporative / blowdown /
grid-embedded water, grid and water-processing carbon, and per-request
time-to-first-token. A consensus-ADMM scheduler assigns requests to
sites under any mix of the four objectives; two greedy baselines and a
brute-force oracle anchor the comparisons.
"""

from .admm import AdmmParams, Assignment, SolveReport, admm_solve, round_assignment, solve_mode
from .baselines import SCHEDULERS, flow_greedy_schedule, queue_split_schedule
from .energy import (
    CONDITIONING_FRACTION,
    COOLING_MULTIPLIER,
    EpochDuration,
    SiteEnergyBreakdown,
    cooling_energy,
    conditioning_energy,
    energy_cost,
    node_energy,
    site_energy_breakdown,
    site_it_energy,
    total_energy,
)
from .environment import (
    CopCurve,
    EnvironmentSample,
    EnvironmentTable,
    NodeSpec,
    SiteSpec,
    WaterParams,
    WorkingState,
    WorkingStateProfile,
    cop_at,
    load_environment,
)
from .errors import (
    ConfigError,
    ContractError,
    InfeasibleError,
    IngestError,
    ThermoschedError,
)
from .oracle import make_random_instance, oracle_solve
from .scenario import load_scenario, validate_scenario
from .scheduling import (
    METRICS,
    MODE_WEIGHTS,
    EpochCosts,
    ObjectiveWeights,
    build_epoch_costs,
    marginal_cost_vector,
    metric_normalizers,
    nodes_for_request,
    scalarize,
)
from .simulator import (
    EpochMetrics,
    ModeAggregate,
    RunSummary,
    Scenario,
    account_epoch,
    run_epoch,
    run_simulation,
)
from .water_carbon import (
    SiteCarbonBreakdown,
    SiteWaterBreakdown,
    blowdown_water,
    evaporative_water,
    grid_carbon,
    grid_water,
    site_carbon_breakdown,
    site_water_breakdown,
    total_carbon,
    total_water,
    water_carbon,
)
from .workload import (
    InferenceRequest,
    LatencyMatrix,
    ModelProfile,
    ingest_trace,
    load_latency_matrix,
    load_overhead,
    request_memory,
    synth_trace,
    ttft_estimate,
)

__version__ = "0.1.0"
