"""Per-site energy accounting: IT load, cooling, conditioning, cost.

All quantities are kWh per epoch. The watts-to-kWh conversion happens
once, in :func:`node_energy`; everything downstream works in kWh.

The chain per site and epoch:

    e_it   = sum over nodes of duration_h * proportion(state) * tdp_kw
    e_crac = e_it / cop                  (CRAC draw)
    e_cooling = 3 * e_crac               (CRAC + chillers + other gear)
    e_cond = 0.13 * e_it                 (power conditioning)
    e_total = e_it + e_cooling + e_cond
    cost   = sum over sites of e_total * tou_price
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Iterable, Mapping, Sequence

from .environment import EnvironmentSample, NodeSpec, SiteSpec, WorkingState, WorkingStateProfile
from .errors import ConfigError, ContractError

# Power conditioning draws ~13% of the IT load.
CONDITIONING_FRACTION = 0.13
# Chillers and remaining mechanical gear scale the CRAC draw to the
# whole cooling system.
COOLING_MULTIPLIER = 3.0


@dataclass(frozen=True)
class EpochDuration:
    hours: float

    def __post_init__(self):
        if self.hours <= 0:
            raise ConfigError(f"epoch duration must be > 0 hours, got {self.hours}")

    @property
    def seconds(self) -> float:
        return self.hours * 3600.0


@dataclass(frozen=True)
class SiteEnergyBreakdown:
    site_id: str
    epoch: int
    e_it: float
    e_crac: float
    e_cooling: float
    e_conditioning: float
    e_total: float


def node_energy(
    state: WorkingState,
    duration: EpochDuration,
    node: NodeSpec,
    profile: WorkingStateProfile,
) -> float:
    """Energy one node draws over the epoch, in kWh."""
    return duration.hours * profile.proportion(state) * (node.tdp_watts / 1000.0)


def site_it_energy(
    node_states: Sequence[WorkingState],
    duration: EpochDuration,
    site: SiteSpec,
) -> float:
    """Total IT energy across the site's nodes, in kWh."""
    if len(node_states) != site.node_count:
        raise ContractError(
            f"site {site.site_id}: expected {site.node_count} node states, "
            f"got {len(node_states)}"
        )
    return sum(
        node_energy(state, duration, site.node, site.state_profile) for state in node_states
    )


def cooling_energy(e_it: float, cop: float) -> tuple[float, float]:
    """(CRAC energy, whole cooling energy) for a given IT load and CoP."""
    if cop <= 0:
        raise ContractError(f"cop must be > 0, got {cop}")
    e_crac = e_it / cop
    return e_crac, COOLING_MULTIPLIER * e_crac


def conditioning_energy(e_it: float) -> float:
    return CONDITIONING_FRACTION * e_it


def total_energy(e_it: float, e_cooling: float, e_conditioning: float) -> float:
    return e_it + e_cooling + e_conditioning


def site_energy_breakdown(
    site_id: str,
    epoch: int,
    e_it: float,
    cop: float,
) -> SiteEnergyBreakdown:
    """Assemble the full per-site breakdown from IT energy and CoP."""
    e_crac, e_cooling = cooling_energy(e_it, cop)
    e_cond = conditioning_energy(e_it)
    return SiteEnergyBreakdown(
        site_id=site_id,
        epoch=epoch,
        e_it=e_it,
        e_crac=e_crac,
        e_cooling=e_cooling,
        e_conditioning=e_cond,
        e_total=total_energy(e_it, e_cooling, e_cond),
    )


def energy_cost(
    breakdowns: Iterable[SiteEnergyBreakdown],
    env: Mapping[str, EnvironmentSample],
) -> float:
    """Fleet energy cost: sum over sites of e_total * TOU price."""
    breakdowns = list(breakdowns)
    sites = {b.site_id for b in breakdowns}
    if sites - set(env):
        raise ContractError(f"missing environment for sites: {sorted(sites - set(env))}")
    return sum(b.e_total * env[b.site_id].tou_price_per_kwh for b in breakdowns)
