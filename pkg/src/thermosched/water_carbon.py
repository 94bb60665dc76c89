"""Water and carbon accounting per site and epoch.

Water has three parts: evaporative (on-site cooling towers, driven by
the IT heat load), blowdown (purge water, evaporative scaled by
1/(1 - D)), and grid (off-site, proportional to total energy via the
grid's water intensity). Carbon has two: grid electricity and the
electricity embedded in water processing.

Water-attributed carbon pairs the potable intensity with the on-site
water (blowdown + evaporative) and the wastewater intensity with grid
water:

    c_water = ci * ((w_blowdown + w_evap) * ei_potable + w_grid * ei_wastewater)

The pairing is deliberate and locked by a regression test; swapping the
intensities changes the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Iterable

from .environment import EnvironmentSample, WaterParams
from .errors import ConfigError, ContractError


@dataclass(frozen=True)
class SiteWaterBreakdown:
    site_id: str
    epoch: int
    w_evap_l: float
    w_blowdown_l: float
    w_grid_l: float

    @property
    def total_l(self) -> float:
        return self.w_evap_l + self.w_blowdown_l + self.w_grid_l


@dataclass(frozen=True)
class SiteCarbonBreakdown:
    site_id: str
    epoch: int
    c_grid_kg: float
    c_water_kg: float

    @property
    def total_kg(self) -> float:
        return self.c_grid_kg + self.c_water_kg


def evaporative_water(e_it: float, params: WaterParams) -> float:
    """Liters evaporated to reject the IT heat load.

    The full IT energy is treated as heat removed evaporatively.
    """
    if params.heat_capacity_kwh_per_l <= 0:
        raise ConfigError("water heat capacity must be > 0")
    return e_it / params.heat_capacity_kwh_per_l


def blowdown_water(w_evap: float, params: WaterParams) -> float:
    if not (0.0 <= params.blowdown_ratio < 1.0):
        raise ConfigError(f"blowdown ratio must be in [0, 1), got {params.blowdown_ratio}")
    return w_evap / (1.0 - params.blowdown_ratio)


def grid_water(e_total: float, water_intensity_l_per_kwh: float) -> float:
    return e_total * water_intensity_l_per_kwh


def site_water_breakdown(
    site_id: str,
    epoch: int,
    e_it: float,
    e_total: float,
    params: WaterParams,
    water_intensity_l_per_kwh: float,
) -> SiteWaterBreakdown:
    w_evap = evaporative_water(e_it, params)
    return SiteWaterBreakdown(
        site_id=site_id,
        epoch=epoch,
        w_evap_l=w_evap,
        w_blowdown_l=blowdown_water(w_evap, params),
        w_grid_l=grid_water(e_total, water_intensity_l_per_kwh),
    )


def total_water(breakdowns: Iterable[SiteWaterBreakdown]) -> float:
    return sum(b.total_l for b in breakdowns)


def grid_carbon(e_total: float, carbon_intensity_kg_per_kwh: float) -> float:
    return carbon_intensity_kg_per_kwh * e_total


def water_carbon(w: SiteWaterBreakdown, env: EnvironmentSample) -> float:
    """Carbon from the electricity embedded in water processing, kg."""
    if w.site_id != env.site_id or w.epoch != env.epoch:
        raise ContractError(
            f"water breakdown ({w.site_id}, {w.epoch}) does not match "
            f"environment sample ({env.site_id}, {env.epoch})"
        )
    return env.carbon_intensity_kg_per_kwh * (
        (w.w_blowdown_l + w.w_evap_l) * env.potable_ei_kwh_per_l
        + w.w_grid_l * env.wastewater_ei_kwh_per_l
    )


def site_carbon_breakdown(
    w: SiteWaterBreakdown,
    e_total: float,
    env: EnvironmentSample,
) -> SiteCarbonBreakdown:
    return SiteCarbonBreakdown(
        site_id=w.site_id,
        epoch=w.epoch,
        c_grid_kg=grid_carbon(e_total, env.carbon_intensity_kg_per_kwh),
        c_water_kg=water_carbon(w, env),
    )


def total_carbon(breakdowns: Iterable[SiteCarbonBreakdown]) -> float:
    return sum(b.total_kg for b in breakdowns)
