"""Static site descriptions and time-varying environment signals.

A fleet is a set of edge data center sites. Each site is internally
homogeneous (one node spec, one working-state profile) and sits in an
environment described per epoch by an :class:`EnvironmentSample`: ambient
temperature, time-of-use electricity price, grid carbon intensity, grid
water intensity, and water-processing energy intensities.

Ambient temperature enters the energy model through the cooling
efficiency (CoP). The CoP is derived from a partial-PUE curve: pPUE is
piecewise-linear in temperature between configured anchor points
(clamped outside the anchor range) and CoP = 3 / (pPUE - 1), so that the
total cooling energy 3 * E_IT / CoP equals (pPUE - 1) * E_IT.
"""

from __future__ import annotations

import csv
import enum
import os
from dataclasses import dataclass, field

from .errors import ConfigError, IngestError

# Partial-PUE anchors for an outside-air-cooled site: 1.05 at -3.9 C
# rising to 1.30 at 35 C.
DEFAULT_COP_ANCHORS = ((-3.9, 1.05), (35.0, 1.30))

ENVIRONMENT_COLUMNS = (
    "site_id",
    "epoch",
    "ambient_temp_c",
    "tou_price_per_kwh",
    "carbon_intensity_kg_per_kwh",
    "water_intensity_l_per_kwh",
    "potable_ei_kwh_per_l",
    "wastewater_ei_kwh_per_l",
)


class WorkingState(enum.Enum):
    ON = "on"
    IDLE = "idle"
    OFF = "off"


@dataclass(frozen=True)
class NodeSpec:
    """One compute node: thermal design power, load bandwidth, GPU count."""

    tdp_watts: float
    bandwidth_bytes_per_s: float
    gpu_count: int = 1

    def __post_init__(self):
        if self.tdp_watts <= 0:
            raise ConfigError(f"node tdp_watts must be > 0, got {self.tdp_watts}")
        if self.bandwidth_bytes_per_s <= 0:
            raise ConfigError(
                f"node bandwidth_bytes_per_s must be > 0, got {self.bandwidth_bytes_per_s}"
            )
        if self.gpu_count < 1:
            raise ConfigError(f"node gpu_count must be >= 1, got {self.gpu_count}")


@dataclass(frozen=True)
class WorkingStateProfile:
    """Power proportion of TDP drawn in each working state."""

    on: float = 1.0
    idle: float = 0.3
    off: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.off <= self.idle <= self.on <= 1.0):
            raise ConfigError(
                "state proportions must satisfy 0 <= off <= idle <= on <= 1, got "
                f"off={self.off}, idle={self.idle}, on={self.on}"
            )

    def proportion(self, state: WorkingState) -> float:
        return {
            WorkingState.ON: self.on,
            WorkingState.IDLE: self.idle,
            WorkingState.OFF: self.off,
        }[state]


@dataclass(frozen=True)
class WaterParams:
    """Cooling-tower water parameters.

    heat_capacity_kwh_per_l is the energy carried away per liter of
    evaporated water; blowdown_ratio is the fraction of circulating water
    discharged to purge dissolved solids.
    """

    heat_capacity_kwh_per_l: float = 0.68
    blowdown_ratio: float = 0.2

    def __post_init__(self):
        if self.heat_capacity_kwh_per_l <= 0:
            raise ConfigError(
                f"water heat capacity must be > 0, got {self.heat_capacity_kwh_per_l}"
            )
        if not (0.0 <= self.blowdown_ratio < 1.0):
            raise ConfigError(
                f"blowdown ratio must be in [0, 1), got {self.blowdown_ratio}"
            )


@dataclass(frozen=True)
class CopCurve:
    """Piecewise-linear partial-PUE anchors, (temperature C, pPUE) pairs."""

    anchors: tuple[tuple[float, float], ...] = DEFAULT_COP_ANCHORS

    def __post_init__(self):
        anchors = tuple((float(t), float(p)) for t, p in self.anchors)
        object.__setattr__(self, "anchors", anchors)
        if len(anchors) < 2:
            raise ConfigError("CoP curve needs at least 2 anchors")
        temps = [t for t, _ in anchors]
        if any(b <= a for a, b in zip(temps, temps[1:])):
            raise ConfigError(f"CoP curve temperatures must be strictly increasing: {temps}")
        if any(p <= 1.0 for _, p in anchors):
            raise ConfigError("partial PUE must be > 1 at every anchor")

    def ppue_at(self, temp_c: float) -> float:
        """Interpolated partial PUE, clamped to the endpoint anchors."""
        anchors = self.anchors
        if temp_c <= anchors[0][0]:
            return anchors[0][1]
        if temp_c >= anchors[-1][0]:
            return anchors[-1][1]
        for (t0, p0), (t1, p1) in zip(anchors, anchors[1:]):
            if temp_c <= t1:
                frac = (temp_c - t0) / (t1 - t0)
                return p0 + frac * (p1 - p0)
        raise AssertionError("unreachable: clamped above")


def cop_at(curve: CopCurve, temp_c: float) -> float:
    """Cooling efficiency at an ambient temperature.

    CoP = 3 / (pPUE - 1): heat removed per unit of CRAC energy, scaled so
    the full mechanical-cooling draw (3x CRAC) matches the partial-PUE
    overhead. Non-increasing in temperature for valid curves.
    """
    return 3.0 / (curve.ppue_at(temp_c) - 1.0)


@dataclass(frozen=True)
class SiteSpec:
    """An edge data center site: homogeneous nodes plus cooling/water config.

    node_mem_capacity_bytes is the memory one node contributes; it drives
    both the scheduling capacity (node_count * node_mem_capacity_bytes)
    and how many nodes an assigned workload switches on.
    """

    site_id: str
    node_count: int
    node: NodeSpec
    state_profile: WorkingStateProfile = WorkingStateProfile()
    water: WaterParams = WaterParams()
    cop_curve: CopCurve = CopCurve()
    region: str = ""
    node_mem_capacity_bytes: float = 8.0e10

    def __post_init__(self):
        if self.node_count < 1:
            raise ConfigError(f"site {self.site_id}: node_count must be >= 1")
        if self.node_mem_capacity_bytes <= 0:
            raise ConfigError(f"site {self.site_id}: node_mem_capacity_bytes must be > 0")

    @property
    def mem_capacity_bytes(self) -> float:
        return self.node_count * self.node_mem_capacity_bytes

    def cop(self, temp_c: float) -> float:
        return cop_at(self.cop_curve, temp_c)


@dataclass(frozen=True)
class EnvironmentSample:
    """Exogenous signals for one site over one epoch."""

    site_id: str
    epoch: int
    ambient_temp_c: float
    tou_price_per_kwh: float
    carbon_intensity_kg_per_kwh: float
    water_intensity_l_per_kwh: float
    potable_ei_kwh_per_l: float
    wastewater_ei_kwh_per_l: float

    def __post_init__(self):
        nonneg = (
            ("tou_price_per_kwh", self.tou_price_per_kwh),
            ("carbon_intensity_kg_per_kwh", self.carbon_intensity_kg_per_kwh),
            ("water_intensity_l_per_kwh", self.water_intensity_l_per_kwh),
            ("potable_ei_kwh_per_l", self.potable_ei_kwh_per_l),
            ("wastewater_ei_kwh_per_l", self.wastewater_ei_kwh_per_l),
        )
        for name, value in nonneg:
            if value < 0:
                raise ConfigError(f"{name} must be >= 0, got {value}")


@dataclass
class EnvironmentTable:
    """Per-(site, epoch) samples, complete over sites x epochs."""

    samples: dict[tuple[str, int], EnvironmentSample] = field(default_factory=dict)

    @property
    def sites(self) -> list[str]:
        return sorted({s for s, _ in self.samples})

    @property
    def epochs(self) -> list[int]:
        return sorted({e for _, e in self.samples})

    def get(self, site_id: str, epoch: int) -> EnvironmentSample:
        try:
            return self.samples[(site_id, epoch)]
        except KeyError:
            raise IngestError(f"no environment sample for site {site_id!r} epoch {epoch}") from None

    def for_epoch(self, epoch: int) -> dict[str, EnvironmentSample]:
        return {s: self.samples[(s, e)] for s, e in self.samples if e == epoch}

    def validate_complete(self) -> None:
        """Every site must cover every epoch seen anywhere in the table."""
        epochs = self.epochs
        for site in self.sites:
            for epoch in epochs:
                if (site, epoch) not in self.samples:
                    raise IngestError(
                        f"environment table missing epoch {epoch} for site {site!r}"
                    )


def load_environment(path, known_sites: list[str] | None = None) -> EnvironmentTable:
    """Load the per-(site, epoch) environment CSV.

    The grid must be complete: every site appearing in the file must have
    a row for every epoch appearing in the file. Missing pairs raise
    rather than interpolate. Errors name the offending file row.
    """
    if not os.path.exists(path):
        raise IngestError(f"environment file not found: {path}")
    table = EnvironmentTable()
    known = set(known_sites) if known_sites is not None else None
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != ENVIRONMENT_COLUMNS:
            raise IngestError(
                f"{path}: expected header {','.join(ENVIRONMENT_COLUMNS)}, "
                f"got {reader.fieldnames}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                sample = EnvironmentSample(
                    site_id=row["site_id"],
                    epoch=int(row["epoch"]),
                    ambient_temp_c=float(row["ambient_temp_c"]),
                    tou_price_per_kwh=float(row["tou_price_per_kwh"]),
                    carbon_intensity_kg_per_kwh=float(row["carbon_intensity_kg_per_kwh"]),
                    water_intensity_l_per_kwh=float(row["water_intensity_l_per_kwh"]),
                    potable_ei_kwh_per_l=float(row["potable_ei_kwh_per_l"]),
                    wastewater_ei_kwh_per_l=float(row["wastewater_ei_kwh_per_l"]),
                )
            except (ConfigError, KeyError, TypeError, ValueError) as exc:
                raise IngestError(f"{path} row {lineno}: {exc}") from exc
            if known is not None and sample.site_id not in known:
                raise IngestError(f"{path} row {lineno}: unknown site id {sample.site_id!r}")
            key = (sample.site_id, sample.epoch)
            if key in table.samples:
                raise IngestError(
                    f"{path} row {lineno}: duplicate sample for site "
                    f"{sample.site_id!r} epoch {sample.epoch}"
                )
            table.samples[key] = sample
    table.validate_complete()
    return table
