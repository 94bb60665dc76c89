from __future__ import annotations

import numpy as np
import pytest

from thermosched.energy import (
    EpochDuration,
    conditioning_energy,
    cooling_energy,
    energy_cost,
    node_energy,
    site_energy_breakdown,
    site_it_energy,
    total_energy,
)
from thermosched.environment import (
    EnvironmentSample,
    NodeSpec,
    SiteSpec,
    WorkingState,
    WorkingStateProfile,
    cop_at,
    CopCurve,
)
from thermosched.errors import ConfigError, ContractError

NODE = NodeSpec(tdp_watts=400, bandwidth_bytes_per_s=2e9)
PROFILE = WorkingStateProfile()  # on=1.0, idle=0.3, off=0.0
HOUR = EpochDuration(1.0)


def _sample(site_id, epoch, tou):
    return EnvironmentSample(
        site_id=site_id,
        epoch=epoch,
        ambient_temp_c=20.0,
        tou_price_per_kwh=tou,
        carbon_intensity_kg_per_kwh=0.7,
        water_intensity_l_per_kwh=0.2,
        potable_ei_kwh_per_l=0.004,
        wastewater_ei_kwh_per_l=0.001,
    )


def test_node_energy_on_one_hour():
    assert node_energy(WorkingState.ON, HOUR, NODE, PROFILE) == pytest.approx(0.4, rel=1e-9)


def test_node_energy_off_is_zero():
    assert node_energy(WorkingState.OFF, EpochDuration(17.0), NODE, PROFILE) == 0.0


def test_node_energy_idle_half_hour():
    got = node_energy(WorkingState.IDLE, EpochDuration(0.5), NODE, PROFILE)
    assert got == pytest.approx(0.06, rel=1e-9)


def test_epoch_duration_positive():
    with pytest.raises(ConfigError):
        EpochDuration(0.0)
    assert EpochDuration(0.5).seconds == 1800.0


def _site(node_count):
    return SiteSpec(site_id="s", node_count=node_count, node=NODE)


def test_site_it_energy_all_on():
    got = site_it_energy([WorkingState.ON] * 3, HOUR, _site(3))
    assert got == pytest.approx(1.2, rel=1e-9)


def test_site_it_energy_all_off():
    assert site_it_energy([WorkingState.OFF] * 5, HOUR, _site(5)) == 0.0


def test_site_it_energy_mixed():
    states = [WorkingState.ON, WorkingState.IDLE, WorkingState.OFF]
    assert site_it_energy(states, HOUR, _site(3)) == pytest.approx(0.52, rel=1e-9)


def test_site_it_energy_length_mismatch():
    with pytest.raises(ContractError):
        site_it_energy([WorkingState.ON], HOUR, _site(3))


def test_cooling_energy_hot_anchor_cop():
    assert cooling_energy(10.0, 10.0) == pytest.approx((1.0, 3.0), rel=1e-9)


def test_cooling_energy_zero_load():
    assert cooling_energy(0.0, 10.0) == (0.0, 0.0)


def test_cooling_energy_cold_anchor_cop():
    e_crac, e_cooling = cooling_energy(10.0, 60.0)
    assert e_crac == pytest.approx(1.0 / 6.0, rel=1e-9)
    assert e_cooling == pytest.approx(0.5, rel=1e-9)


def test_cooling_energy_rejects_nonpositive_cop():
    with pytest.raises(ContractError):
        cooling_energy(1.0, 0.0)


def test_conditioning_energy_values():
    assert conditioning_energy(10.0) == pytest.approx(1.3, rel=1e-9)
    assert conditioning_energy(0.0) == 0.0
    assert conditioning_energy(0.52) == pytest.approx(0.0676, rel=1e-9)


def test_total_energy_values():
    assert total_energy(10.0, 3.0, 1.3) == pytest.approx(14.3, rel=1e-9)
    assert total_energy(0.0, 0.0, 0.0) == 0.0
    assert total_energy(10.0, 0.5, 1.3) == pytest.approx(11.8, rel=1e-9)


def test_energy_cost_single_site():
    b = site_energy_breakdown("a", 0, 10.0, 10.0)
    got = energy_cost([b], {"a": _sample("a", 0, 0.30)})
    assert got == pytest.approx(4.29, rel=1e-9)


def test_energy_cost_two_sites():
    hot = site_energy_breakdown("a", 0, 10.0, 10.0)   # e_total 14.3
    cold = site_energy_breakdown("b", 0, 10.0, 60.0)  # e_total 11.8
    got = energy_cost(
        [hot, cold],
        {"a": _sample("a", 0, 0.30), "b": _sample("b", 0, 0.10)},
    )
    assert got == pytest.approx(5.47, rel=1e-9)


def test_energy_cost_empty():
    assert energy_cost([], {}) == 0.0


def test_energy_cost_site_mismatch():
    b = site_energy_breakdown("a", 0, 10.0, 10.0)
    with pytest.raises(ContractError):
        energy_cost([b], {"b": _sample("b", 0, 0.30)})


def test_breakdown_component_relations():
    b = site_energy_breakdown("a", 3, 7.3, 12.5)
    assert b.e_cooling == 3.0 * b.e_crac
    assert b.e_total == pytest.approx(b.e_it + b.e_cooling + b.e_conditioning, rel=1e-9)


def test_accounting_identity_randomized():
    # e_total == e_it * (1 + 0.13 + 3/cop) over a wide random sweep
    rng = np.random.default_rng(101)
    for _ in range(1000):
        e_it = float(rng.uniform(0.0, 500.0))
        cop = float(rng.uniform(1.0, 80.0))
        b = site_energy_breakdown("a", 0, e_it, cop)
        assert b.e_total == pytest.approx(e_it * (1.13 + 3.0 / cop), rel=1e-9)


def test_tdp_homogeneity():
    # scaling node TDP by k scales every component and the cost by k
    k = 3.7
    small = NodeSpec(tdp_watts=400, bandwidth_bytes_per_s=2e9)
    big = NodeSpec(tdp_watts=400 * k, bandwidth_bytes_per_s=2e9)
    states = [WorkingState.ON, WorkingState.IDLE, WorkingState.ON]
    e_small = site_it_energy(states, HOUR, SiteSpec(site_id="s", node_count=3, node=small))
    e_big = site_it_energy(states, HOUR, SiteSpec(site_id="s", node_count=3, node=big))
    assert e_big == pytest.approx(k * e_small, rel=1e-9)
    b_small = site_energy_breakdown("s", 0, e_small, 12.0)
    b_big = site_energy_breakdown("s", 0, e_big, 12.0)
    for field in ("e_it", "e_crac", "e_cooling", "e_conditioning", "e_total"):
        assert getattr(b_big, field) == pytest.approx(
            k * getattr(b_small, field), rel=1e-9
        )


def test_temperature_monotonicity():
    curve = CopCurve()
    temps = np.linspace(-10.0, 45.0, 57)
    totals = [
        site_energy_breakdown("s", 0, 10.0, cop_at(curve, t)).e_total for t in temps
    ]
    assert all(a <= b + 1e-12 for a, b in zip(totals, totals[1:]))
