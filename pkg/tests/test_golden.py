"""Regression lock: mode results on the bundled two-site scenario.

These values pin the entire pipeline (trace ingestion, scheduling,
accounting, aggregation, normalization) on a fixed input. They were
produced by this code; the test exists to catch unintended drift, so
any legitimate change to the numbers must update them deliberately.
"""

from __future__ import annotations

import dataclasses

import pytest

from thermosched.scenario import load_scenario
from thermosched.simulator import MODE_LABELS, run_simulation

# label -> (cost, carbon_kg, water_l, energy_kwh, ttft_mean_s, ttft_p95_s)
GOLDEN_AGGREGATES = {
    "opt-cost": (
        0.34019352185089974,
        0.6249793973204295,
        4.202538363828822,
        1.5463341902313625,
        2.796666666666667,
        7.5475,
    ),
    "opt-carbon": (
        0.34019352185089974,
        0.6249793973204295,
        4.202538363828822,
        1.5463341902313625,
        2.796666666666667,
        7.5475,
    ),
    "opt-water": (
        0.34019352185089974,
        0.6249793973204295,
        4.202538363828822,
        1.5463341902313625,
        2.796666666666667,
        7.5475,
    ),
    "opt-ttft": (
        0.7342953213367611,
        1.5344792996945416,
        7.131098472705277,
        2.6723393316195376,
        2.7669791666666668,
        7.50625,
    ),
    "opt-balance": (
        0.34019352185089974,
        0.6249793973204295,
        4.202538363828822,
        1.5463341902313625,
        2.796666666666667,
        7.5475,
    ),
    "queue-split": (
        0.9326958354755785,
        1.992314854994708,
        8.596342537426281,
        3.2391979434447307,
        2.7533333333333334,
        7.50625,
    ),
    "flow-greedy": (
        0.9326958354755785,
        1.992314854994708,
        8.596342537426281,
        3.2391979434447307,
        2.7533333333333334,
        7.50625,
    ),
}

FIELDS = ("cost", "carbon_kg", "water_l", "energy_kwh", "ttft_mean_s", "ttft_p95_s")


@pytest.fixture(scope="module")
def summary():
    sc = load_scenario("scenarios/tiny/scenario.json")
    sc = dataclasses.replace(sc, modes=tuple(MODE_LABELS))
    return run_simulation(sc)


def test_all_labels_present(summary):
    assert set(summary.aggregates) == set(GOLDEN_AGGREGATES)


@pytest.mark.parametrize("label", sorted(GOLDEN_AGGREGATES))
def test_aggregates_match_golden(summary, label):
    got = summary.aggregates[label]
    for field, want in zip(FIELDS, GOLDEN_AGGREGATES[label]):
        assert getattr(got, field) == pytest.approx(want, rel=1e-9), field


def test_request_conservation(summary):
    for label, agg in summary.aggregates.items():
        assert agg.requests == 6, label


def test_normalized_baseline_is_unity(summary):
    for metric, by_label in summary.normalized.items():
        assert by_label["queue-split"] == pytest.approx(1.0, rel=1e-12), metric
