from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from thermosched.admm import (
    AdmmParams,
    Assignment,
    admm_solve,
    project_rows_to_simplex,
    repair_capacity,
    round_assignment,
    solve_mode,
)
from thermosched.errors import ContractError, InfeasibleError
from thermosched.oracle import instance_from_json, make_random_instance
from thermosched.scheduling import MODE_WEIGHTS, EpochCosts, ObjectiveWeights, scalarize

BALANCE = MODE_WEIGHTS["opt-balance"]
SEED7_PATH = Path(__file__).resolve().parent.parent / "scenarios" / "instances" / "seed7.json"


def _costs(vectors, demand=None, capacity=None):
    vectors = np.asarray(vectors, dtype=float)
    n_req, n_sites = vectors.shape[:2]
    return EpochCosts(
        request_ids=[f"r{i}" for i in range(n_req)],
        site_ids=[f"s{j}" for j in range(n_sites)],
        vectors=vectors,
        demand=np.ones(n_req) if demand is None else np.asarray(demand, dtype=float),
        capacity=(
            np.full(n_sites, float(max(n_req, 1)))
            if capacity is None
            else np.asarray(capacity, dtype=float)
        ),
    )


# ------------------------------------------------------------- parameters


def test_params_defaults():
    p = AdmmParams()
    assert p.rho == 1.0
    assert p.max_iters == 500
    assert p.eps_primal == 1e-4
    assert p.eps_dual == 1e-4


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rho": 0.0},
        {"rho": -1.0},
        {"max_iters": 0},
        {"eps_primal": 0.0},
        {"eps_dual": -1e-9},
    ],
)
def test_params_rejects(kwargs):
    with pytest.raises(ContractError):
        AdmmParams(**kwargs)


# ------------------------------------------------------------- assignment


def test_assignment_fractional_rows_must_sum_to_one():
    with pytest.raises(ContractError):
        Assignment(np.array([[0.3, 0.3]]), integral=False)


def test_assignment_rejects_out_of_box():
    with pytest.raises(ContractError):
        Assignment(np.array([[1.4, -0.4]]), integral=False)


def test_assignment_integral_must_be_one_hot():
    with pytest.raises(ContractError):
        Assignment(np.array([[0.5, 0.5]]), integral=True)
    with pytest.raises(ContractError):
        Assignment(np.array([[1.0, 1.0]]), integral=True)


def test_assignment_must_be_2d():
    with pytest.raises(ContractError):
        Assignment(np.ones(3), integral=False)


def test_site_indices_requires_integral():
    frac = Assignment(np.array([[0.5, 0.5]]), integral=False)
    with pytest.raises(ContractError):
        frac.site_indices()
    hot = Assignment(np.array([[0.0, 1.0]]), integral=True)
    assert hot.site_indices().tolist() == [1]


# ------------------------------------------------------- simplex projection


def _reference_projection(row):
    # Held, Wolfe & Crowder style: find theta so sum(max(v - theta, 0)) = 1
    u = np.sort(row)[::-1]
    css = np.cumsum(u)
    rho = max(j for j in range(len(row)) if u[j] * (j + 1) > css[j] - 1.0)
    theta = (css[rho] - 1.0) / (rho + 1)
    return np.maximum(row - theta, 0.0)


def test_projection_leaves_simplex_points_alone():
    v = np.array([[0.2, 0.5, 0.3], [1.0, 0.0, 0.0]])
    assert np.allclose(project_rows_to_simplex(v), v, atol=1e-12)


def test_projection_known_values():
    got = project_rows_to_simplex(np.array([[0.5, 0.5, 2.0]]))
    assert np.allclose(got, [[0.0, 0.0, 1.0]])
    got = project_rows_to_simplex(np.array([[0.2, 0.3]]))
    assert np.allclose(got, [[0.45, 0.55]])


def test_projection_matches_reference_rows():
    rng = np.random.default_rng(11)
    v = rng.normal(0.0, 2.0, size=(40, 6))
    got = project_rows_to_simplex(v)
    for i in range(v.shape[0]):
        assert np.allclose(got[i], _reference_projection(v[i]), atol=1e-12)


def test_projection_output_is_feasible_and_idempotent():
    rng = np.random.default_rng(5)
    v = rng.normal(size=(25, 4))
    p = project_rows_to_simplex(v)
    assert (p >= 0).all()
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(project_rows_to_simplex(p), p, atol=1e-12)


def test_projection_empty():
    out = project_rows_to_simplex(np.zeros((0, 3)))
    assert out.shape == (0, 3)


# --------------------------------------------------------- capacity repair


def test_repair_capacity_moves_overflow_to_cheapest_open_site():
    z = np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    demand = np.array([1.0, 1.0])
    capacity = np.array([1.0, 1.0, 1.0])
    cost = np.array([[0.1, 0.5, 0.4], [0.1, 0.2, 0.9]])
    fixed = repair_capacity(z, demand, capacity, cost)
    assert np.allclose(fixed.sum(axis=1), 1.0)
    assert (fixed.T @ demand <= capacity + 1e-6).all()
    # request 1 has the smaller regret (0.2 - 0.1 vs 0.4 - 0.1) so it is
    # the one displaced, landing on its own cheapest open site (index 1)
    assert fixed[1, 1] == pytest.approx(1.0)
    assert fixed[0, 0] == pytest.approx(1.0)


def test_repair_capacity_noop_when_feasible():
    z = np.array([[0.5, 0.5]])
    out = repair_capacity(z, np.array([1.0]), np.array([2.0, 2.0]), np.zeros((1, 2)))
    assert np.array_equal(out, z)


def test_repair_capacity_preserves_row_sums():
    rng = np.random.default_rng(2)
    z = project_rows_to_simplex(rng.normal(size=(8, 3)))
    demand = rng.integers(1, 4, size=8).astype(float)
    capacity = np.full(3, demand.sum() / 2.0)
    cost = rng.uniform(0.0, 1.0, size=(8, 3))
    fixed = repair_capacity(z, demand, capacity, cost)
    assert np.allclose(fixed.sum(axis=1), z.sum(axis=1), atol=1e-9)
    assert (fixed >= -1e-12).all()


# ---------------------------------------------------------------- rounding


def test_round_assignment_argmax():
    frac = Assignment(np.array([[0.2, 0.8], [0.7, 0.3]]), integral=False)
    out = round_assignment(frac, _costs(np.ones((2, 2, 4))), BALANCE)
    assert out.site_indices().tolist() == [1, 0]


def test_round_assignment_tie_prefers_lower_site_index():
    frac = Assignment(np.array([[0.5, 0.5]]), integral=False)
    out = round_assignment(frac, _costs(np.ones((1, 2, 4))), BALANCE)
    assert out.site_indices().tolist() == [0]


def test_round_assignment_idempotent_on_one_hot():
    x = np.array([[1.0, 0.0], [0.0, 1.0]])
    frac = Assignment(x, integral=False)
    out = round_assignment(frac, _costs(np.ones((2, 2, 4))), BALANCE)
    assert np.array_equal(out.x, x)


def test_round_assignment_evicts_smallest_fraction():
    # both want site 0 but it only holds one node; request 0 is the less
    # committed one (0.6 < 0.9) so it is displaced to its runner-up site
    frac = Assignment(np.array([[0.6, 0.4], [0.9, 0.1]]), integral=False)
    costs = _costs(np.ones((2, 2, 4)), capacity=[1.0, 1.0])
    out = round_assignment(frac, costs, BALANCE)
    assert out.site_indices().tolist() == [1, 0]


def test_round_assignment_eviction_tie_breaks_by_request_index():
    frac = Assignment(np.array([[0.8, 0.2], [0.8, 0.2]]), integral=False)
    costs = _costs(np.ones((2, 2, 4)), capacity=[1.0, 1.0])
    out = round_assignment(frac, costs, BALANCE)
    assert out.site_indices().tolist() == [1, 0]


def test_round_assignment_infeasible_names_request():
    frac = Assignment(np.array([[1.0, 0.0], [1.0, 0.0]]), integral=False)
    costs = _costs(np.ones((2, 2, 4)), capacity=[1.0, 0.0])
    with pytest.raises(InfeasibleError, match="r0"):
        round_assignment(frac, costs, BALANCE)


def test_round_assignment_rejects_broken_rows():
    frac = Assignment(np.array([[0.5, 0.5]]), integral=False)
    frac.x = np.array([[0.2, 0.2]])  # corrupt after validation
    with pytest.raises(ContractError):
        round_assignment(frac, _costs(np.ones((1, 2, 4))), BALANCE)


# ------------------------------------------------------------------ solver


def test_solver_single_site_goes_all_in():
    report = admm_solve(_costs(np.ones((1, 1, 4))), BALANCE)
    assert report.converged
    assert np.allclose(report.fractional.x, [[1.0]], atol=1e-6)
    assert report.integral.site_indices().tolist() == [0]


def test_solver_symmetric_sites_split_evenly():
    report = admm_solve(_costs(np.ones((1, 2, 4))), BALANCE)
    assert report.converged
    assert np.allclose(report.fractional.x, [[0.5, 0.5]], atol=1e-4)
    assert report.integral.site_indices().tolist() == [0]


def test_solver_finds_dominant_site():
    vectors = np.ones((1, 2, 4))
    vectors[0, 1] = 0.1
    report = admm_solve(_costs(vectors), BALANCE)
    assert report.converged
    assert report.integral.site_indices().tolist() == [1]
    assert report.fractional.x[0, 1] > 0.99


def test_solver_respects_binding_capacity():
    vectors = np.ones((2, 2, 4))
    vectors[:, 0] = 0.2
    vectors[0, 0] = 0.1
    report = admm_solve(_costs(vectors, capacity=[1.0, 1.0]), BALANCE)
    sites = report.integral.site_indices()
    loads = np.bincount(sites, minlength=2).astype(float)
    assert (loads <= 1.0).all()
    assert sites.tolist() == [0, 1]  # request 0 keeps the cheaper site


def test_solver_histories_match_iteration_count():
    report = admm_solve(make_random_instance(3), BALANCE)
    assert len(report.primal_residuals) == report.iterations
    assert len(report.dual_residuals) == report.iterations
    assert report.iterations >= 1


def test_solver_iteration_cap_flags_nonconvergence():
    report = admm_solve(make_random_instance(3), BALANCE, AdmmParams(max_iters=1))
    assert report.iterations == 1
    assert not report.converged
    assert len(report.primal_residuals) == 1
    # the best iterate so far is still a usable plan
    assert np.allclose(report.fractional.x.sum(axis=1), 1.0, atol=1e-6)


def test_solver_rejects_demand_above_fleet_capacity():
    with pytest.raises(InfeasibleError):
        admm_solve(_costs(np.ones((3, 2, 4)), capacity=[1.0, 1.0]), BALANCE)


def test_solver_empty_problem():
    report = admm_solve(_costs(np.zeros((0, 2, 4))), BALANCE)
    assert report.converged
    assert report.iterations == 0
    assert report.fractional.x.shape == (0, 2)
    assert report.metrics_integral == {"cost": 0.0, "carbon": 0.0, "water": 0.0, "ttft": 0.0}


def test_solver_metrics_match_assignments():
    inst = make_random_instance(9)
    report = admm_solve(inst, BALANCE)
    idx = np.arange(inst.num_requests)
    sites = report.integral.site_indices()
    for k, name in enumerate(("cost", "carbon", "water", "ttft")):
        manual = float(inst.vectors[idx, sites, k].sum())
        assert report.metrics_integral[name] == pytest.approx(manual, rel=1e-12)
        frac_manual = float(np.einsum("is,is->", inst.vectors[:, :, k], report.fractional.x))
        assert report.metrics_fractional[name] == pytest.approx(frac_manual, rel=1e-9)


def test_solver_objective_consistent_with_scalarized_costs():
    inst = make_random_instance(4)
    weights = ObjectiveWeights(0.4, 0.3, 0.2, 0.1)
    report = admm_solve(inst, weights)
    c = scalarize(inst, weights)
    idx = np.arange(inst.num_requests)
    manual = float(c[idx, report.integral.site_indices()].sum())
    assert report.objective_integral == pytest.approx(manual, rel=1e-12)
    assert report.objective_integral >= report.objective_fractional - 1e-9


def test_solver_deterministic_reports():
    inst = make_random_instance(12)
    a = admm_solve(inst, BALANCE, mode="opt-balance")
    b = admm_solve(inst, BALANCE, mode="opt-balance")
    assert a.to_json() == b.to_json()


def test_solve_mode_rejects_unknown():
    with pytest.raises(ContractError, match="opt-everything"):
        solve_mode(_costs(np.ones((1, 1, 4))), "opt-everything")


def test_solve_mode_tags_report():
    report = solve_mode(_costs(np.ones((1, 1, 4))), "opt-water")
    assert report.mode == "opt-water"


def test_report_json_round_trips():
    report = solve_mode(make_random_instance(6), "opt-balance")
    doc = json.loads(report.to_json())
    assert doc["mode"] == "opt-balance"
    assert doc["iterations"] == report.iterations
    assert len(doc["assignment"]) == len(doc["request_ids"])


def test_bundled_instance_residual_trend():
    # past the burn-in, the primal residual ten iterations later never
    # exceeds the current one (unless the run already converged)
    inst = instance_from_json(SEED7_PATH.read_text())
    for mode in MODE_WEIGHTS:
        report = solve_mode(inst, mode)
        if report.converged:
            continue
        ph = report.primal_residuals
        assert all(
            ph[k + 10] <= ph[k] + 1e-12 for k in range(20, len(ph) - 10)
        ), f"{mode}: primal residual trend broken"
