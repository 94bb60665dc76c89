"""
Watching the consensus solver converge, and checking it against brute force
===========================================================================

Loads a bundled 12-request / 4-site instance, solves it with the
balanced weight preset, prints the residual trajectory, then enumerates
all 16.7M integral assignments to confirm the solver found the optimum.
"""

from thermosched.admm import admm_solve
from thermosched.oracle import instance_from_json, oracle_solve
from thermosched.scheduling import MODE_WEIGHTS

with open("scenarios/instances/seed7.json") as fh:
    costs = instance_from_json(fh.read())

weights = MODE_WEIGHTS["opt-balance"]
report = admm_solve(costs, weights, mode="opt-balance")

print(f"converged={report.converged} after {report.iterations} iterations")
print(f"{'iter':>5} {'primal':>12} {'dual':>12}")
for k in range(0, report.iterations, max(1, report.iterations // 10)):
    print(f"{k:>5} {report.primal_residuals[k]:>12.3e} {report.dual_residuals[k]:>12.3e}")

# The primal residual measures disagreement between the per-request
# blocks and the consensus copy; the dual residual measures how much the
# consensus itself still moves. Both must fall below 1e-4.

print(f"\nfractional objective: {report.objective_fractional:.12f}")
print(f"integral objective:   {report.objective_integral:.12f}")

# Brute force over every assignment of 12 requests to 4 sites. This is
# only feasible because the instance is tiny; the point of the solver is
# that real epochs are not.
oracle_value, oracle_assignment = oracle_solve(costs, weights)
gap = report.objective_integral - oracle_value
print(f"enumerated optimum:   {oracle_value:.12f}  (gap {gap:+.2e})")
print(f"oracle assignment:    {[int(s) for s in oracle_assignment]}")
