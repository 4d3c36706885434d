"""The dense simplex solver, its certificates, and the exact oracle beside it."""
import numpy as np

from robusthedge import Status, solve
from robusthedge.lp import from_arrays
from robusthedge.oracle import exact_solve

# a small production problem: maximize profit under two resource limits
lp = from_arrays("max", [3, 5], A_ub=[[1, 0], [0, 2], [3, 2]], b_ub=[4, 12, 18])
sol = solve(lp)
print(sol.status.value, "objective", sol.objective, "x", sol.x)
print("shadow prices", sol.duals, "dual objective", sol.dual_objective)
print("residuals", sol.residuals)

ex = exact_solve(lp)
print("exact oracle:", ex.status.value, ex.objective, ex.x)

# x1 + x2 <= 1 and x1 + x2 >= 3 cannot both hold
bad = from_arrays("min", [1, 1], A_ub=[[1, 1]], b_ub=[1], A_ge=[[1, 1]], b_ge=[3])
sol = solve(bad)
y = np.asarray(sol.certificate)
print(sol.status.value, "Farkas certificate", y)

# maximize x1 with only x1 - x2 <= 1: slide along (1, 1) forever
unb = from_arrays("max", [1, 0], A_ub=[[1, -1]], b_ub=[1])
sol = solve(unb)
print(sol.status.value, "improving ray", sol.certificate)
assert sol.status is Status.UNBOUNDED and exact_solve(unb).status is Status.UNBOUNDED
