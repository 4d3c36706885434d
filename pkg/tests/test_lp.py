import math

import numpy as np
import pytest

from robusthedge.errors import NumericalFailure
from robusthedge.lp import EPS_LP, Constraint, LinearProgram, Status, from_arrays, residuals, solve

from lp_cases import random_lp

INF = math.inf


def test_single_constraint():
    sol = solve(LinearProgram("min", [1], [Constraint([1], ">=", 3)]))
    assert sol.status is Status.OPTIMAL
    assert sol.x[0] == pytest.approx(3)
    assert sol.duals[0] == pytest.approx(1)
    assert sol.objective == pytest.approx(3)


def test_infeasible_with_certificate():
    lp = LinearProgram("min", [1], [Constraint([1], ">=", 3), Constraint([1], "<=", 2)])
    sol = solve(lp)
    assert sol.status is Status.INFEASIBLE
    y = sol.certificate
    # y >= 0 on >= rows, y <= 0 on <= rows, A^T y <= 0 and b^T y > 0
    assert y[0] >= 0 and y[1] <= 0
    assert y[0] * 1 + y[1] * 1 <= 1e-12
    assert 3 * y[0] + 2 * y[1] > 0


def test_unbounded_ray():
    lp = LinearProgram("max", [1, 1], [Constraint([1, -1], "<=", 1)])
    sol = solve(lp)
    assert sol.status is Status.UNBOUNDED
    d = sol.certificate
    assert d[0] - d[1] <= 1e-12 and min(d) >= -1e-12 and d.sum() > 0


def test_gap3_primal():
    lp = LinearProgram(
        "min", [1, 0],
        [Constraint([1, -0.5], ">=", 0), Constraint([1, 0], ">=", 0), Constraint([1, 1], ">=", 1)],
        [(-INF, INF)] * 2,
    )
    sol = solve(lp)
    assert sol.objective == pytest.approx(1 / 3, abs=1e-12)
    assert sol.x[1] == pytest.approx(2 / 3, abs=1e-12)
    # duals of the primal are the extremal martingale measure
    assert sol.duals == pytest.approx([2 / 3, 0, 1 / 3], abs=1e-12)


def test_zero_rows_are_dropped():
    lp = LinearProgram("min", [1, 1], [Constraint([0, 0], "<=", 1), Constraint([1, 1], ">=", 2)])
    sol = solve(lp)
    assert sol.objective == pytest.approx(2)
    assert sol.duals[0] == 0
    bad = LinearProgram("min", [1], [Constraint([0], ">=", 1)])
    assert solve(bad).status is Status.INFEASIBLE


def test_bounds_and_equalities():
    lp = from_arrays("max", [3, 2], A_ub=[[1, 1]], b_ub=[4], A_eq=[[1, -1]], b_eq=[1],
                     bounds=[(-2, 2), (-INF, INF)])
    sol = solve(lp)
    assert sol.x == pytest.approx([2, 1])
    assert sol.objective == pytest.approx(8)


def test_no_constraints():
    assert solve(LinearProgram("min", [1, 2], [])).objective == 0
    assert solve(LinearProgram("min", [-1], [])).status is Status.UNBOUNDED


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    lp = from_arrays("min", c, A_ub=A, b_ub=[0, 0, 1])
    sol = solve(lp)
    assert sol.objective == pytest.approx(-0.05)


def test_rejects_malformed():
    with pytest.raises(ValueError):
        LinearProgram("min", [1, 2], [Constraint([1], "<=", 1)])
    with pytest.raises(ValueError):
        LinearProgram("min", [1], [Constraint([1], "<", 1)])
    with pytest.raises(ValueError):
        LinearProgram("min", [1], [], [(2, 1)])


@pytest.mark.parametrize("seed", range(40))
def test_certificates_on_random_lps(seed):
    lp = random_lp(np.random.default_rng(seed), 8, 8)
    try:
        sol = solve(lp)
    except NumericalFailure:
        pytest.fail("numerical failure on a small integer LP")
    if sol.status is Status.OPTIMAL:
        res, dual_obj = residuals(lp, sol.x, sol.duals)
        assert max(res) <= EPS_LP
        assert abs(sol.objective - dual_obj) <= EPS_LP * (1 + abs(sol.objective))
        # complementary slackness row by row
        c, A, b, rel, lo, hi = lp.arrays()
        assert np.all(np.abs(sol.duals * (A @ sol.x - b)) <= EPS_LP)


@pytest.mark.parametrize("seed", range(40))
def test_agrees_with_scipy(seed):
    scipy_opt = pytest.importorskip("scipy.optimize")
    lp = random_lp(np.random.default_rng(1000 + seed), 8, 8)
    c, A, b, rel, lo, hi = lp.arrays()
    sgn = 1 if lp.sense == "min" else -1
    ub = [(A[i], b[i]) if r == "<=" else (-A[i], -b[i]) for i, r in enumerate(rel) if r != "="]
    eq = [(A[i], b[i]) for i, r in enumerate(rel) if r == "="]
    ref = scipy_opt.linprog(
        sgn * c,
        A_ub=np.array([u for u, _ in ub]) if ub else None, b_ub=[v for _, v in ub] if ub else None,
        A_eq=np.array([u for u, _ in eq]) if eq else None, b_eq=[v for _, v in eq] if eq else None,
        bounds=[(None if math.isinf(l) else l, None if math.isinf(h) else h) for l, h in zip(lo, hi)],
        method="highs",
    )
    sol = solve(lp)
    expected = {0: Status.OPTIMAL, 2: Status.INFEASIBLE, 3: Status.UNBOUNDED}[ref.status]
    assert sol.status is expected
    if expected is Status.OPTIMAL:
        assert sol.objective == pytest.approx(sgn * ref.fun, abs=1e-7)
