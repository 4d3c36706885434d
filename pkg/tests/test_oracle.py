import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from robusthedge.errors import NotConvergent, TooLarge
from robusthedge.hedge import build_dual, build_primal, in_cone
from robusthedge.lp import Constraint, LinearProgram, Status, solve
from robusthedge.models import gap3_instance, gen_interval_instance
from robusthedge.oracle import ExactLp, check_sequential_closure, closedness_probe, cross_check, exact_solve
from robusthedge.tree import make_strategy, wealth

from conftest import LOW, MID
from lp_cases import random_lp

INF = math.inf


def test_single_constraint():
    sol = exact_solve(LinearProgram("min", [1], [Constraint([1], ">=", 3)]))
    assert sol.status is Status.OPTIMAL and sol.objective == 3 and sol.x == (3,)


def test_gap3_primal_and_dual(gap3):
    p = exact_solve(build_primal(gap3, exact=True))
    assert p.objective == F(1, 3) and p.x == (F(1, 3), F(2, 3))
    d = exact_solve(build_dual(gap3, exact=True))
    assert d.objective == F(1, 3) and d.x == (F(2, 3), 0, F(1, 3))


def test_decimal_ingestion_is_exact():
    lp = ExactLp.from_lp(LinearProgram("min", [0.1], [Constraint([1], ">=", 0.3)]))
    assert lp.objective == (F(1, 10),)
    assert exact_solve(lp).objective == F(3, 100)


def test_statuses():
    infeasible = LinearProgram("min", [1], [Constraint([1], ">=", 3), Constraint([1], "<=", 2)])
    assert exact_solve(infeasible).status is Status.INFEASIBLE
    unbounded = LinearProgram("max", [1, 1], [Constraint([1, -1], "<=", 1)])
    assert exact_solve(unbounded).status is Status.UNBOUNDED
    free_line = LinearProgram("min", [1, -1], [Constraint([1, -1], ">=", 2)], [(-INF, INF)] * 2)
    assert exact_solve(free_line).objective == 2
    tilted = LinearProgram("min", [1, 0], [Constraint([1, -1], ">=", 2)], [(-INF, INF)] * 2)
    assert exact_solve(tilted).status is Status.UNBOUNDED
    assert exact_solve(LinearProgram("min", [0, 0], [], [(-INF, INF)] * 2)).objective == 0


def test_size_cap():
    lp = LinearProgram("min", [1] * 20, [Constraint([1] * 20, ">=", 1)] * 5)
    with pytest.raises(TooLarge):
        exact_solve(lp)


@pytest.mark.parametrize("seed", range(60))
def test_matches_float_solver(seed):
    lp = random_lp(np.random.default_rng(5000 + seed))
    a, b = solve(lp), exact_solve(lp)
    assert a.status is b.status
    if b.status is Status.OPTIMAL:
        assert a.objective == pytest.approx(float(b.objective), abs=1e-7 * (1 + abs(float(b.objective))))


@pytest.mark.parametrize("seed", range(10))
def test_order_independent(seed):
    rng = np.random.default_rng(seed)
    lp = random_lp(rng, 5, 5)
    ref = exact_solve(lp)
    order = list(range(lp.n_rows))
    random.Random(seed).shuffle(order)
    shuffled = LinearProgram(lp.sense, lp.objective, [lp.constraints[i] for i in order], lp.bounds)
    out = exact_solve(shuffled)
    assert out.status is ref.status and out.objective == ref.objective


def test_cross_check_examples(gap3):
    rep = cross_check(gap3)
    assert rep.ok
    assert (rep.exact.primal_price, rep.exact.dual_price, rep.exact.model_sup) == (F(1, 3), F(1, 3), F(1, 6))
    zero = cross_check(gap3.with_claim({w: 0 for w in gap3.tree.leaves}))
    assert zero.exact.primal_price == zero.exact.dual_price == zero.exact.model_sup == 0


@pytest.mark.parametrize("seed", range(10))
def test_cross_check_generated(seed):
    inst = gen_interval_instance(2, (0.7, 1.5), 3, 3, seed, claim="random")
    assert cross_check(inst).ok


def test_cross_check_too_large():
    inst = gen_interval_instance(2, (0.7, 1.5), 3, 1, 0)
    with pytest.raises(TooLarge):
        cross_check(inst, cap=4)


def test_closedness_gap3_sequence(gap3):
    tree = gap3.tree
    H = make_strategy(tree, {0: 1.0})
    W = {w: wealth(tree, H, w) - (1.0 if w == LOW else 0.0) for w in tree.leaves}
    seq = [{w: W[w] - (2.0 ** -n if w == MID else 0.0) for w in tree.leaves} for n in range(1, 15)]
    rep = check_sequential_closure(gap3, seq, W, tol=1e-4)
    assert rep.passed and all(rep.members_in_cone)


def test_closedness_constant_sequence(gap3):
    W = {w: -1.0 for w in gap3.tree.leaves}
    rep = check_sequential_closure(gap3, [W] * 5, W, tol=0.0)
    assert rep.passed


def test_closedness_rejects_divergent(gap3):
    W = {w: 0.0 for w in gap3.tree.leaves}
    seq = [{w: -(2.0 ** n) for w in gap3.tree.leaves} for n in range(8)]
    with pytest.raises(NotConvergent):
        check_sequential_closure(gap3, seq, W, tol=1e-3)


@pytest.mark.parametrize("seed", range(5))
def test_closedness_probe(seed):
    rep = closedness_probe(gap3_instance(), n_steps=10, seed=seed)
    assert rep.passed
    assert rep.distances[-1] <= 2.0 ** -10


def test_in_cone_threshold(gap3):
    assert not in_cone(gap3, {1: 0.0, 2: 0.0, 3: 0.01})
