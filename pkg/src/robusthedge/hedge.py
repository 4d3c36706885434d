"""Superhedging LP, its dual over polar-respecting martingale measures, and the gap report.

For finite claims on a finite tree the integrability hypotheses of the
duality (uniform integrability of ``f+``, membership in L1) hold trivially and
are not represented. The primal is also never ``+inf``: holding
``max f`` in cash with ``H = 0`` is always feasible.

Worked example (``gap3_instance``): root price 1, leaves at 0.5, 1, 2, claim
``1{S_1 = 2}``, one model ``(1/3, 1/2, 1/6)`` charging every leaf. The primal
rows are ``x - H/2 >= 0``, ``x >= 0``, ``x + H >= 1``. The first and third
meet at ``H = 2/3, x = 1/3`` and the middle row is slack, so the price is 1/3.
On the dual side a martingale ``q`` has ``q1/2 = q3`` once ``q2 = 0``, giving
``q = (2/3, 0, 1/3)`` with value 1/3; any mass on the middle leaf only lowers
``q3``. The model itself gives 1/6, so the gap is 1/6.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple

from .errors import EmptySupport, InconsistentInstance, NumericalFailure
from .lp import EPS_LP, Constraint, LinearProgram, Status, solve
from .models import Instance, expectation, polar_set
from .tree import Claim, Strategy, make_claim, make_strategy, wealth

__all__ = [
    "Instance",
    "HedgePlan",
    "DualityReport",
    "VerifyResult",
    "build_primal",
    "build_dual",
    "superhedge",
    "model_sup",
    "duality_report",
    "verify_superhedge",
    "in_cone",
    "superhedge_price",
]

FREE = (-math.inf, math.inf)


@dataclass(frozen=True)
class HedgePlan:
    price: Any
    strategy: Strategy


class VerifyResult(NamedTuple):
    ok: bool
    worst_leaf: int | None
    shortfall: Any


@dataclass(frozen=True)
class DualityReport:
    primal_price: Any
    dual_price: Any
    model_sup: Any
    model_sup_name: str
    optimal_strategy: Strategy
    optimal_dual_measure: dict[int, Any]
    gap: Any


def _support(instance: Instance) -> list[int]:
    qs = sorted(polar_set(instance.tree, instance.family).qs_support)
    if not qs:
        raise EmptySupport("every leaf is polar; the model family is malformed")
    return qs


def build_primal(instance: Instance, exact: bool = False) -> LinearProgram:
    """``min x`` s.t. ``x + (H.S)_T(w) >= f(w)`` for each quasi-surely charged leaf ``w``.

    Variables are ``x`` followed by one free position per non-terminal node in
    ``tree.interior`` order. Polar leaves contribute no row.
    """
    tree = instance.tree
    col = {n: 1 + k for k, n in enumerate(tree.interior)}
    nvar = 1 + len(col)
    zero = Fraction(0) if exact else 0.0
    rows = []
    for w in _support(instance):
        a = [zero] * nvar
        a[0] = zero + 1
        path = tree._paths[w]
        for prev, cur in zip(path, path[1:]):
            a[col[prev]] += tree.price(cur, exact) - tree.price(prev, exact)
        rows.append(Constraint(tuple(a), ">=", instance.claim.value(w, exact)))
    objective = (zero + 1,) + (zero,) * (nvar - 1)
    return LinearProgram("min", objective, tuple(rows), (FREE,) * nvar)


def build_dual(instance: Instance, exact: bool = False) -> LinearProgram:
    """``max sum q f`` over probability vectors ``q`` on the q.s. support that are
    martingale at every node reachable within the support.

    Variables follow ``sorted(qs_support)``; row 0 is the normalization and the
    remaining rows follow ``tree.interior`` order (nodes with no charged leaf
    below are skipped).
    """
    tree = instance.tree
    qs = _support(instance)
    var = {w: k for k, w in enumerate(qs)}
    zero = Fraction(0) if exact else 0.0
    rows = [Constraint((zero + 1,) * len(qs), "=", zero + 1)]
    drift: dict[int, list] = {}
    for w in qs:
        path = tree._paths[w]
        for prev, cur in zip(path, path[1:]):
            a = drift.setdefault(prev, [zero] * len(qs))
            a[var[w]] += tree.price(cur, exact) - tree.price(prev, exact)
    for n in tree.interior:
        if n in drift:
            rows.append(Constraint(tuple(drift[n]), "=", zero))
    objective = tuple(instance.claim.value(w, exact) for w in qs)
    return LinearProgram("max", objective, tuple(rows))


def _solver(exact: bool, eps: float):
    if exact:
        from .oracle import exact_solve

        return exact_solve
    return lambda lp: solve(lp, eps)


def _solve_primal(instance: Instance, eps: float, exact: bool):
    sol = _solver(exact, eps)(build_primal(instance, exact))
    if sol.status is Status.UNBOUNDED:
        raise InconsistentInstance(
            "superhedging LP is unbounded below; the model family cannot consist "
            "of martingale measures"
        )
    if sol.status is not Status.OPTIMAL:
        # cash superhedge is always feasible
        raise NumericalFailure(f"superhedging LP reported {sol.status.value}")
    return sol


def _plan_from(instance: Instance, x) -> HedgePlan:
    tree = instance.tree
    return HedgePlan(x[0], make_strategy(tree, {n: x[1 + k] for k, n in enumerate(tree.interior)}))


def superhedge(instance: Instance, eps: float = EPS_LP, exact: bool = False) -> HedgePlan:
    """Cheapest quasi-sure superhedge together with a strategy attaining it."""
    sol = _solve_primal(instance, eps, exact)
    x = list(sol.x) if exact else [float(v) for v in sol.x]
    plan = _plan_from(instance, x)
    check = verify_superhedge(instance, plan, 1e-7)
    if not check.ok:
        raise NumericalFailure(f"optimal plan fails verification at leaf {check.worst_leaf}")
    return plan


def superhedge_price(instance: Instance, eps: float = EPS_LP, exact: bool = False):
    return _solve_primal(instance, eps, exact).objective


def model_sup(instance: Instance, exact: bool = False) -> tuple[Any, str]:
    """Largest expected payoff over the family, with the maximizing model's name."""
    best = None
    for m in instance.family:
        v = expectation(m, instance.claim, exact=exact)
        if best is None or v > best[0]:
            best = (v, m.name)
    return best


def duality_report(instance: Instance, eps: float = EPS_LP, exact: bool = False) -> DualityReport:
    """Primal price, dual price over martingale measures vanishing on the polar
    set, the family's supremum of expectations, and the gap between the last two.
    """
    solver = _solver(exact, eps)
    primal = _solve_primal(instance, eps, exact)
    dual = solver(build_dual(instance, exact))
    if dual.status is not Status.OPTIMAL:
        raise InconsistentInstance(f"dual LP reported {dual.status.value}")
    sup, name = model_sup(instance, exact)
    scale = instance.scale()

    p, d = primal.objective, dual.objective
    if exact:
        if p != d:
            raise NumericalFailure(f"exact primal {p} differs from exact dual {d}")
        x = list(primal.x)
        q_vals = list(dual.x)
    else:
        p, d, sup = float(p), float(d), float(sup)
        if abs(p - d) > 2 * eps * scale:
            raise NumericalFailure(f"primal {p!r} and dual {d!r} disagree beyond tolerance")
        x = [float(v) for v in primal.x]
        q_vals = [float(v) for v in dual.x]
    if sup > d + 2 * eps * scale:
        raise InconsistentInstance(f"model {name!r} prices above the dual bound")

    qs = _support(instance)
    zero = Fraction(0) if exact else 0.0
    measure = dict.fromkeys(instance.tree.leaves, zero)
    measure.update(zip(qs, q_vals))
    plan = _plan_from(instance, x)
    return DualityReport(
        primal_price=p,
        dual_price=d,
        model_sup=sup,
        model_sup_name=name,
        optimal_strategy=plan.strategy,
        optimal_dual_measure=measure,
        gap=d - sup,
    )


def verify_superhedge(instance: Instance, plan: HedgePlan, tol: float = 1e-7) -> VerifyResult:
    """Check ``x + (H.S)_T >= f - tol * scale`` on every charged leaf.

    Returns the leaf with the largest shortfall ``f - x - (H.S)_T`` (polar
    leaves are exempt); ``ok`` is False if that shortfall exceeds the tolerance.
    """
    exact = isinstance(plan.price, Fraction) and all(
        isinstance(v, (Fraction, int)) for v in plan.strategy.values.values()
    )
    worst, worst_gap = None, None
    for w in sorted(instance.polar.qs_support):
        gap = instance.claim.value(w, exact) - plan.price - wealth(instance.tree, plan.strategy, w, exact=exact)
        # ties go to the later leaf
        if worst_gap is None or gap >= worst_gap:
            worst, worst_gap = w, gap
    ok = worst_gap <= tol * instance.scale()
    return VerifyResult(bool(ok), worst, worst_gap)


def in_cone(instance: Instance, claim, eps: float = EPS_LP) -> bool:
    """Whether ``claim`` is dominated q.s. by the terminal wealth of some strategy
    from zero capital, i.e. its superhedging price is at most zero.
    """
    if not isinstance(claim, Claim):
        claim = make_claim(instance.tree, claim)
    inst = instance.with_claim(claim)
    return superhedge_price(inst, eps) <= eps * inst.scale()
