"""Exact rational reference solver and brute-force probes.

``exact_solve`` enumerates candidate vertices (sets of linearly independent
active constraints), solves each in exact arithmetic and keeps the best
feasible one. Unboundedness is decided by enumerating the extreme rays of the
recession cone the same way. It is exponential and meant for small problems
only; its value lies in sharing no code path with the floating-point simplex.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._num import to_fraction
from .errors import NotConvergent, TooLarge
from .hedge import DualityReport, build_dual, build_primal, duality_report, in_cone
from .lp import LinearProgram, Status
from .models import Instance, l1_norm
from .tree import make_strategy, wealth

__all__ = [
    "ExactLp",
    "ExactSolution",
    "exact_solve",
    "CrossCheck",
    "cross_check",
    "ProbeReport",
    "closedness_probe",
    "check_sequential_closure",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 24


class ExactLp(LinearProgram):
    """A :class:`LinearProgram` whose finite data are all :class:`Fraction`."""

    @classmethod
    def from_lp(cls, lp: LinearProgram) -> ExactLp:
        def fb(v):
            return v if isinstance(v, float) and math.isinf(v) else to_fraction(v)

        return cls(
            lp.sense,
            tuple(to_fraction(v) for v in lp.objective),
            tuple(
                type(c)(tuple(to_fraction(v) for v in c.coeffs), c.relation, to_fraction(c.rhs))
                for c in lp.constraints
            ),
            tuple((fb(lo), fb(hi)) for lo, hi in lp.bounds),
        )


class ExactSolution(NamedTuple):
    status: Status
    objective: Fraction | None
    x: tuple[Fraction, ...] | None


def _dot(a, x):
    return sum((ai * xi for ai, xi in zip(a, x) if ai), Fraction(0))


def _nullspace(rows: list[list[Fraction]], n: int) -> list[list[Fraction]]:
    """Basis of ``{d : r . d = 0 for r in rows}``, via exact RREF."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        d = [Fraction(0)] * n
        d[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            d[pc] = -m[i][fc]
        basis.append(d)
    return basis


class _Echelon:
    """Incrementally built echelon system ``rows . x = rhs``."""

    def __init__(self, n):
        self.n = n
        self.rows: list[tuple[int, list[Fraction], Fraction]] = []

    def reduce(self, a, b):
        a = list(a)
        for pc, r, rb in self.rows:
            f = a[pc]
            if f:
                a = [ai - f * ri for ai, ri in zip(a, r)]
                b = b - f * rb
        return a, b

    def push(self, a, b) -> bool:
        a, b = self.reduce(a, b)
        pc = next((j for j, v in enumerate(a) if v), None)
        if pc is None:
            return False
        p = a[pc]
        self.rows.append((pc, [v / p for v in a], b / p))
        return True

    def pop(self):
        self.rows.pop()

    def solve(self) -> list[Fraction]:
        # full rank: back-substitute in reverse insertion order
        return self._back([Fraction(0)] * self.n, use_rhs=True)

    def kernel_vector(self) -> list[Fraction]:
        """Spanning vector of the null space when exactly one column has no pivot."""
        x = [Fraction(0)] * self.n
        pivots = {pc for pc, _, _ in self.rows}
        x[next(j for j in range(self.n) if j not in pivots)] = Fraction(1)
        return self._back(x, use_rhs=False)

    def _back(self, x, use_rhs):
        for pc, r, b in reversed(self.rows):
            b = b if use_rhs else 0
            x[pc] = b - sum((r[j] * x[j] for j in range(self.n) if j != pc and r[j]), Fraction(0))
        return x


def _independent_subsets(ineqs, k, base: _Echelon, hom: bool):
    """Yield echelon systems extending ``base`` by ``k`` independent rows of ``ineqs``."""
    def rec(start, need):
        if need == 0:
            yield base
            return
        if need < 0:
            return
        for i in range(start, len(ineqs) - need + 1):
            a, b = ineqs[i]
            if base.push(a, Fraction(0) if hom else b):
                yield from rec(i + 1, need - 1)
                base.pop()
    yield from rec(0, k)


def _feasible(x, rows) -> bool:
    for a, rel, b in rows:
        v = _dot(a, x)
        if (rel == "<=" and v > b) or (rel == ">=" and v < b) or (rel == "=" and v != b):
            return False
    return True


def _all_rows(lp: ExactLp):
    n = lp.n_vars
    rows = [(tuple(c.coeffs), c.relation, c.rhs) for c in lp.constraints]
    for j, (lo, hi) in enumerate(lp.bounds):
        e = tuple(Fraction(int(i == j)) for i in range(n))
        if not (isinstance(lo, float) and math.isinf(lo)):
            rows.append((e, ">=", to_fraction(lo)))
        if not (isinstance(hi, float) and math.isinf(hi)):
            rows.append((e, "<=", to_fraction(hi)))
    return rows


def exact_solve(lp: LinearProgram, cap: int = DEFAULT_CAP) -> ExactSolution:
    """Solve ``lp`` exactly by enumerating vertices and recession rays.

    Raises TooLarge when ``n_vars + n_rows`` exceeds ``cap``.
    """
    if lp.n_vars + lp.n_rows > cap:
        raise TooLarge(f"{lp.n_vars} variables + {lp.n_rows} rows exceeds the oracle cap {cap}")
    lp = lp if isinstance(lp, ExactLp) else ExactLp.from_lp(lp)
    n = lp.n_vars
    c = [v if lp.sense == "min" else -v for v in lp.objective]
    rows = _all_rows(lp)

    lineality = _nullspace([list(a) for a, _, _ in rows], n)
    base = _Echelon(n)
    for d in lineality:
        base.push(d, Fraction(0))
    eqs = [(a, b) for a, rel, b in rows if rel == "="]
    ineqs = [(a, b) for a, rel, b in rows if rel != "="]
    rank = n - len(lineality)
    n_eq = sum(base.push(a, b) for a, b in eqs)
    need = rank - n_eq

    best = None
    for system in _independent_subsets(ineqs, need, base, hom=False):
        x = system.solve()
        if not _feasible(x, rows):
            continue
        v = _dot(c, x)
        if best is None or v < best[0]:
            best = (v, x)
    if best is None:
        return ExactSolution(Status.INFEASIBLE, None, None)
    if any(_dot(c, d) != 0 for d in lineality):
        return ExactSolution(Status.UNBOUNDED, None, None)

    # extreme rays of the recession cone within the complement of the lineality space
    hom_rows = [(a, rel, Fraction(0)) for a, rel, _ in rows]
    ray_base = _Echelon(n)
    for d in lineality:
        ray_base.push(d, Fraction(0))
    n_eq_h = sum(ray_base.push(a, Fraction(0)) for a, _ in eqs)
    rays = _independent_subsets(ineqs, rank - 1 - n_eq_h, ray_base, hom=True) if rank > 0 else ()
    for system in rays:
        ray = system.kernel_vector()
        for sgn in (1, -1):
            d = [sgn * v for v in ray]
            if _dot(c, d) < 0 and _feasible(d, hom_rows):
                return ExactSolution(Status.UNBOUNDED, None, None)

    value, x = best
    return ExactSolution(Status.OPTIMAL, value if lp.sense == "min" else -value, tuple(x))


# --------------------------------------------------------------------------
# cross-checks and probes


class CrossCheck(NamedTuple):
    ok: bool
    max_diff: float
    floating: DualityReport
    exact: DualityReport


def cross_check(instance: Instance, tol: float = 1e-7, cap: int = DEFAULT_CAP) -> CrossCheck:
    """Price ``instance`` with the float simplex and with the exact oracle and compare."""
    for lp in (build_primal(instance), build_dual(instance)):
        if lp.n_vars + lp.n_rows > cap:
            raise TooLarge(f"instance LP has {lp.n_vars} variables and {lp.n_rows} rows")
    fl = duality_report(instance)
    ex = duality_report(instance, exact=True)
    diff = max(
        abs(fl.primal_price - float(ex.primal_price)),
        abs(fl.dual_price - float(ex.dual_price)),
        abs(fl.model_sup - float(ex.model_sup)),
    )
    return CrossCheck(diff <= tol * instance.scale(), diff, fl, ex)


class ProbeReport(NamedTuple):
    passed: bool
    members_in_cone: list[bool]
    limit_in_cone: bool
    distances: list[float]


def check_sequential_closure(instance: Instance, sequence, limit, tol: float) -> ProbeReport:
    """Given cone members ``sequence`` converging to ``limit``, test the limit.

    Convergence is measured in the sup-over-models L1 norm, which dominates
    every seminorm of the family. Raises NotConvergent when the last distance
    exceeds ``tol`` or the distances grow overall.
    """
    leaves = instance.tree.leaves
    dist = [l1_norm(instance.family, {w: s[w] - limit[w] for w in leaves}) for s in sequence]
    if not dist or dist[-1] > tol or dist[-1] > dist[0]:
        raise NotConvergent(f"sequence does not converge to the proposed limit (distances {dist})")
    members = [in_cone(instance, s) for s in sequence]
    lim = in_cone(instance, limit)
    return ProbeReport(all(members) and lim, members, lim, dist)


def closedness_probe(instance: Instance, n_steps: int = 10, seed: int = 0) -> ProbeReport:
    """Random sequence of cone members converging to a cone member; checks the limit.

    The limit is ``W = (H.S)_T - K`` with random ``H`` and ``K >= 0``. The
    ``n``-th term perturbs it by at most ``2**-n`` pointwise, never by more
    than ``K``, so each term is again a cone member.
    """
    rng = np.random.default_rng(seed)
    tree = instance.tree
    H = make_strategy(tree, {n: float(rng.normal()) for n in tree.interior})
    K = {w: float(rng.exponential()) * (rng.random() < 0.7) for w in tree.leaves}
    W = {w: wealth(tree, H, w) - K[w] for w in tree.leaves}
    seq = []
    for k in range(1, n_steps + 1):
        xi = {w: min(2.0 ** -k * rng.uniform(-1.0, 1.0), K[w]) for w in tree.leaves}
        seq.append({w: W[w] + xi[w] for w in tree.leaves})
    return check_sequential_closure(instance, seq, W, tol=2.0 ** -n_steps)
