"""Dense two-phase simplex with Bland's rule.

Problems are stated in general form (min or max, ``<=``/``=``/``>=`` rows,
per-variable bounds). Internally everything is moved to the standard form
``A z = b, z >= 0``; the solution is mapped back and certified by recomputing
primal/dual residuals from the original data.

Duals are shadow prices: ``duals[i]`` is the rate of change of the optimal
objective in the right-hand side of constraint ``i``. For a minimization, a
``>=`` row therefore has a nonnegative dual and a ``<=`` row a nonpositive one.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import NumericalFailure

__all__ = [
    "Status",
    "Constraint",
    "LinearProgram",
    "Residuals",
    "LpSolution",
    "solve",
    "residuals",
    "PIVOT_TOL",
    "EPS_LP",
]

PIVOT_TOL = 1e-10
EPS_LP = 1e-8
MAX_ITER = 50_000

RELATIONS = ("<=", "=", ">=")
INF = math.inf


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    rhs: object

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {self.relation!r}")


@dataclass(frozen=True)
class LinearProgram:
    """General-form LP. Bounds default to ``[0, +inf)`` for every variable.

    Entries may be floats or exact rationals; :func:`solve` works in floating
    point, the oracle in exact arithmetic.
    """

    sense: str
    objective: tuple
    constraints: tuple[Constraint, ...] = ()
    bounds: tuple[tuple[object, object], ...] | None = None

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        object.__setattr__(self, "objective", tuple(self.objective))
        object.__setattr__(self, "constraints", tuple(
            c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints
        ))
        n = len(self.objective)
        bounds = ((0, INF),) * n if self.bounds is None else tuple(tuple(b) for b in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        if len(bounds) != n:
            raise ValueError(f"{len(bounds)} bounds for {n} variables")
        for i, c in enumerate(self.constraints):
            if len(c.coeffs) != n:
                raise ValueError(f"row {i} has {len(c.coeffs)} coefficients, expected {n}")
            if not all(math.isfinite(v) for v in c.coeffs) or not math.isfinite(c.rhs):
                raise ValueError(f"row {i} has non-finite data")
        if not all(math.isfinite(v) for v in self.objective):
            raise ValueError("objective has non-finite coefficients")
        for j, (lo, hi) in enumerate(bounds):
            if lo == INF or hi == -INF or lo > hi:
                raise ValueError(f"variable {j} has empty bounds [{lo}, {hi}]")

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_rows(self) -> int:
        return len(self.constraints)

    def arrays(self):
        """``(c, A, b, relations, lo, hi)`` as float arrays."""
        n = self.n_vars
        c = np.array([float(v) for v in self.objective], dtype=float)
        A = np.array([[float(v) for v in r.coeffs] for r in self.constraints], dtype=float).reshape(-1, n)
        b = np.array([float(r.rhs) for r in self.constraints], dtype=float)
        rel = [r.relation for r in self.constraints]
        lo = np.array([float(l) for l, _ in self.bounds], dtype=float)
        hi = np.array([float(h) for _, h in self.bounds], dtype=float)
        return c, A, b, rel, lo, hi


class Residuals(NamedTuple):
    primal: float
    dual: float
    complementarity: float


@dataclass(frozen=True)
class LpSolution:
    status: Status
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    objective: float | None = None
    dual_objective: float | None = None
    residuals: Residuals | None = None
    certificate: np.ndarray | None = field(default=None, repr=False)
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def residuals(lp: LinearProgram, x, y) -> tuple[Residuals, float]:
    """Certification residuals of a primal/dual pair and the dual objective.

    Returns ``(Residuals(primal, dual, complementarity), dual_objective)``.
    ``complementarity`` is the largest product of a multiplier with the slack
    of its row or bound.
    """
    c, A, b, rel, lo, hi = lp.arrays()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    flip = 1.0 if lp.sense == "min" else -1.0
    cm, ym = flip * c, flip * y

    ax = A @ x if len(b) else np.zeros(0)
    viol = [0.0]
    dual_viol = [0.0]
    comp = [0.0]
    for i, r in enumerate(rel):
        slack = ax[i] - b[i]
        if r == "<=":
            viol.append(slack)
            dual_viol.append(ym[i])
        elif r == ">=":
            viol.append(-slack)
            dual_viol.append(-ym[i])
        else:
            viol.append(abs(slack))
        comp.append(abs(ym[i] * slack))
    viol.extend((lo - x)[np.isfinite(lo)])
    viol.extend((x - hi)[np.isfinite(hi)])

    red = cm - (A.T @ ym if len(b) else 0.0)
    dual_obj = float(b @ ym) if len(b) else 0.0
    for j in range(len(x)):
        rp, rn = max(red[j], 0.0), max(-red[j], 0.0)
        if rp > 0:
            if math.isfinite(lo[j]):
                dual_obj += rp * lo[j]
                comp.append(rp * abs(x[j] - lo[j]))
            else:
                dual_viol.append(rp)
        if rn > 0:
            if math.isfinite(hi[j]):
                dual_obj -= rn * hi[j]
                comp.append(rn * abs(hi[j] - x[j]))
            else:
                dual_viol.append(rn)
    return Residuals(float(max(viol)), float(max(dual_viol)), float(max(comp))), float(flip * dual_obj)


class _StandardForm(NamedTuple):
    A: np.ndarray          # rows x cols, rhs made nonnegative
    b: np.ndarray
    c: np.ndarray          # min-sense objective in z
    M: np.ndarray          # x = offset + M z[:n_struct]
    offset: np.ndarray
    row_sign: np.ndarray   # +1 / -1 applied to each standard row
    row_origin: list       # index into original rows, or ("ub", j) for bound rows
    slack_col: list        # slack column of each row, or None
    n_struct: int


def _standardize(lp: LinearProgram, rows: list[int]) -> _StandardForm:
    c, A, b, rel, lo, hi = lp.arrays()
    n = lp.n_vars
    cols = []
    offset = np.zeros(n)
    ub_rows = []
    for j in range(n):
        if math.isfinite(lo[j]):
            offset[j] = lo[j]
            cols.append((j, 1.0))
            if math.isfinite(hi[j]):
                ub_rows.append((len(cols) - 1, hi[j] - lo[j], j))
        elif math.isfinite(hi[j]):
            offset[j] = hi[j]
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    ns = len(cols)
    M = np.zeros((n, ns))
    for k, (j, s) in enumerate(cols):
        M[j, k] = s

    std_rows, rhs, kinds, origin = [], [], [], []
    for i in rows:
        std_rows.append(A[i] @ M)
        rhs.append(b[i] - A[i] @ offset)
        kinds.append(rel[i])
        origin.append(i)
    for k, width, j in ub_rows:
        r = np.zeros(ns)
        r[k] = 1.0
        std_rows.append(r)
        rhs.append(width)
        kinds.append("<=")
        origin.append(("ub", j))
    m = len(std_rows)
    n_slack = sum(k != "=" for k in kinds)
    As = np.zeros((m, ns + n_slack))
    slack_col: list = []
    s = ns
    for i, (row, kind) in enumerate(zip(std_rows, kinds)):
        As[i, :ns] = row
        if kind == "=":
            slack_col.append(None)
        else:
            As[i, s] = 1.0 if kind == "<=" else -1.0
            slack_col.append(s)
            s += 1
    bs = np.array(rhs, dtype=float)
    sign = np.where(bs < 0, -1.0, 1.0)
    As *= sign[:, None]
    bs *= sign
    cz = np.concatenate([(c if lp.sense == "min" else -c) @ M, np.zeros(n_slack)])
    return _StandardForm(As, bs, cz, M, offset, sign, origin, slack_col, ns)


class _Tableau:
    """Row-reduced tableau ``[B^-1 A | B^-1 b]`` with Bland pivoting."""

    def __init__(self, A, b, basis):
        self.T = np.hstack([A, b[:, None]]).astype(float)
        self.basis = list(basis)
        self.iterations = 0

    def pivot(self, r, j):
        T = self.T
        piv = T[r, j]
        if abs(piv) <= PIVOT_TOL:
            raise NumericalFailure(f"pivot element {piv:.3e} below tolerance")
        T[r] /= piv
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j
        self.iterations += 1
        if self.iterations > MAX_ITER:
            raise NumericalFailure("simplex iteration limit exceeded")

    def reduced_costs(self, cost):
        T = self.T
        cb = cost[self.basis]
        return cost - cb @ T[:, :-1]

    def run(self, cost, allowed):
        """Minimize ``cost``; returns the entering column of an unbounded ray, or None."""
        T = self.T
        while True:
            d = self.reduced_costs(cost)
            entering = next((j for j in allowed if d[j] < -PIVOT_TOL and j not in self.basis), None)
            if entering is None:
                return None
            col = T[:, entering]
            best, leave = None, None
            for r in range(T.shape[0]):
                if col[r] > PIVOT_TOL:
                    ratio = T[r, -1] / col[r]
                    if (best is None or ratio < best - 1e-12
                            or (abs(ratio - best) <= 1e-12 and self.basis[r] < self.basis[leave])):
                        best, leave = ratio, r
            if leave is None:
                return entering
            self.pivot(leave, entering)


def solve(lp: LinearProgram, eps: float = EPS_LP) -> LpSolution:
    """Solve ``lp`` and certify the result.

    On ``Optimal`` the primal/dual residuals are at most ``eps``. On
    ``Infeasible`` the certificate holds multipliers ``y`` over the standard
    rows (original constraints followed by finite upper-bound rows, in the
    original orientation) proving infeasibility; on ``Unbounded`` it is a
    primal ray along which the objective improves without bound.

    Raises NumericalFailure if a pivot breaks down or the final certificate
    fails its residual check.
    """
    c, A, b, rel, lo, hi = lp.arrays()
    n = lp.n_vars

    # the only presolve: drop all-zero rows, checking them first
    rows = []
    for i in range(lp.n_rows):
        if np.any(A[i] != 0):
            rows.append(i)
            continue
        bad = (rel[i] == "<=" and b[i] < 0) or (rel[i] == ">=" and b[i] > 0) or (rel[i] == "=" and b[i] != 0)
        if bad:
            cert = np.zeros(lp.n_rows)
            cert[i] = 1.0 if b[i] > 0 else -1.0
            return LpSolution(Status.INFEASIBLE, certificate=cert)

    sf = _standardize(lp, rows)
    m, N = sf.A.shape

    # phase 1: artificial columns only for rows with no +1 slack
    basis, art_rows = [], []
    for i in range(m):
        s = sf.slack_col[i]
        if s is not None and sf.A[i, s] > 0:
            basis.append(s)
        else:
            art_rows.append(i)
            basis.append(N + len(art_rows) - 1)
    n_art = len(art_rows)
    A1 = np.hstack([sf.A, np.zeros((m, n_art))])
    for k, i in enumerate(art_rows):
        A1[i, N + k] = 1.0
    tab = _Tableau(A1, sf.b, basis)
    cost1 = np.concatenate([np.zeros(N), np.ones(n_art)])
    tab.run(cost1, range(N + n_art))
    infeas = float(cost1[tab.basis] @ tab.T[:, -1])
    if infeas > 1e-9 * (1.0 + float(np.max(np.abs(sf.b), initial=0.0))):
        y1 = _duals(A1, cost1, tab.basis)
        cert = _unstandardize_rows(sf, y1, lp.n_rows)
        return LpSolution(Status.INFEASIBLE, certificate=cert, iterations=tab.iterations)

    # drive artificials out of the basis; rows where that is impossible are redundant
    keep = list(range(m))
    for r in range(m):
        if tab.basis[r] < N:
            continue
        j = next((j for j in range(N) if abs(tab.T[r, j]) > PIVOT_TOL and j not in tab.basis), None)
        if j is None:
            keep.remove(r)
        else:
            tab.pivot(r, j)
    tab.T = np.hstack([tab.T[keep][:, :N], tab.T[keep][:, -1:]])
    tab.basis = [tab.basis[r] for r in keep]
    A2, b2 = sf.A[keep], sf.b[keep]

    ray_col = tab.run(sf.c, range(N))
    if ray_col is not None:
        dz = np.zeros(N)
        dz[ray_col] = 1.0
        for r, j in enumerate(tab.basis):
            dz[j] = -tab.T[r, ray_col]
        ray = sf.M @ dz[: sf.n_struct]
        return LpSolution(Status.UNBOUNDED, certificate=ray, iterations=tab.iterations)

    # recompute the vertex and multipliers from the original data
    Bm = A2[:, tab.basis]
    try:
        zb = np.linalg.solve(Bm, b2) if len(keep) else np.zeros(0)
        yk = np.linalg.solve(Bm.T, sf.c[tab.basis]) if len(keep) else np.zeros(0)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"singular final basis: {exc}") from None
    z = np.zeros(N)
    z[tab.basis] = zb
    z = np.maximum(z, 0.0)
    x = sf.offset + sf.M @ z[: sf.n_struct]
    y_std = np.zeros(m)
    y_std[keep] = yk
    y_all = _unstandardize_rows(sf, y_std, lp.n_rows)
    y = y_all[: lp.n_rows]
    if lp.sense == "max":
        y = -y
    res, dual_obj = residuals(lp, x, y)
    obj = float(c @ x)
    if max(res) > eps or abs(obj - dual_obj) > eps * (1.0 + abs(obj)):
        raise NumericalFailure(
            f"certificate check failed: residuals {tuple(float(v) for v in res)}, "
            f"objective {obj!r} vs dual {dual_obj!r}"
        )
    return LpSolution(Status.OPTIMAL, x=x, duals=y, objective=obj, dual_objective=dual_obj,
                      residuals=res, iterations=tab.iterations)


def _duals(A, cost, basis) -> np.ndarray:
    Bm = A[:, basis]
    try:
        return np.linalg.solve(Bm.T, cost[basis])
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(Bm.T, cost[basis], rcond=None)[0]


def _unstandardize_rows(sf: _StandardForm, y_std: np.ndarray, n_orig: int) -> np.ndarray:
    """Map standard-row multipliers back to original rows, upper-bound rows appended."""
    y = y_std * sf.row_sign
    out = np.zeros(n_orig)
    extra = []
    for k, origin in enumerate(sf.row_origin):
        if isinstance(origin, tuple):
            extra.append(y[k])
        else:
            out[origin] = y[k]
    return np.concatenate([out, extra]) if extra else out


def from_arrays(sense: str, c: Sequence, A_ub=None, b_ub=None, A_eq=None, b_eq=None,
                A_ge=None, b_ge=None, bounds=None) -> LinearProgram:
    """Convenience constructor from matrix blocks."""
    cons = []
    for Ablk, bblk, r in ((A_ub, b_ub, "<="), (A_eq, b_eq, "="), (A_ge, b_ge, ">=")):
        if Ablk is None:
            continue
        for row, rhs in zip(Ablk, bblk):
            cons.append(Constraint(tuple(row), r, rhs))
    return LinearProgram(sense, tuple(c), tuple(cons), bounds)
