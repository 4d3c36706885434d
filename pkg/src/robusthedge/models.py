"""Path measures on an event tree, polar sets, the L1 norms and instance generators."""
from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import InitVar, dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any, NamedTuple

import numpy as np

from ._num import is_finite_real, to_fraction
from .errors import (
    InfeasibleInterval,
    ModelError,
    NoViableModel,
    NotMartingale,
    ShapeMismatch,
    UnknownNode,
)
from .tree import Claim, EventTree, make_claim, path_of, validate_tree

__all__ = [
    "TAU_PROB",
    "TAU_ZERO",
    "MARTINGALE_TOL",
    "Model",
    "ModelFamily",
    "PolarReport",
    "MartingaleCheck",
    "Instance",
    "make_model",
    "make_family",
    "node_mass",
    "is_martingale_measure",
    "polar_set",
    "expectation",
    "seminorm",
    "l1_norm",
    "gen_interval_instance",
    "gen_nullset_instance",
    "gen_random_instance",
    "g3_tree",
    "gap3_instance",
    "binomial_instance",
]

TAU_PROB = 1e-12
# weights are taken at face value: a leaf is null only if its weight is exactly 0
TAU_ZERO = 0.0
MARTINGALE_TOL = 1e-9


@dataclass(frozen=True)
class Model:
    name: str
    leaf_weights: Mapping[int, float]
    exact_weights: Mapping[int, Fraction] = field(repr=False, compare=False)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(w for w, p in self.leaf_weights.items() if p > TAU_ZERO)

    def weight(self, leaf: int, exact: bool = False):
        return self.exact_weights[leaf] if exact else self.leaf_weights[leaf]


def make_model(tree: EventTree, name: str, weights: Mapping[int, Any]) -> Model:
    """Build a path measure. Leaves absent from ``weights`` get weight 0."""
    vals = {int(k): v for k, v in weights.items()}
    unknown = set(vals) - set(tree.leaves)
    if unknown:
        raise ShapeMismatch(f"model {name!r}: weights on unknown leaves {sorted(unknown)}")
    exact = {}
    floats = {}
    for w in tree.leaves:
        v = vals.get(w, 0)
        if not is_finite_real(v):
            raise ModelError(f"model {name!r}: weight at leaf {w} is not finite: {v!r}")
        exact[w] = to_fraction(v)
        floats[w] = float(exact[w]) if isinstance(v, (str, Fraction)) else float(v)
        if floats[w] < 0:
            raise ModelError(f"model {name!r}: negative weight {v!r} at leaf {w}")
    total = sum(floats.values())
    if abs(total - 1.0) > TAU_PROB:
        raise ModelError(f"model {name!r}: weights sum to {total!r}, not 1")
    return Model(name, MappingProxyType(floats), MappingProxyType(exact))


class MartingaleCheck(NamedTuple):
    ok: bool
    residuals: dict[int, float]
    worst_node: int | None


class PolarReport(NamedTuple):
    polar_leaves: frozenset[int]
    qs_support: frozenset[int]


def node_mass(tree: EventTree, model: Model, node: int) -> float:
    """Probability of the atom represented by ``node``."""
    if node not in tree.nodes:
        raise UnknownNode(f"unknown node {node}")
    return sum(model.leaf_weights[w] for w in tree.leaves_below(node))


def _masses_and_residuals(tree: EventTree, model: Model):
    mass = dict.fromkeys(tree.nodes, 0.0)
    drift = dict.fromkeys(tree.interior, 0.0)
    for w in tree.leaves:
        p = model.leaf_weights[w]
        if p == 0:
            continue
        path = path_of(tree, w)
        for u, n in enumerate(path):
            mass[n] += p
            if u < len(path) - 1:
                drift[n] += p * (tree.nodes[path[u + 1]].price - tree.nodes[n].price)
    return mass, drift


def is_martingale_measure(tree: EventTree, model: Model, tol: float = MARTINGALE_TOL) -> MartingaleCheck:
    """Check that every increment has zero conditional mean where the node has mass.

    The residual at node ``n`` is ``|sum_w p(w) (S_next(n, w) - S_n)|`` over the
    leaves below ``n``; it must not exceed ``tol * mass(n) * (1 + max|S|)``.
    """
    mass, drift = _masses_and_residuals(tree, model)
    scale = 1.0 + tree.price_scale()
    residuals = {n: abs(d) for n, d in drift.items()}
    worst, worst_excess = None, 0.0
    for n, r in residuals.items():
        if mass[n] <= 0:
            continue
        excess = r - tol * mass[n] * scale
        if excess > 0 and (worst is None or excess > worst_excess):
            worst, worst_excess = n, excess
    return MartingaleCheck(worst is None, residuals, worst)


@dataclass(frozen=True)
class ModelFamily:
    models: tuple[Model, ...]

    def __post_init__(self):
        if not self.models:
            raise ModelError("a model family must be nonempty")

    def __iter__(self):
        return iter(self.models)

    def __len__(self):
        return len(self.models)

    def __getitem__(self, i):
        return self.models[i]


def make_family(tree: EventTree, models: Iterable[Model], check: bool = True) -> ModelFamily:
    family = ModelFamily(tuple(models))
    if check:
        for m in family:
            res = is_martingale_measure(tree, m)
            if not res.ok:
                raise NotMartingale(
                    f"model {m.name!r} is not a martingale measure "
                    f"(residual {res.residuals[res.worst_node]:.3g} at node {res.worst_node})"
                )
    return family


def polar_set(tree: EventTree, family: ModelFamily | Sequence[Model]) -> PolarReport:
    """Leaves that carry no mass under any model of the family."""
    charged = set()
    for m in family:
        charged |= m.support
    polar = frozenset(w for w in tree.leaves if w not in charged)
    return PolarReport(polar, frozenset(tree.leaves) - polar)


@dataclass(frozen=True)
class Instance:
    """A tree, a nonempty family of martingale models and a terminal claim."""

    tree: EventTree
    family: ModelFamily
    claim: Claim
    check: InitVar[bool] = True

    def __post_init__(self, check):
        if set(self.claim.payoffs) != set(self.tree.leaves):
            raise ShapeMismatch("claim does not match the tree's leaves")
        for m in self.family:
            if set(m.leaf_weights) != set(self.tree.leaves):
                raise ShapeMismatch(f"model {m.name!r} does not match the tree's leaves")
        if check:
            make_family(self.tree, self.family.models, check=True)

    @property
    def polar(self) -> PolarReport:
        return polar_set(self.tree, self.family)

    def scale(self) -> float:
        """``1 + max(|S|, |f|)``; every absolute tolerance is multiplied by this."""
        return 1.0 + max(self.tree.price_scale(), self.claim.sup_norm())

    def with_claim(self, payoffs) -> Instance:
        claim = payoffs if isinstance(payoffs, Claim) else make_claim(self.tree, payoffs)
        return Instance(self.tree, self.family, claim, check=False)


def _values(claim) -> Mapping[int, Any]:
    return claim.payoffs if isinstance(claim, Claim) else claim


def _check_shape(model: Model, f: Mapping) -> None:
    if set(f) != set(model.leaf_weights):
        raise ShapeMismatch("claim and model are defined on different leaves")


def expectation(model: Model, claim, exact: bool = False):
    if exact and isinstance(claim, Claim):
        f = claim.exact_payoffs
    else:
        f = _values(claim)
    _check_shape(model, f)
    if exact:
        return sum((model.exact_weights[w] * to_fraction(f[w]) for w in f), Fraction(0))
    return sum(model.leaf_weights[w] * f[w] for w in f)


def seminorm(model: Model, claim, exact: bool = False):
    """``E_P[|f|]``; with ``exact=True`` the exact weights and payoffs are used."""
    f = claim.exact_payoffs if exact and isinstance(claim, Claim) else _values(claim)
    _check_shape(model, f)
    if exact:
        return sum((model.exact_weights[w] * abs(to_fraction(f[w])) for w in f), Fraction(0))
    return sum(model.leaf_weights[w] * abs(f[w]) for w in f)


def l1_norm(family: ModelFamily | Sequence[Model], claim, exact: bool = False):
    """``sup_P E_P[|f|]`` over the (finite) family."""
    return max(seminorm(m, claim, exact) for m in family)


# --------------------------------------------------------------------------
# generators


def _extreme_transitions(prices: Sequence[float], s: float) -> list[np.ndarray]:
    """Vertices of the polytope of martingale transitions out of a node at price ``s``."""
    k = len(prices)
    out = []
    for i, c in enumerate(prices):
        if c == s:
            v = np.zeros(k)
            v[i] = 1.0
            out.append(v)
    for i, j in itertools.product(range(k), repeat=2):
        lo, hi = prices[i], prices[j]
        if lo < s < hi:
            v = np.zeros(k)
            v[i] = (hi - s) / (hi - lo)
            v[j] = (s - lo) / (hi - lo)
            out.append(v)
    return out


def _viable_nodes(tree: EventTree, forbidden: frozenset[int]) -> set[int]:
    """Nodes below which some martingale measure avoids ``forbidden``."""
    viable = {w for w in tree.leaves if w not in forbidden}
    for t in range(tree.horizon - 1, -1, -1):
        for n in (n for n in tree.interior if tree.nodes[n].time == t):
            kids = [c for c in tree.children[n] if c in viable]
            if _extreme_transitions([tree.nodes[c].price for c in kids], tree.nodes[n].price):
                viable.add(n)
    return viable


def _sample_transition(rng: np.random.Generator, prices, s) -> np.ndarray:
    ext = _extreme_transitions(prices, s)
    if len(ext) == 1:
        return ext[0]
    chosen = rng.random(len(ext)) < 0.5
    if not chosen.any():
        chosen[rng.integers(len(ext))] = True
    idx = np.flatnonzero(chosen)
    lam = rng.dirichlet(np.ones(len(idx)))
    q = sum(l * ext[i] for l, i in zip(lam, idx))
    # renormalize away rounding so the weights sum to one
    return q / q.sum()


def _sample_models(tree: EventTree, viable: set[int], k: int, rng: np.random.Generator) -> list[Model]:
    models: list[Model] = []
    seen: list[dict[int, float]] = []
    for i in range(k):
        for _attempt in range(20):
            trans: dict[int, dict[int, float]] = {}
            for n in tree.interior:
                if n not in viable:
                    continue
                kids = [c for c in tree.children[n] if c in viable]
                q = _sample_transition(rng, [tree.nodes[c].price for c in kids], tree.nodes[n].price)
                trans[n] = dict(zip(kids, q.tolist()))
            weights = {}
            for w in tree.leaves:
                p = 1.0
                path = path_of(tree, w)
                for a, b in zip(path, path[1:]):
                    p *= trans.get(a, {}).get(b, 0.0)
                    if p == 0.0:
                        break
                weights[w] = p
            if weights not in seen:
                break
        seen.append(weights)
        total = sum(weights.values())
        models.append(make_model(tree, f"P{i}", {w: p / total for w, p in weights.items()}))
    return models


def _make_payoff(tree: EventTree, claim, rng: np.random.Generator, strike: float) -> Claim:
    if isinstance(claim, Claim):
        return claim
    if isinstance(claim, Mapping):
        return make_claim(tree, claim)
    S = {w: tree.nodes[w].price for w in tree.leaves}
    if claim == "call":
        vals = {w: max(s - strike, 0.0) for w, s in S.items()}
    elif claim == "put":
        vals = {w: max(strike - s, 0.0) for w, s in S.items()}
    elif claim == "random":
        vals = {w: float(np.round(rng.uniform(-1.0, 2.0), 3)) for w in tree.leaves}
    elif callable(claim):
        vals = {w: float(claim(s)) for w, s in S.items()}
    else:
        raise ValueError(f"unknown claim {claim!r}")
    return make_claim(tree, vals)


def interval_tree(T: int, interval: tuple[float, float], m: int) -> EventTree:
    """``m``-ary recombination-free tree with ``S_0 = 1`` and ratios on ``linspace(lo, hi, m)``."""
    lo, hi = map(float, interval)
    if not lo < 1.0 < hi:
        raise InfeasibleInterval(f"interval [{lo}, {hi}] must contain 1 in its interior")
    if T < 1 or m < 2:
        raise ValueError("need T >= 1 and at least two ratios per node")
    ratios = np.linspace(lo, hi, m).tolist()
    nodes = [(0, 0, None, 1.0)]
    frontier = [(0, 1.0)]
    next_id = 1
    for t in range(1, T + 1):
        new = []
        for parent, s in frontier:
            for r in ratios:
                nodes.append((next_id, t, parent, s * r))
                new.append((next_id, s * r))
                next_id += 1
        frontier = new
    return validate_tree(nodes, horizon=T)


def gen_interval_instance(
    T: int,
    interval: tuple[float, float],
    m: int,
    k: int,
    seed: int,
    claim: str | Callable | Mapping = "call",
    strike: float = 1.0,
) -> Instance:
    """Random instance of the bounded-ratio model.

    Each of the ``k`` models mixes, node by node, a random subset of the
    extreme martingale transitions, so some leaves may be null under a model.
    """
    if k < 1:
        raise ValueError("model_count must be at least 1")
    tree = interval_tree(T, interval, m)
    rng = np.random.default_rng(seed)
    models = _sample_models(tree, set(tree.nodes), k, rng)
    return Instance(tree, make_family(tree, models), _make_payoff(tree, claim, rng, strike))


def gen_nullset_instance(
    tree: EventTree,
    forbidden: Iterable[int],
    k: int,
    seed: int,
    claim: str | Callable | Mapping = "call",
    strike: float | None = None,
) -> Instance:
    """Random martingale models on ``tree`` that put no mass on ``forbidden`` leaves."""
    forbidden = frozenset(int(w) for w in forbidden)
    unknown = forbidden - set(tree.leaves)
    if unknown:
        raise ShapeMismatch(f"forbidden set contains non-leaves {sorted(unknown)}")
    if k < 1:
        raise ValueError("model_count must be at least 1")
    viable = _viable_nodes(tree, forbidden)
    if tree.root not in viable:
        raise NoViableModel("every martingale measure on this tree charges the forbidden set")
    rng = np.random.default_rng(seed)
    models = _sample_models(tree, viable, k, rng)
    strike = tree.nodes[tree.root].price if strike is None else strike
    return Instance(tree, make_family(tree, models), _make_payoff(tree, claim, rng, strike))


def gen_random_instance(seed: int, max_T: int = 3, max_branching: int = 3, max_models: int = 4) -> Instance:
    """Interval instance with horizon, branching, model count, interval and
    claim type all drawn from ``seed``."""
    rng = np.random.default_rng([seed, 7])
    T = int(rng.integers(1, max_T + 1))
    m = int(rng.integers(2, max_branching + 1))
    k = int(rng.integers(1, max_models + 1))
    lo = round(float(rng.uniform(0.5, 0.95)), 2)
    hi = round(float(rng.uniform(1.05, 2.0)), 2)
    claim = ("call", "put", "random")[int(rng.integers(3))]
    strike = round(float(rng.uniform(0.8, 1.2)), 2)
    return gen_interval_instance(T, (lo, hi), m, k, seed, claim=claim, strike=strike)


# --------------------------------------------------------------------------
# reference instances


def g3_tree() -> EventTree:
    """One period, root price 1, leaves 1, 2, 3 at prices 0.5, 1, 2."""
    return validate_tree([(0, 0, None, 1), (1, 1, 0, "0.5"), (2, 1, 0, 1), (3, 1, 0, 2)])


def gap3_instance() -> Instance:
    """Indicator of the top leaf of G3 under the single model (1/3, 1/2, 1/6)."""
    tree = g3_tree()
    p0 = make_model(tree, "P0", {1: Fraction(1, 3), 2: Fraction(1, 2), 3: Fraction(1, 6)})
    return Instance(tree, make_family(tree, [p0]), make_claim(tree, {1: 0, 2: 0, 3: 1}))


def binomial_instance() -> Instance:
    """One-period binomial call: leaves at 2 and 0.5, model (1/3, 2/3), strike 1."""
    tree = validate_tree([(0, 0, None, 1), (1, 1, 0, 2), (2, 1, 0, "0.5")])
    p = make_model(tree, "P", {1: Fraction(1, 3), 2: Fraction(2, 3)})
    return Instance(tree, make_family(tree, [p]), make_claim(tree, {1: 1, 2: 0}))
