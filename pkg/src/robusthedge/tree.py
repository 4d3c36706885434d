"""Finite event trees, predictable strategies, claims and the wealth integral.

A tree node at time ``t`` is an atom of the time-``t`` partition of the path
space, and a leaf stands for the whole root-to-leaf path. Prices are kept in
two forms: a float used by the solver and an exact rational used by the oracle.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any

from ._num import is_finite_real, to_fraction
from .errors import (
    ChildlessInterior,
    DuplicateId,
    MissingStrategyNode,
    NonFinitePrice,
    NonScalarPrice,
    OrphanNode,
    RootError,
    ShapeMismatch,
    TimeSkew,
    UnknownLeaf,
    UnknownNode,
)

__all__ = [
    "Node",
    "EventTree",
    "Strategy",
    "Claim",
    "validate_tree",
    "path_of",
    "wealth",
    "wealth_vector",
    "make_strategy",
    "make_claim",
]


@dataclass(frozen=True)
class Node:
    id: int
    time: int
    parent: int | None
    price: float


@dataclass(frozen=True, eq=False)
class EventTree:
    """Validated event tree. Build it with :func:`validate_tree`."""

    horizon: int
    nodes: Mapping[int, Node]
    children: Mapping[int, tuple[int, ...]]
    root: int
    leaves: tuple[int, ...]
    interior: tuple[int, ...]
    exact_prices: Mapping[int, Fraction] = field(repr=False)
    _paths: Mapping[int, tuple[int, ...]] = field(repr=False)

    def price(self, node: int, exact: bool = False):
        try:
            return self.exact_prices[node] if exact else self.nodes[node].price
        except KeyError:
            raise UnknownNode(f"unknown node {node}") from None

    def is_leaf(self, node: int) -> bool:
        return self.nodes[node].time == self.horizon

    def leaves_below(self, node: int) -> tuple[int, ...]:
        if node not in self.nodes:
            raise UnknownNode(f"unknown node {node}")
        t = self.nodes[node].time
        return tuple(w for w in self.leaves if self._paths[w][t] == node)

    def price_scale(self) -> float:
        return max(abs(n.price) for n in self.nodes.values())

    def __len__(self):
        return len(self.nodes)


def _field(raw, name, index):
    if isinstance(raw, Mapping):
        return raw[name]
    return raw[index]


def validate_tree(raw_nodes: Iterable[Any], horizon: int | None = None) -> EventTree:
    """Validate a raw node list and derive the adjacency and leaf indices.

    Each raw node is either a mapping with keys ``id``, ``time``, ``parent``,
    ``price`` or a 4-tuple in that order. ``horizon`` defaults to the largest
    time present.
    """
    nodes: dict[int, Node] = {}
    exact: dict[int, Fraction] = {}
    for raw in raw_nodes:
        nid = int(_field(raw, "id", 0))
        time = int(_field(raw, "time", 1))
        parent = _field(raw, "parent", 2)
        parent = None if parent is None else int(parent)
        price = _field(raw, "price", 3)
        if nid in nodes:
            raise DuplicateId(f"node id {nid} appears twice")
        if isinstance(price, (list, tuple, dict)):
            raise NonScalarPrice(f"node {nid}: only scalar price processes are supported")
        if not is_finite_real(price):
            raise NonFinitePrice(f"node {nid}: price {price!r} is not a finite real")
        exact[nid] = to_fraction(price)
        nodes[nid] = Node(nid, time, parent, float(exact[nid]) if isinstance(price, str) else float(price))

    if not nodes:
        raise RootError("empty tree")
    T = max(n.time for n in nodes.values()) if horizon is None else int(horizon)
    if T < 1:
        raise RootError(f"horizon must be at least 1, got {T}")

    roots = [n.id for n in nodes.values() if n.parent is None]
    if len(roots) != 1:
        raise RootError(f"expected exactly one root, found {len(roots)}")
    root = roots[0]
    if nodes[root].time != 0:
        raise RootError(f"root {root} has time {nodes[root].time}, expected 0")

    children: dict[int, list[int]] = {nid: [] for nid in nodes}
    for n in sorted(nodes.values(), key=lambda n: n.id):
        if n.parent is None:
            continue
        if n.parent not in nodes:
            raise OrphanNode(f"node {n.id}: parent {n.parent} does not exist")
        if nodes[n.parent].time != n.time - 1:
            raise TimeSkew(
                f"node {n.id} has time {n.time} but its parent {n.parent} "
                f"has time {nodes[n.parent].time}"
            )
        children[n.parent].append(n.id)

    for n in nodes.values():
        if n.time < 0 or n.time > T:
            raise TimeSkew(f"node {n.id}: time {n.time} outside 0..{T}")
        if n.time < T and not children[n.id]:
            raise ChildlessInterior(f"node {n.id} at time {n.time} < {T} has no children")

    # parent links with consistent times cannot form cycles, so every node is
    # reached from the root
    paths: dict[int, tuple[int, ...]] = {}
    stack = [(root, (root,))]
    while stack:
        nid, path = stack.pop()
        if nodes[nid].time == T:
            paths[nid] = path
        for c in children[nid]:
            stack.append((c, path + (c,)))

    leaves = tuple(sorted(paths))
    interior = tuple(sorted(nid for nid, n in nodes.items() if n.time < T))
    return EventTree(
        horizon=T,
        nodes=MappingProxyType(dict(sorted(nodes.items()))),
        children=MappingProxyType({k: tuple(v) for k, v in children.items()}),
        root=root,
        leaves=leaves,
        interior=interior,
        exact_prices=MappingProxyType(exact),
        _paths=MappingProxyType(paths),
    )


def path_of(tree: EventTree, leaf: int) -> list[int]:
    """Node ids from the root down to ``leaf`` (length ``T + 1``)."""
    try:
        return list(tree._paths[leaf])
    except KeyError:
        raise UnknownLeaf(f"unknown leaf {leaf}") from None


@dataclass(frozen=True)
class Strategy:
    """Position held over the next period, one value per non-terminal node."""

    values: Mapping[int, Any]

    def __getitem__(self, node):
        return self.values[node]


@dataclass(frozen=True)
class Claim:
    """Terminal payoff, one value per leaf."""

    payoffs: Mapping[int, float]
    exact_payoffs: Mapping[int, Fraction] = field(repr=False, compare=False)

    def __getitem__(self, leaf):
        return self.payoffs[leaf]

    def value(self, leaf: int, exact: bool = False):
        return self.exact_payoffs[leaf] if exact else self.payoffs[leaf]

    def sup_norm(self) -> float:
        return max(abs(v) for v in self.payoffs.values())


def make_strategy(tree: EventTree, values: Mapping[int, Any] | float = 0.0) -> Strategy:
    """Validate a strategy against ``tree``; a scalar gives a constant strategy."""
    if not isinstance(values, Mapping):
        return Strategy(MappingProxyType({n: values for n in tree.interior}))
    vals = {int(k): v for k, v in values.items()}
    extra = set(vals) - set(tree.interior)
    if extra:
        raise MissingStrategyNode(f"strategy refers to non-interior or unknown nodes {sorted(extra)}")
    missing = set(tree.interior) - set(vals)
    if missing:
        raise MissingStrategyNode(f"strategy has no value at nodes {sorted(missing)}")
    for k, v in vals.items():
        if not is_finite_real(v):
            raise ShapeMismatch(f"strategy value at node {k} is not finite: {v!r}")
    return Strategy(MappingProxyType(dict(sorted(vals.items()))))


def make_claim(tree: EventTree, payoffs: Mapping[int, Any]) -> Claim:
    vals = {int(k): v for k, v in payoffs.items()}
    if set(vals) != set(tree.leaves):
        unknown = sorted(set(vals) - set(tree.leaves))
        missing = sorted(set(tree.leaves) - set(vals))
        raise ShapeMismatch(f"claim must cover exactly the leaves (unknown {unknown}, missing {missing})")
    for k, v in vals.items():
        if not is_finite_real(v):
            raise ShapeMismatch(f"claim value at leaf {k} is not finite: {v!r}")
    exact = {k: to_fraction(v) for k, v in vals.items()}
    floats = {k: float(exact[k]) if isinstance(v, str) else float(v) for k, v in vals.items()}
    return Claim(MappingProxyType(dict(sorted(floats.items()))), MappingProxyType(dict(sorted(exact.items()))))


def wealth(tree: EventTree, strategy: Strategy, leaf: int, t: int | None = None, exact: bool = False):
    """Discrete-time integral ``sum_{u<=t} H_u (S_u - S_{u-1})`` along ``leaf``'s path.

    ``t`` defaults to the horizon. With ``exact=True`` the exact tree prices are
    used; the result is a Fraction only if the strategy values are exact too.
    """
    path = path_of(tree, leaf)
    t = tree.horizon if t is None else t
    total = Fraction(0) if exact else 0.0
    for u in range(1, t + 1):
        prev, cur = path[u - 1], path[u]
        try:
            h = strategy.values[prev]
        except KeyError:
            raise MissingStrategyNode(f"strategy has no value at node {prev}") from None
        total += h * (tree.price(cur, exact) - tree.price(prev, exact))
    return total


def wealth_vector(tree: EventTree, strategy: Strategy, t: int | None = None) -> dict[int, float]:
    return {w: wealth(tree, strategy, w, t) for w in tree.leaves}
