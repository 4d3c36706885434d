"""Command-line front end and the JSON instance format.

Exit codes: 0 success, 1 validation or verification failure, 2 internal or
numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path

from ._num import to_fraction
from .errors import NumericalFailure, RobustHedgeError, TooLarge
from .hedge import HedgePlan, duality_report, verify_superhedge
from .models import (
    Instance,
    ModelFamily,
    gen_interval_instance,
    gen_nullset_instance,
    interval_tree,
    is_martingale_measure,
    make_model,
    polar_set,
)
from .tree import make_claim, make_strategy, validate_tree

__all__ = [
    "InstanceFormatError",
    "parse_instance",
    "load_instance",
    "instance_to_json",
    "dumps_instance",
    "parse_plan",
    "main",
]

TOP_KEYS = {"horizon", "nodes", "models", "claim"}
NODE_KEYS = {"id", "time", "parent", "price"}
MODEL_KEYS = {"name", "weights"}
PLAN_KEYS = {"price", "strategy"}


class InstanceFormatError(RobustHedgeError, ValueError):
    pass


def _loads(text: str):
    # keep decimals exact: the oracle must not inherit binary rounding
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _keys(obj, allowed, where, required=None):
    if not isinstance(obj, Mapping):
        raise InstanceFormatError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise InstanceFormatError(f"{where}: unknown keys {sorted(unknown)}")
    missing = (allowed if required is None else required) - set(obj)
    if missing:
        raise InstanceFormatError(f"{where}: missing keys {sorted(missing)}")


def _id(key, where) -> int:
    try:
        return int(key)
    except (TypeError, ValueError):
        raise InstanceFormatError(f"{where}: {key!r} is not an integer id") from None


def parse_instance(doc, check: bool = True) -> Instance:
    """Build an :class:`Instance` from a decoded instance document (or its JSON text)."""
    if isinstance(doc, (str, bytes)):
        doc = _loads(doc)
    _keys(doc, TOP_KEYS, "instance")
    nodes = []
    if not isinstance(doc["nodes"], list):
        raise InstanceFormatError("instance: 'nodes' must be an array")
    for i, raw in enumerate(doc["nodes"]):
        _keys(raw, NODE_KEYS, f"nodes[{i}]")
        parent = raw["parent"]
        nodes.append((
            _id(raw["id"], f"nodes[{i}].id"),
            _id(raw["time"], f"nodes[{i}].time"),
            None if parent is None else _id(parent, f"nodes[{i}].parent"),
            raw["price"],
        ))
    tree = validate_tree(nodes, horizon=_id(doc["horizon"], "horizon"))
    if not isinstance(doc["models"], list):
        raise InstanceFormatError("instance: 'models' must be an array")
    models = []
    for i, raw in enumerate(doc["models"]):
        _keys(raw, MODEL_KEYS, f"models[{i}]")
        weights = {_id(k, f"models[{i}].weights"): v for k, v in raw["weights"].items()}
        models.append(make_model(tree, str(raw["name"]), weights))
    claim = make_claim(tree, {_id(k, "claim"): v for k, v in doc["claim"].items()})
    return Instance(tree, ModelFamily(tuple(models)), claim, check=check)


def load_instance(path, check: bool = True) -> Instance:
    return parse_instance(Path(path).read_text(), check=check)


def _number(value):
    """JSON value for an exact number: a plain number when the float is lossless,
    else a ``"p/q"`` string."""
    fr = to_fraction(value)
    if fr.denominator == 1 and abs(fr.numerator) < 2**53:
        return int(fr)
    f = float(fr)
    return f if Fraction(repr(f)) == fr else str(fr)


def instance_to_json(instance: Instance) -> dict:
    tree = instance.tree
    return {
        "horizon": tree.horizon,
        "nodes": [
            {"id": n.id, "time": n.time, "parent": n.parent, "price": _number(tree.exact_prices[n.id])}
            for n in tree.nodes.values()
        ],
        "models": [
            {"name": m.name, "weights": {str(w): _number(p) for w, p in m.exact_weights.items()}}
            for m in instance.family
        ],
        "claim": {str(w): _number(v) for w, v in instance.claim.exact_payoffs.items()},
    }


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_json(instance), indent=2)


def parse_plan(doc, instance: Instance) -> HedgePlan:
    """Plan document ``{"price": x, "strategy": {node: H}}``.

    The output of ``price`` is accepted as well; its ``primal`` entry is the price.
    """
    if isinstance(doc, (str, bytes)):
        doc = _loads(doc)
    if isinstance(doc, Mapping) and "primal" in doc and "price" not in doc:
        doc = {"price": doc["primal"], "strategy": doc.get("strategy", {})}
    _keys(doc, PLAN_KEYS, "plan")
    price = doc["price"]
    price = Fraction(price) if isinstance(price, (int, str)) else price
    strategy = {_id(k, "plan.strategy"): (Fraction(v) if isinstance(v, str) else v)
                for k, v in doc["strategy"].items()}
    return HedgePlan(price, make_strategy(instance.tree, strategy))


def _render(v, exact):
    if exact:
        return str(v)
    return float(v)


def _fmt_set(s) -> str:
    return "{" + ", ".join(map(str, sorted(s))) + "}" if s else "∅"


# --------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    instance = load_instance(args.path, check=False)
    tree = instance.tree
    lines = [f"tree: horizon {tree.horizon}, {len(tree)} nodes, {len(tree.leaves)} leaves"]
    all_ok = True
    for m in instance.family:
        res = is_martingale_measure(tree, m, args.tol_martingale)
        worst = max(res.residuals.values(), default=0.0)
        if res.ok:
            lines.append(f"  {m.name}: martingale OK (max residual {worst:.3g})")
            continue
        all_ok = False
        lines.append(f"  {m.name}: NOT a martingale measure")
        lines.append("    node   residual")
        for n, r in res.residuals.items():
            if r > 0:
                lines.append(f"    {n:>4}   {r!r}")
    polar = polar_set(tree, instance.family)
    k = len(instance.family)
    summary = (f"{k} model{'s' if k != 1 else ''}, martingale {'OK' if all_ok else 'FAILED'}, "
               f"polar set {_fmt_set(polar.polar_leaves)}")
    print(summary)
    print("\n".join(lines))
    print(f"polar leaves: {_fmt_set(polar.polar_leaves)}")
    print(f"q.s. support: {_fmt_set(polar.qs_support)}")
    return 0 if all_ok else 1


def cmd_price(args) -> int:
    instance = load_instance(args.path)
    rep = duality_report(instance, eps=args.tol, exact=args.exact)
    out = {
        "primal": _render(rep.primal_price, args.exact),
        "dual": _render(rep.dual_price, args.exact),
        "model_sup": _render(rep.model_sup, args.exact),
        "model_sup_model": rep.model_sup_name,
        "gap": _render(rep.gap, args.exact),
        "strategy": {str(n): _render(h, args.exact) for n, h in rep.optimal_strategy.values.items()},
        "dual_measure": {str(w): _render(q, args.exact) for w, q in rep.optimal_dual_measure.items()},
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_gen(args) -> int:
    if args.interval is None and args.nullset is None:
        raise InstanceFormatError("gen needs --interval and/or --nullset")
    if args.nullset is not None:
        if args.tree is not None:
            tree = load_instance(args.tree, check=False).tree
        elif args.interval is not None:
            tree = interval_tree(args.T, args.interval, args.branching)
        else:
            raise InstanceFormatError("--nullset needs a tree: pass --tree FILE or --interval LO HI")
        forbidden = [int(s) for s in args.nullset.split(",") if s.strip()]
        inst = gen_nullset_instance(tree, forbidden, args.models, args.seed, claim=args.claim,
                                    strike=args.strike)
    else:
        inst = gen_interval_instance(args.T, args.interval, args.branching, args.models, args.seed,
                                     claim=args.claim, strike=1.0 if args.strike is None else args.strike)
    print(dumps_instance(inst))
    return 0


def cmd_verify(args) -> int:
    instance = load_instance(args.path)
    plan = parse_plan(Path(args.plan).read_text(), instance)
    res = verify_superhedge(instance, plan, args.tol)
    leaf = res.worst_leaf
    price = instance.tree.nodes[leaf].price
    shortfall = res.shortfall
    shown = f"{shortfall} ({float(shortfall)!r})" if isinstance(shortfall, Fraction) else repr(float(shortfall))
    status = "OK" if res.ok else "FAIL"
    print(f"{status}: worst leaf {leaf} (S={price!r}), shortfall {shown}")
    return 0 if res.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="robusthedge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="validate an instance file")
    c.add_argument("path")
    c.add_argument("--tol-martingale", type=float, default=1e-9)
    c.set_defaults(func=cmd_check)

    pr = sub.add_parser("price", help="primal/dual superhedging prices and the gap")
    pr.add_argument("path")
    pr.add_argument("--exact", action="store_true", help="solve with the exact rational oracle")
    pr.add_argument("--tol", type=float, default=1e-8)
    pr.set_defaults(func=cmd_price)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--interval", nargs=2, type=float, metavar=("LO", "HI"))
    g.add_argument("--nullset", metavar="IDS", help="comma-separated leaf ids no model may charge")
    g.add_argument("--tree", metavar="FILE", help="take the tree from this instance file (with --nullset)")
    g.add_argument("--T", type=int, default=1)
    g.add_argument("--branching", type=int, default=2)
    g.add_argument("--models", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--claim", choices=("call", "put", "random"), default="call")
    g.add_argument("--strike", type=float, default=None)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="check that a plan superhedges quasi-surely")
    v.add_argument("path")
    v.add_argument("--plan", required=True)
    v.add_argument("--tol", type=float, default=1e-8)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NumericalFailure, TooLarge) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except RobustHedgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
