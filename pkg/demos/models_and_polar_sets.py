"""Martingale models, polar sets and the family norm.

On the three-leaf tree (prices 0.5, 1, 2 after one step from 1) a single
model that never charges the middle leaf makes that leaf polar. Claims that
differ only there are the same object quasi-surely.
"""
from fractions import Fraction as F

from robusthedge import (
    is_martingale_measure,
    l1_norm,
    make_family,
    make_model,
    polar_set,
    seminorm,
)
from robusthedge.models import g3_tree

tree = g3_tree()
print("leaf prices:", {w: tree.price(w) for w in tree.leaves})

P = make_model(tree, "P", {1: F(2, 3), 3: F(1, 3)})
Q = make_model(tree, "Q", {2: 1})
print("P martingale:", is_martingale_measure(tree, P).ok)
print("Q martingale:", is_martingale_measure(tree, Q).ok)

bad = make_model(tree, "bad", {1: F(1, 2), 3: F(1, 2)})
check = is_martingale_measure(tree, bad)
print("bad martingale:", check.ok, "worst node", check.worst_node, "residuals", check.residuals)

only_P = make_family(tree, [P])
both = make_family(tree, [P, Q])
print("polar set under {P}:", polar_set(tree, only_P).polar_leaves)
print("polar set under {P, Q}:", polar_set(tree, both).polar_leaves)

f = {1: 0, 2: 5, 3: 0}
print("claim charging only leaf 2:")
print("  norm under {P}   ", l1_norm(only_P, f, exact=True))
print("  norm under {P, Q}", l1_norm(both, f, exact=True))

g = {1: 1, 2: -2, 3: 3}
print("seminorms of g:", {m.name: seminorm(m, g, exact=True) for m in both},
      "family norm", l1_norm(both, g, exact=True))
