"""Event trees, strategies and terminal wealth.

A two-period tree where the price can go up or down each step. We build it
from (id, time, parent, price) tuples, then trade one unit at the root and
watch the gains accumulate along every path.
"""
from robusthedge import make_strategy, path_of, validate_tree, wealth
from robusthedge.tree import wealth_vector

nodes = [
    (0, 0, None, 1.0),
    (1, 1, 0, 1.5), (2, 1, 0, 0.75),
    (3, 2, 1, 2.0), (4, 2, 1, 1.0),
    (5, 2, 2, 1.0), (6, 2, 2, 0.5),
]
tree = validate_tree(nodes)
print("horizon", tree.horizon, "leaves", tree.leaves, "interior", tree.interior)

for leaf in tree.leaves:
    print(f"path to leaf {leaf}:", path_of(tree, leaf))

# hold one unit throughout, then switch off after a down move
H = make_strategy(tree, {0: 1.0, 1: 1.0, 2: 0.0})
print("terminal wealth:", wealth_vector(tree, H))
print("wealth after one period:", wealth_vector(tree, H, t=1))

# exact arithmetic follows the decimal text of the prices; the strategy must be exact too
H_exact = make_strategy(tree, {0: 1, 1: 1, 2: 0})
print("exact wealth at leaf 6:", wealth(tree, H_exact, 6, exact=True))

# a malformed tree is rejected up front
try:
    validate_tree([(0, 0, None, 1.0), (1, 2, 0, 1.0)])
except ValueError as exc:
    print("rejected:", type(exc).__name__, exc)
