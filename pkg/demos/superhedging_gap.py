"""Superhedging prices, the dual over martingale measures, and the duality gap.

Two reference markets. In the complete binomial market the cheapest
superhedge equals the model price. On the three-leaf market with a single
model the dual can move mass to leaves the model already charges, and the
superhedging price strictly exceeds the model price.
"""
from robusthedge import (
    binomial_instance,
    duality_report,
    gap3_instance,
    superhedge,
    verify_superhedge,
)


def show(title, inst):
    rep = duality_report(inst, exact=True)
    print(title)
    print("  superhedging price", rep.primal_price, "dual price", rep.dual_price)
    print("  best model price  ", rep.model_sup, f"({rep.model_sup_name})", "gap", rep.gap)
    print("  optimal strategy  ", dict(rep.optimal_strategy.values))
    print("  dual measure      ", rep.optimal_dual_measure)


show("binomial call", binomial_instance())
show("indicator of the top leaf, one model", gap3_instance())

inst = gap3_instance()
plan = superhedge(inst)
print("float plan:", plan.price, dict(plan.strategy.values))
print("verify:", verify_superhedge(inst, plan))
