"""Cross-checking random markets against the exact oracle, and probing the
closedness of the cone of superhedgeable claims."""
import time

from robusthedge.models import binomial_instance, gap3_instance, gen_interval_instance
from robusthedge.oracle import closedness_probe, cross_check

t0 = time.perf_counter()
worst = 0.0
for seed in range(20):
    inst = gen_interval_instance(2, (0.8, 1.25), 2, 2, seed)
    cc = cross_check(inst)
    assert cc.ok
    worst = max(worst, cc.max_diff)
print(f"20 interval markets: float vs exact max diff {worst:.2e} ({time.perf_counter() - t0:.2f}s)")

inst = gen_interval_instance(1, (0.5, 2.0), 3, 1, seed=3)
cc = cross_check(inst)
print("exact prices:", cc.exact.primal_price, cc.exact.model_sup, "gap", cc.exact.gap)

for name, inst in [("binomial", binomial_instance()), ("gap3", gap3_instance())]:
    rep = closedness_probe(inst, n_steps=12, seed=1)
    print(name, "limit in cone:", rep.limit_in_cone,
          "last distance", f"{rep.distances[-1]:.2e}")
