"""
Evaluate Phi^{[m,s]} two ways: by its defining double sum and by the
resolution plan, which shifts s to 0 or 1/2, splits even m by index
doubling and ends in closed theta/eta forms.

    python3 demos/resolve_and_evaluate.py
"""

from mocktheta.appell import PhiSpec, phi_direct, phi_eval_plan, phi_resolve
from mocktheta.numeric import residual, to_mpc

point = tuple(to_mpc(v) for v in ("0.05+0.9i", "0.21+0.03i", "-0.12+0.05i", "0"))

for m, s in [("4", "0"), ("3", "5/2"), ("3/2", "-2")]:
    plan = phi_resolve(m, s)
    print(f"Phi^[{m},{s}]: doubling depth {plan.depth}, {plan.node_count()} nodes")
    print(plan.describe(1))
    direct = phi_direct(PhiSpec.of(m, s), point)
    via_plan = phi_eval_plan(plan, point)
    print(f"  direct   {complex(direct):.12g}")
    print(f"  via plan {complex(via_plan):.12g}   residual {residual(direct, via_plan):.1e}\n")
