"""Smoothed robustness and weight gradients.

Hard min/max are piecewise and give no useful derivatives, so the
gradient-based solver swaps them for log-sum-exp versions with a
sharpness parameter beta.  As beta grows the smooth value approaches the
hard one; the reverse pass then yields exact derivatives of the smooth
value with respect to every weight.
"""

import numpy as np

from wstlpref import (
    Channel,
    Signal,
    SoftConfig,
    WeightValuation,
    grad_weights,
    parse,
    soft_max,
    soft_min,
    soft_wstl_robustness,
    wstl_robustness,
)

print("soft_max([1, -1]) across sharpness:")
for beta in (0.01, 0.1, 1.0, 10.0, 1e4):
    print(f"  beta={beta:<8g} -> {soft_max([1.0, -1.0], beta):.6f}")
print("soft_min mirrors it:", soft_min([1.0, -1.0], 10.0))

s = Signal([Channel("s1"), Channel("s2")], [[1, -1, -2, -2], [1, 1, 1, 2]])
phi = parse("F(-s1 >= 0 & s2 >= 0)")
w = WeightValuation.from_vector(phi, [1.5, 0.3, 3.0, 1.2, 1.0, 2.0], 3)
hard = wstl_robustness(s, phi, w, 0)
print(f"\nhard weighted robustness: {hard}")
for beta in (1.0, 10.0, 100.0, 1e4):
    soft = soft_wstl_robustness(s, phi, w, SoftConfig(beta=beta), 0)
    print(f"  beta={beta:<8g} soft={soft:.6f}  |soft-hard|={abs(soft - hard):.2e}")

# The gradient concentrates on the weights that the max/min selections
# actually route through; at beta=50 the winning time step dominates.
cfg = SoftConfig(beta=50.0)
grads = grad_weights(s, phi, w, cfg, 0)
print("\nweight gradients at beta=50:")
for sid, g in grads.items():
    print(f"  {sid:8s} {g:+.6f}")

# Check one entry against a central finite difference.
sid = "/#w2"
step = 1e-6
up, dn = dict(w.values), dict(w.values)
up[sid] += step
dn[sid] -= step
fd = (
    soft_wstl_robustness(s, phi, WeightValuation(up), cfg, 0)
    - soft_wstl_robustness(s, phi, WeightValuation(dn), cfg, 0)
) / (2 * step)
print(f"\nfinite difference for {sid}: {fd:+.6f} (reverse mode {grads[sid]:+.6f})")

# Infinities cannot enter exp(), so the smooth path swaps them for a
# large finite sentinel; boolean channels keep working under smoothing.
flags = Signal([Channel("ok", "boolean")], [np.where([True], np.inf, -np.inf)])
print("\nsentinel for a true boolean:",
      soft_wstl_robustness(flags, parse("ok"), WeightValuation({}),
                           SoftConfig(beta=10, inf_sentinel=1e6), 0))
