"""Weighted robustness and the bounded weight domain.

Weights scale the operands of min/max operators, shifting which parts of
a rule dominate the score.  Scaling never flips signs (weights are
positive), so weighted robustness agrees with the unweighted one about
satisfaction; it only reorders *how well* different satisfying behaviors
score.  Every valuation can be rescaled into (0, 1]^n without changing
any comparison, which is what makes random sampling over a bounded box a
complete search strategy.
"""

import numpy as np

from wstlpref import (
    Channel,
    Signal,
    WeightValuation,
    normalize_to_domain,
    parameter_slots,
    parse,
    rho,
    wstl_robustness,
)

s = Signal([Channel("s1"), Channel("s2")], [[1, -1, -2, -2], [1, 1, 1, 2]])
phi = parse("F(-s1 >= 0 & s2 >= 0)")
slots = parameter_slots(phi, horizon=3)
print("weight slots:", [sl.id for sl in slots])

# Four weights for the four time steps of F, two for the conjunction.
w = WeightValuation.from_vector(phi, [1.5, 0.3, 3.0, 1.2, 1.0, 2.0], 3)
print("traditional robustness:", rho(s, phi, 0))
print("weighted robustness:   ", wstl_robustness(s, phi, w, 0))

# All-ones weights reproduce the traditional value exactly.
ones = WeightValuation.ones(phi, 3)
print("all-ones weights:      ", wstl_robustness(s, phi, ones, 0))

# Normalization pushes every weight into (0, 1] (each operator block gets
# max entry 1).  Robustness values shrink by one shared constant, so all
# orderings survive.
wbar = normalize_to_domain(phi, w, 3)
print("\nnormalized weights:", np.round([wbar.values[sl.id] for sl in slots], 3))
print("normalized robustness:", wstl_robustness(s, phi, wbar, 0))

rng = np.random.default_rng(0)
print("\norder preservation on random signals:")
for _ in range(5):
    other = Signal(s.channels, rng.normal(0, 2, (2, 4)))
    before = (wstl_robustness(s, phi, w, 0), wstl_robustness(other, phi, w, 0))
    after = (wstl_robustness(s, phi, wbar, 0), wstl_robustness(other, phi, wbar, 0))
    print(
        f"  before {before[0]:+.3f} vs {before[1]:+.3f}   "
        f"after {after[0]:+.3f} vs {after[1]:+.3f}   "
        f"same order: {(before[0] > before[1]) == (after[0] > after[1])}"
    )

# Different weights rank the same two satisfying behaviors differently;
# that is the lever preference learning pulls.  `a` satisfies during the
# first two steps, `b` during the last two.
a = Signal(s.channels, [[-1, -1, 1, 1], [2, 2, 0.5, 0.5]])
b = Signal(s.channels, [[1, 1, -1, -1], [0.5, 0.5, 2, 2]])
early = WeightValuation.from_vector(phi, [1, 0.2, 0.2, 0.2, 1, 1], 3)
late = WeightValuation.from_vector(phi, [0.2, 0.2, 0.2, 1, 1, 1], 3)
print("\npreferring early satisfaction:", wstl_robustness(a, phi, early, 0),
      ">", wstl_robustness(b, phi, early, 0))
print("preferring late satisfaction: ", wstl_robustness(a, phi, late, 0),
      "<", wstl_robustness(b, phi, late, 0))
