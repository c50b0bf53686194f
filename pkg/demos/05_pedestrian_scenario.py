"""The pedestrian-crossing scenario.

A richer rule with implication and an until: whenever a pedestrian is on
the crossing and the car has not passed it, the car must hold back until
the pedestrian leaves and respect the speed limit.  Implication
desugars to negation-plus-disjunction, so its weights live on the
disjunction.
"""

import numpy as np

from wstlpref import (
    LearnConfig,
    PedestrianParams,
    PedestrianSpec,
    WeightValuation,
    build_pairs,
    generate_dataset,
    parameter_slots,
    pedestrian_formula,
    pedestrian_trajectory,
    preferences_from_valuation,
    random_sampling_solve,
    rho,
)

spec = PedestrianSpec()
phi = pedestrian_formula(spec)
print("rule:", spec.formula_text())
print("learnable weights:", len(parameter_slots(phi, spec.horizon)))

print("\nhand-built behaviors:")
cases = {
    "stop and wait": PedestrianParams(v0=6.0, decel=4.0, t_in=5, t_out=30),
    "arrive after exit": PedestrianParams(v0=4.0, decel=4.0, t_in=0, t_out=20,
                                          yield_margin=None),
    "cross while present": PedestrianParams(v0=7.0, decel=4.0, t_in=0, t_out=55,
                                            yield_margin=None),
    "yield but speed": PedestrianParams(v0=spec.v_lim * 1.3, decel=4.0, t_in=0,
                                        t_out=40),
}
for name, params in cases.items():
    sig = pedestrian_trajectory(spec, params)
    r = rho(sig, phi, 0)
    verdict = "satisfies" if r > 0 else "violates"
    print(f"  {name:22s} robustness {r:+8.3f}  -> {verdict}")

print("\nlearning from a hidden valuation:")
sats, rate = generate_dataset(spec, 60, True, 5)
signals = {f"p{i:03d}": s for i, s in enumerate(sats)}
rng = np.random.default_rng(11)
pairset = build_pairs(signals, 40, 2.0, ["x", "v"], rng)
hidden = WeightValuation.from_vector(
    phi, 1 - rng.random(len(parameter_slots(phi, spec.horizon))), spec.horizon
)
dataset = preferences_from_valuation(signals, pairset.ids(), phi, hidden,
                                     spec.horizon, min_margin_fraction=0.05)
res = random_sampling_solve(dataset, phi, LearnConfig(n_samples=1000, seed=2))
print(f"  {len(dataset)} pairs, sampling satisfied {res.satisfied_pairs} "
      f"({res.margin_satisfied_pairs} above the 5% margin)")
