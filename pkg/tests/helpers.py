"""Shared fixtures-in-spirit: the worked two-channel example and random
instance generators used by the property and acceptance suites."""

from __future__ import annotations

import numpy as np

from wstlpref import (
    Always,
    And,
    Channel,
    Eventually,
    Interval,
    Not,
    Or,
    Pred,
    PredicateFn,
    Signal,
    TrueNode,
    TruncationError,
    Until,
    WeightValuation,
    parameter_slots,
    parse,
    rho,
    root_weight_slots,
)

# The running example: s = [[1,-1,-2,-2],[1,1,1,2]], eventually(-s1>=0 and s2>=0),
# diamond weights [1.5,0.3,3,1.2], conjunction weights [1,2].
EXAMPLE_DIAMOND_W = [1.5, 0.3, 3.0, 1.2]
EXAMPLE_AND_W = [1.0, 2.0]


def example_signal() -> Signal:
    return Signal(
        [Channel("s1"), Channel("s2")],
        [[1.0, -1.0, -2.0, -2.0], [1.0, 1.0, 1.0, 2.0]],
    )


def example_formula():
    return parse("F(-s1 >= 0 & s2 >= 0)")


def example_valuation(phi=None) -> WeightValuation:
    phi = phi if phi is not None else example_formula()
    slots = parameter_slots(phi, horizon=3)
    return WeightValuation(
        dict(zip((s.id for s in slots), EXAMPLE_DIAMOND_W + EXAMPLE_AND_W))
    )


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def random_signal(
    rng: np.random.Generator,
    length: int | None = None,
    with_boolean: bool = True,
) -> Signal:
    n = int(rng.integers(3, 11)) if length is None else length
    channels = [Channel("a"), Channel("b")]
    rows = [rng.normal(0.0, 2.0, n), rng.normal(0.0, 2.0, n)]
    if with_boolean and rng.random() < 0.4:
        channels.append(Channel("p", "boolean"))
        rows.append(np.where(rng.random(n) < 0.5, np.inf, -np.inf))
    return Signal(channels, np.vstack(rows))


def random_formula(rng: np.random.Generator, sig: Signal, max_depth: int = 4):
    """Random syntax tree whose intervals fit the signal (checked by rho)."""
    real = [c.name for c in sig.channels if c.kind == "real"]
    bools = [c.name for c in sig.channels if c.kind == "boolean"]
    tf = sig.t_final

    def interval() -> Interval:
        if rng.random() < 0.2:
            return Interval(int(rng.integers(0, 2)), None)
        a = int(rng.integers(0, min(3, tf + 1)))
        b = a + int(rng.integers(0, min(4, tf - a + 1)))
        return Interval(a, b)

    def pred():
        if bools and rng.random() < 0.2:
            name = bools[int(rng.integers(len(bools)))]
            return Pred(PredicateFn.of({name: 1.0}))
        picks = rng.random(len(real)) < 0.7
        if not picks.any():
            picks[int(rng.integers(len(real)))] = True
        coeffs = {
            ch: float(np.round(rng.normal(0, 1), 3)) or 1.0
            for ch, on in zip(real, picks)
            if on
        }
        return Pred(PredicateFn.of(coeffs, offset=float(np.round(rng.normal(0, 1), 3))))

    def go(depth: int):
        if depth <= 0 or rng.random() < 0.25:
            return TrueNode() if rng.random() < 0.05 else pred()
        kind = rng.integers(6)
        if kind == 0:
            return Not(go(depth - 1))
        if kind == 1:
            return And(go(depth - 1), go(depth - 1))
        if kind == 2:
            return Or(go(depth - 1), go(depth - 1))
        if kind == 3:
            return Until(go(depth - 1), go(depth - 1), interval())
        if kind == 4:
            return Always(go(depth - 1), interval())
        return Eventually(go(depth - 1), interval())

    return go(max_depth)


def random_instance(
    rng: np.random.Generator,
    max_depth: int = 4,
    need_weights: bool = False,
    with_boolean: bool = True,
):
    """(signal, formula) whose robustness is defined at t=0."""
    while True:
        sig = random_signal(rng, with_boolean=with_boolean)
        phi = random_formula(rng, sig, max_depth)
        if need_weights:
            try:
                root_weight_slots(phi, sig.t_final)
            except ValueError:
                continue
        try:
            rho(sig, phi, 0)
        except TruncationError:
            continue
        return sig, phi


def random_valuation(
    rng: np.random.Generator, phi, horizon: int, high: float = 1.0
) -> WeightValuation:
    slots = parameter_slots(phi, horizon)
    vec = high * (1.0 - rng.random(len(slots)))
    return WeightValuation.from_vector(phi, vec, horizon)
