"""Signals, formulas, and hard robustness.

Walks through the basic objects: a two-channel signal, a temporal-logic
formula parsed from text, and the traditional (unweighted) robustness
value that measures how strongly the signal satisfies the formula.
"""

import numpy as np

from wstlpref import Channel, Signal, debug_report, parse, rho

# A signal is a fixed-length multi-channel time series.  Channel s1 dips
# negative from t=1 on; channel s2 stays positive and ends at 2.
s = Signal([Channel("s1"), Channel("s2")], [[1, -1, -2, -2], [1, 1, 1, 2]])
print("signal length:", s.t_final + 1)
print("s1:", s.channel("s1"))
print("s2:", s.channel("s2"))

# "eventually (-s1 >= 0 and s2 >= 0)": at some step, s1 is non-positive
# while s2 is non-negative.  An omitted interval means "any time".
phi = parse("F(-s1 >= 0 & s2 >= 0)")

# Robustness is recursive: predicates score by their margin, `&` takes a
# min, `F` takes a max over time.  Positive robustness implies the
# formula holds; the magnitude says by how much.
print("\nrobustness at t=0:", rho(s, phi, 0))
for t in range(4):
    print(f"  inner conjunction at t={t}:", rho(s, parse("-s1 >= 0 & s2 >= 0"), t))

# The per-node report shows every subformula's value at every time step.
print("\nfull evaluation graph:")
print(debug_report(s, phi))

# Boolean facts ride along as +/-inf channels, so a single min/max
# arithmetic covers both numeric margins and hard true/false conditions.
flags = Signal(
    [Channel("x"), Channel("ok", "boolean")],
    [[3.0, 2.0, 0.5], np.where([True, True, False], np.inf, -np.inf)],
)
print("always ok:", rho(flags, parse("G ok"), 0))
print("ok until x small:", rho(flags, parse("ok U (1 - x >= 0)"), 0))
