"""Driving-scenario formulas, trajectory generators, and preference pairs.

Two scenarios are built in:

Stop sign
    The vehicle must come to a full stop before the stop line and hold
    it.  `x` is the remaining distance along the approach (decreasing),
    so `x - x_stop >= 0` reads "still at or before the line".  Full stop
    is an equality (v = 0), which would pin every compliant trajectory's
    robustness at zero, so the rule is monitored through boolean
    indicator channels: `b` is true where |v| <= eq_tol and `vpos` is
    true where v >= 0.  Satisfying runs then score by *where and when*
    they stop, while any run that never stops scores -inf.

Pedestrian crossing
    The vehicle approaches a crosswalk at `x_cross` (here `x` is the
    forward position, increasing) while a pedestrian may be present
    (boolean channel `p`).  Whenever the pedestrian is on the crossing
    and the vehicle has not passed it, the vehicle must stay behind
    until the pedestrian leaves and respect the speed limit.

Generators produce piecewise constant-acceleration profiles (cruise,
brake, hold, optional resume) and are deterministic given their
parameters; datasets are rejection-sampled until the requested hard
satisfaction sign holds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .formula import Formula
from .parser import parse
from .semantics import rho
from .signals import (
    Channel,
    PredicateFn,
    Signal,
    append_indicator_channel,
    boolean_channel,
    euclidean_distance,
)

FORMAT_PAIRS = "wstlpref-pairs"
FORMAT_PREFS = "wstlpref-preferences"
FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Stop-sign scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StopSignSpec:
    """Geometry and sampling ranges for the stop-sign scenario."""

    x_stop: float = 1.0
    x0: float = 45.0
    n_steps: int = 60
    dt: float = 0.1
    v0_range: tuple[float, float] = (8.0, 14.0)
    decel_range: tuple[float, float] = (2.0, 6.0)
    slack_range: tuple[float, float] = (0.2, 3.0)
    eq_tol: float = 1e-9

    def __post_init__(self):
        if self.x_stop <= 0:
            raise ValueError("x_stop must be positive")
        for name in ("v0_range", "decel_range", "slack_range"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"{name} is empty")

    @property
    def horizon(self) -> int:
        return self.n_steps - 1

    def formula_text(self) -> str:
        return f"(F G ((x - {self.x_stop} >= 0) & b)) & (G vpos)"


def stop_sign_formula(spec: StopSignSpec) -> Formula:
    """Stop-sign rule over indicator channels, all weights learnable."""
    return parse(spec.formula_text())


@dataclass(frozen=True)
class StopParams:
    """One stop-sign trajectory: cruise at v0, brake at `decel` toward a
    stop `stop_offset` short of the line (negative = past it), bottoming
    out at `v_min` (0 = full stop); optionally resume after `resume_step`."""

    v0: float
    decel: float
    stop_offset: float
    v_min: float = 0.0
    resume_step: Optional[int] = None


def _stop_profile(spec: StopSignSpec, p: StopParams) -> tuple[np.ndarray, np.ndarray]:
    n = spec.n_steps
    x = np.empty(n)
    v = np.empty(n)
    x[0], v[0] = spec.x0, p.v0
    target = spec.x_stop + p.stop_offset
    braking = False
    stopped_at: Optional[int] = None
    for k in range(n - 1):
        if not braking:
            brake_dist = (v[k] ** 2 - p.v_min**2) / (2 * p.decel)
            # anticipate the distance covered before the next update
            if x[k] - v[k] * spec.dt - target <= brake_dist:
                braking = True
        x[k + 1] = x[k] - v[k] * spec.dt
        if braking:
            v[k + 1] = max(p.v_min, v[k] - p.decel * spec.dt)
        else:
            v[k + 1] = v[k]
        if stopped_at is None and v[k + 1] <= p.v_min:
            stopped_at = k + 1
        if (
            p.resume_step is not None
            and stopped_at is not None
            and k + 1 >= stopped_at + p.resume_step
        ):
            v[k + 1] = min(p.v0, v[k] + p.decel * spec.dt)
    return x, v


def stop_trajectory(spec: StopSignSpec, params: StopParams) -> Signal:
    """Kinematic stop-sign run with channels x, v, b, vpos."""
    x, v = _stop_profile(spec, params)
    sig = Signal([Channel("x"), Channel("v")], np.vstack([x, v]), dt=spec.dt)
    sig = append_indicator_channel(
        sig, PredicateFn.of({"v": 1.0}, name="v"), "b", eq_tol=spec.eq_tol
    )
    return sig.with_channel(Channel("vpos", "boolean"), boolean_channel(v >= 0.0))


def _draw_stop_params(
    spec: StopSignSpec, satisfying: bool, rng: np.random.Generator
) -> StopParams:
    v0 = rng.uniform(*spec.v0_range)
    decel = rng.uniform(*spec.decel_range)
    if satisfying:
        return StopParams(v0, decel, stop_offset=rng.uniform(*spec.slack_range))
    if rng.random() < 0.5:
        # rolling stop: slows down but never reaches zero speed
        return StopParams(
            v0, decel, stop_offset=rng.uniform(*spec.slack_range),
            v_min=rng.uniform(0.3, 2.0),
        )
    # overshoot: full stop past the line
    lo, hi = spec.slack_range
    return StopParams(v0, decel, stop_offset=-rng.uniform(lo, hi + 2.0))


# ---------------------------------------------------------------------------
# Pedestrian-crossing scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PedestrianSpec:
    """Geometry, speed limit, and pedestrian schedule ranges."""

    x_cross: float = 35.0
    v_lim: float = 8.0
    x0: float = 0.0
    n_steps: int = 60
    dt: float = 0.1
    v0_range: tuple[float, float] = (4.0, 7.5)
    decel_range: tuple[float, float] = (2.0, 6.0)
    entry_range: tuple[int, int] = (0, 15)
    duration_range: tuple[int, int] = (10, 30)

    def __post_init__(self):
        if self.v_lim <= 0:
            raise ValueError("v_lim must be positive")
        if not 0 <= self.entry_range[0] <= self.entry_range[1] <= self.n_steps:
            raise ValueError("entry_range outside the trace")
        if self.duration_range[0] > self.duration_range[1]:
            raise ValueError("duration_range is empty")

    @property
    def horizon(self) -> int:
        return self.n_steps - 1

    def formula_text(self) -> str:
        pre = f"x - {self.x_cross} <= 0"
        return f"G ((p & ({pre})) => ((({pre}) U !p) & (v - {self.v_lim} <= 0)))"


def pedestrian_formula(spec: PedestrianSpec) -> Formula:
    """Crosswalk rule; `=>` desugars so the disjunction owns the weights."""
    return parse(spec.formula_text())


@dataclass(frozen=True)
class PedestrianParams:
    """One crosswalk approach: cruise at v0; if `yield_margin` is set,
    brake to a stop that far before the crossing while the pedestrian
    (present during [t_in, t_out)) is on it, resuming once clear."""

    v0: float
    decel: float
    t_in: int
    t_out: int
    yield_margin: Optional[float] = 3.0


def _pedestrian_profile(
    spec: PedestrianSpec, p: PedestrianParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = spec.n_steps
    x = np.empty(n)
    v = np.empty(n)
    x[0], v[0] = spec.x0, p.v0
    for k in range(n - 1):
        pedestrian_on = p.t_in <= k < p.t_out
        v_next = v[k]
        if p.yield_margin is not None and pedestrian_on and x[k] < spec.x_cross:
            stop_at = spec.x_cross - p.yield_margin
            brake_dist = v[k] ** 2 / (2 * p.decel)
            if x[k] + brake_dist >= stop_at:
                v_next = max(0.0, v[k] - p.decel * spec.dt)
        elif v[k] < p.v0:
            v_next = min(p.v0, v[k] + p.decel * spec.dt)
        x[k + 1] = x[k] + v[k] * spec.dt
        v[k + 1] = v_next
    present = (np.arange(n) >= p.t_in) & (np.arange(n) < p.t_out)
    return x, v, present


def pedestrian_trajectory(spec: PedestrianSpec, params: PedestrianParams) -> Signal:
    """Kinematic crosswalk run with channels x, v and boolean p."""
    x, v, present = _pedestrian_profile(spec, params)
    sig = Signal([Channel("x"), Channel("v")], np.vstack([x, v]), dt=spec.dt)
    return sig.with_channel(Channel("p", "boolean"), boolean_channel(present))


def _draw_pedestrian_params(
    spec: PedestrianSpec, satisfying: bool, rng: np.random.Generator
) -> PedestrianParams:
    decel = rng.uniform(*spec.decel_range)
    t_in = int(rng.integers(spec.entry_range[0], spec.entry_range[1] + 1))
    duration = int(rng.integers(spec.duration_range[0], spec.duration_range[1] + 1))
    t_out = min(t_in + duration, spec.n_steps - 5)
    if satisfying:
        v0 = rng.uniform(spec.v0_range[0], min(spec.v0_range[1], spec.v_lim * 0.95))
        return PedestrianParams(v0, decel, t_in, t_out,
                                yield_margin=rng.uniform(1.0, 6.0))
    if rng.random() < 0.5:
        # barrels through the crossing while the pedestrian is on it
        v0 = rng.uniform(spec.v_lim * 0.8, spec.v_lim * 0.95)
        return PedestrianParams(v0, decel, t_in, t_out, yield_margin=None)
    # yields but speeds while the pedestrian is present
    v0 = rng.uniform(spec.v_lim * 1.05, spec.v_lim * 1.6)
    return PedestrianParams(v0, decel, t_in, t_out,
                            yield_margin=rng.uniform(1.0, 6.0))


# ---------------------------------------------------------------------------
# Dataset generation and pair construction
# ---------------------------------------------------------------------------

Spec = StopSignSpec | PedestrianSpec

MAX_DRAWS = 100_000


def generate_trajectory(spec: Spec, params) -> Signal:
    if isinstance(spec, StopSignSpec):
        return stop_trajectory(spec, params)
    return pedestrian_trajectory(spec, params)


def scenario_formula(spec: Spec) -> Formula:
    if isinstance(spec, StopSignSpec):
        return stop_sign_formula(spec)
    return pedestrian_formula(spec)


def generate_dataset(
    spec: Spec,
    n: int,
    satisfying: bool,
    rng: np.random.Generator | int | None = None,
) -> tuple[list[Signal], float]:
    """Rejection-sample `n` trajectories of the requested satisfaction sign.

    Every accepted signal is re-checked by the traditional-robustness
    oracle: strictly positive for satisfying data, strictly negative
    (often -inf) for violating data.  Returns the signals and the
    acceptance rate; raises if the spec ranges make acceptance < 1%
    within 100k draws.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    phi = scenario_formula(spec)
    draw = _draw_stop_params if isinstance(spec, StopSignSpec) else _draw_pedestrian_params
    out: list[Signal] = []
    draws = 0
    while len(out) < n:
        if draws >= MAX_DRAWS:
            raise RuntimeError(
                f"acceptance rate {len(out) / draws:.2%} after {draws} draws; "
                "scenario spec and sampling ranges are inconsistent"
            )
        draws += 1
        sig = generate_trajectory(spec, draw(spec, satisfying, rng))
        r = rho(sig, phi, 0)
        if (satisfying and r > 0) or (not satisfying and r < 0):
            out.append(sig)
    return out, len(out) / draws


@dataclass(frozen=True)
class PairSet:
    """Unordered candidate pairs with their separation distances."""

    pairs: tuple[tuple[str, str, float], ...]
    threshold: float
    channels: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.pairs)

    def ids(self) -> list[tuple[str, str]]:
        return [(a, b) for a, b, _ in self.pairs]


def build_pairs(
    signals: Mapping[str, Signal],
    n_pairs: int,
    threshold: float,
    channels: Sequence[str],
    rng: np.random.Generator | int | None = None,
) -> PairSet:
    """Random distinct unordered pairs whose distance strictly exceeds
    `threshold` over the listed channels."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    names = list(signals)
    candidates = [
        (names[i], names[j], euclidean_distance(signals[names[i]], signals[names[j]], channels))
        for i in range(len(names))
        for j in range(i + 1, len(names))
    ]
    eligible = [c for c in candidates if c[2] > threshold]
    if len(eligible) < n_pairs:
        raise ValueError(
            f"only {len(eligible)} of {len(candidates)} candidate pairs exceed "
            f"distance {threshold}; cannot form {n_pairs} pairs"
        )
    chosen = rng.choice(len(eligible), size=n_pairs, replace=False)
    return PairSet(
        pairs=tuple(eligible[int(i)] for i in chosen),
        threshold=float(threshold),
        channels=tuple(channels),
    )


# ---------------------------------------------------------------------------
# Pair-set and preference-file persistence
# ---------------------------------------------------------------------------


def save_pairs(path, pairs: PairSet, signals_file: str | None = None) -> None:
    doc = {
        "format": FORMAT_PAIRS,
        "version": FORMAT_VERSION,
        "threshold": pairs.threshold,
        "channels": list(pairs.channels),
        "pairs": [{"a": a, "b": b, "distance": d} for a, b, d in pairs.pairs],
        "meta": dict(pairs.meta),
    }
    if signals_file is not None:
        doc["signals_file"] = signals_file
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def load_pairs(path) -> tuple[PairSet, str | None]:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != FORMAT_PAIRS:
        raise ValueError(f"{path}: not a pair-set file")
    pairs = PairSet(
        pairs=tuple((p["a"], p["b"], float(p["distance"])) for p in doc["pairs"]),
        threshold=float(doc["threshold"]),
        channels=tuple(doc["channels"]),
        meta=doc.get("meta", {}),
    )
    return pairs, doc.get("signals_file")


def save_preferences(path, ordered_pairs: Sequence[tuple[str, str]],
                     signals_file: str | None = None, meta: dict | None = None) -> None:
    """Write elicited preferences: each entry is (preferred, non_preferred)."""
    doc = {
        "format": FORMAT_PREFS,
        "version": FORMAT_VERSION,
        "pairs": [{"preferred": a, "non_preferred": b} for a, b in ordered_pairs],
    }
    if signals_file is not None:
        doc["signals_file"] = signals_file
    if meta:
        doc["meta"] = meta
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def load_preferences(path) -> tuple[list[tuple[str, str]], str | None]:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != FORMAT_PREFS:
        raise ValueError(f"{path}: not a preference file")
    pairs = [(p["preferred"], p["non_preferred"]) for p in doc["pairs"]]
    return pairs, doc.get("signals_file")
