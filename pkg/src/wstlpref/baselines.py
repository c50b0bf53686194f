"""Feature-based baseline, evaluation protocol, and the safety experiment.

The learned baseline is a Bradley-Terry model over a 6-dimensional
feature vector: five frequency-bin means of the signal's magnitude
spectrum plus the traditional robustness of the scenario rule.  Features
are standardized on the training set (stored in the model) since the
robustness feature otherwise dominates the spectrum bins.

Evaluation follows the repeated-split protocol: ten random 70/30
train/test splits, accuracy = fraction of pairs whose preferred signal
the model picks.  The safety experiment pairs rule-satisfying with
rule-violating signals and reports how often a model prefers the
satisfying one; weighted-robustness predictors score 1.0 by
construction, feature baselines need not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.special import expit

from .formula import Formula, WeightValuation
from .learn import PreferenceDataset, _pair_diffs
from .semantics import rho, wstl_robustness
from .signals import Signal

N_BINS = 5


# ---------------------------------------------------------------------------
# Features
# ---------------------------------------------------------------------------


def _dft_magnitudes(row: np.ndarray) -> np.ndarray:
    """|DFT| at frequencies 0..floor(n/2), direct evaluation, scaled by 1/n."""
    n = row.shape[0]
    k = np.arange(n // 2 + 1)
    angles = -2j * np.pi * np.outer(k, np.arange(n)) / n
    return np.abs(np.exp(angles) @ row) / n


def feature_vector(
    sig: Signal, phi_stl: Formula, inf_sentinel: float = 1e6
) -> np.ndarray:
    """Five spectrum-bin means (averaged over real channels) plus the
    traditional robustness at t=0, clamped to +/-inf_sentinel."""
    rows = [
        sig.channel(c.name) for c in sig.channels if c.kind == "real"
    ]
    if not rows:
        raise ValueError("feature extraction needs at least one real channel")
    mags = np.mean([_dft_magnitudes(r) for r in rows], axis=0)
    bins = [
        float(chunk.mean()) if chunk.size else 0.0
        for chunk in np.array_split(mags, N_BINS)
    ]
    r = float(np.clip(rho(sig, phi_stl, 0), -inf_sentinel, inf_sentinel))
    return np.array(bins + [r])


# ---------------------------------------------------------------------------
# Bradley-Terry model
# ---------------------------------------------------------------------------


@dataclass
class BTModel:
    """Linear preference scores: P(s1 over s2) = sigmoid(<v, f1 - f2>)."""

    v: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    phi_stl: Formula

    def features(self, sig: Signal) -> np.ndarray:
        return (feature_vector(sig, self.phi_stl) - self.mean) / self.std

    def score(self, sig: Signal) -> float:
        return float(self.v @ self.features(sig))


def bt_fit(
    dataset: PreferenceDataset,
    phi_stl: Formula,
    lr: float = 0.1,
    rng: np.random.Generator | int | None = None,
    epochs: int = 200,
) -> BTModel:
    """Maximum-likelihood fit by stochastic gradient descent from v = 0."""
    if not dataset.pairs:
        raise ValueError("cannot fit on an empty preference dataset")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    feats = {sid: feature_vector(dataset.signals[sid], phi_stl)
             for sid in dataset.signal_ids()}
    table = np.stack(list(feats.values()))
    mean = table.mean(axis=0)
    std = table.std(axis=0)
    std[std == 0.0] = 1.0
    norm = {sid: (f - mean) / std for sid, f in feats.items()}
    diffs = np.stack([norm[a] - norm[b] for a, b in dataset.pairs])
    v = np.zeros(diffs.shape[1])
    for _ in range(epochs):
        for i in rng.permutation(len(diffs)):
            p = expit(v @ diffs[i])
            v += lr * (1.0 - p) * diffs[i]
    return BTModel(v=v, mean=mean, std=std, phi_stl=phi_stl)


def bt_nll(model: BTModel, dataset: PreferenceDataset) -> float:
    """Negative log-likelihood of the recorded preferences under the model."""
    total = 0.0
    for a, b in dataset.pairs:
        u = model.score(dataset.signals[a]) - model.score(dataset.signals[b])
        total -= float(np.log(expit(u)))
    return total


def bt_predict(model: BTModel, s1: Signal, s2: Signal) -> str:
    """'first' iff the first signal scores strictly higher; ties go 'second'."""
    return "first" if model.score(s1) > model.score(s2) else "second"


# ---------------------------------------------------------------------------
# Split protocol and accuracy metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Split:
    train: tuple[int, ...]
    test: tuple[int, ...]
    seed: int


def make_splits(
    n_pairs: int,
    n_splits: int = 10,
    ratio: float = 0.7,
    rng: np.random.Generator | int | None = None,
    seed: int = 0,
) -> list[Split]:
    """Independent shuffled train/test index splits (|train| = round(ratio*n))."""
    if n_pairs < 2:
        raise ValueError("need at least two pairs to split")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(
        seed if rng is None else rng
    )
    n_train = round(ratio * n_pairs)
    out = []
    for k in range(n_splits):
        order = rng.permutation(n_pairs)
        out.append(Split(tuple(order[:n_train]), tuple(order[n_train:]), seed + k))
    return out


Predictor = Callable[[Signal, Signal], str]


def wstl_predictor(phi: Formula, w: WeightValuation,
                   horizon: int | None = None) -> Predictor:
    def pick(s1: Signal, s2: Signal) -> str:
        r1 = wstl_robustness(s1, phi, w, 0, horizon)
        r2 = wstl_robustness(s2, phi, w, 0, horizon)
        if r1 == r2:
            return "tie"
        d = float(_pair_diffs(np.array([r1]), np.array([r2]))[0])
        return "first" if d > 0 else "second"

    return pick


def accuracy(predictor: Predictor, dataset: PreferenceDataset) -> float:
    """Fraction of pairs on which the predictor returns the preferred signal."""
    if not dataset.pairs:
        raise ValueError("accuracy of an empty pair set is undefined")
    hits = sum(
        1
        for a, b in dataset.pairs
        if predictor(dataset.signals[a], dataset.signals[b]) == "first"
    )
    return hits / len(dataset.pairs)


def safety_eval(
    predictor: Predictor,
    satisfying: Sequence[Signal],
    violating: Sequence[Signal],
    n_pairs: int = 100,
    rng: np.random.Generator | int | None = None,
) -> float:
    """Fraction of random (satisfying, violating) pairs where the predictor
    prefers the satisfying signal."""
    if not satisfying or not violating:
        raise ValueError("both signal sets must be nonempty")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    hits = 0
    for _ in range(n_pairs):
        s = satisfying[int(rng.integers(len(satisfying)))]
        v = violating[int(rng.integers(len(violating)))]
        if predictor(s, v) == "first":
            hits += 1
    return hits / n_pairs


# ---------------------------------------------------------------------------
# Synthetic preference labeling (experiment harness)
# ---------------------------------------------------------------------------


def preferences_from_valuation(
    signals: Mapping[str, Signal],
    pairs: Sequence[tuple[str, str]],
    phi: Formula,
    w: WeightValuation,
    horizon: int | None = None,
    min_margin_fraction: float = 0.0,
) -> PreferenceDataset:
    """Order each pair by weighted robustness under a hidden valuation.

    With `min_margin_fraction` > 0, pairs whose margin does not exceed
    that fraction of the robustness spread over all listed signals are
    dropped (ties are always dropped).
    """
    involved = {sid for ab in pairs for sid in ab}
    rvals = {
        sid: wstl_robustness(signals[sid], phi, w, 0, horizon) for sid in involved
    }
    finite = [r for r in rvals.values() if np.isfinite(r)]
    spread = (max(finite) - min(finite)) if finite else 0.0
    ordered = []
    for a, b in pairs:
        d = float(_pair_diffs(np.array([rvals[a]]), np.array([rvals[b]]))[0])
        if abs(d) <= min_margin_fraction * spread or d == 0.0:
            continue
        ordered.append((a, b) if d > 0 else (b, a))
    return PreferenceDataset(tuple(ordered), signals)
