"""Learning weight valuations from pairwise preferences.

Two solvers target the same objective, the number of preference pairs
whose preferred signal gets the strictly larger weighted robustness:

* `random_sampling_solve` draws candidate valuations uniformly from the
  bounded domain D = (0, 1]^n, which contains a feasible valuation
  whenever one exists, and keeps the best candidate.
* `gradient_solve` descends a differentiable surrogate of the objective
  (a steep logistic on robustness margins plus a norm-drift penalty)
  with adaptive-moment steps, restarted from the all-ones valuation and
  from random points in D.

Since all weights stay strictly positive, any returned valuation ranks
every rule-violating signal below every rule-satisfying one; learning
can reorder preferences only among satisfying signals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import expit

from .formula import (
    Always,
    And,
    Eventually,
    Formula,
    Not,
    Or,
    Pred,
    TrueNode,
    Until,
    WeightValuation,
    has_unbounded,
    node_slots,
    parameter_slots,
)
from .semantics import (
    SoftConfig,
    soft_value_and_grad,
    soft_wstl_robustness,
    wstl_robustness,
    wstl_robustness_batch,
)
from .signals import Signal

FORMAT_RESULT = "wstlpref-result"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class PreferenceDataset:
    """Ordered pairs (preferred id, non-preferred id) over a signal store."""

    pairs: tuple[tuple[str, str], ...]
    signals: Mapping[str, Signal]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((a, b) for a, b in self.pairs))
        for a, b in self.pairs:
            if a == b:
                raise ValueError(f"pair compares signal {a!r} with itself")
            for sid in (a, b):
                if sid not in self.signals:
                    raise ValueError(f"pair references unknown signal {sid!r}")

    def __len__(self) -> int:
        return len(self.pairs)

    def subset(self, indices: Sequence[int]) -> "PreferenceDataset":
        return PreferenceDataset(tuple(self.pairs[i] for i in indices), self.signals)

    def signal_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for a, b in self.pairs:
            seen.setdefault(a)
            seen.setdefault(b)
        return list(seen)

    def horizon(self, phi: Formula) -> int | None:
        """Common trace horizon, required when `phi` has unbounded windows."""
        if not has_unbounded(phi):
            return None
        lengths = {self.signals[sid].t_final for sid in self.signal_ids()}
        if len(lengths) > 1:
            raise ValueError(
                "signals must share one length when the formula has unbounded windows"
            )
        return lengths.pop() if lengths else None


@dataclass(frozen=True)
class LearnConfig:
    n_samples: int = 1000
    margin_fraction: float = 0.05
    M: float = 1e3
    epsilon: float = 0.01
    theta: float = 0.01
    beta: float = 1e10
    learning_rate: float = 1e-5
    batch_size: int = 5
    loss_tol: float = 1e-6
    restarts: int = 11
    max_iters: int = 5000
    seed: int = 0
    w_floor: float = 1e-6
    inf_sentinel: float = 1e6

    def __post_init__(self):
        positive = (
            "n_samples M epsilon theta beta learning_rate batch_size "
            "loss_tol restarts w_floor inf_sentinel"
        ).split()
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.margin_fraction < 1:
            raise ValueError("margin_fraction must lie in [0, 1)")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")

    def soft(self) -> SoftConfig:
        return SoftConfig(beta=self.beta, inf_sentinel=self.inf_sentinel)


@dataclass(frozen=True)
class LearnResult:
    valuation: WeightValuation
    satisfied_pairs: int
    margin_satisfied_pairs: int
    mean_margin: float
    solver: str
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Robustness bookkeeping shared by both solvers
# ---------------------------------------------------------------------------


def _pair_diffs(rplus: np.ndarray, rminus: np.ndarray) -> np.ndarray:
    """r+ - r- with equal infinities treated as a zero margin."""
    with np.errstate(invalid="ignore"):
        d = rplus - rminus
    return np.where(np.isnan(d), 0.0, d)


def _robustness_matrix(
    dataset: PreferenceDataset, phi: Formula, params: np.ndarray, horizon: int | None
) -> tuple[dict[str, np.ndarray], np.ndarray, np.ndarray]:
    """Per-signal robustness rows plus the (pairs x batch) r+ / r- matrices."""
    rvals = {
        sid: wstl_robustness_batch(dataset.signals[sid], phi, params, 0, horizon)
        for sid in dataset.signal_ids()
    }
    rplus = np.stack([rvals[a] for a, _ in dataset.pairs])
    rminus = np.stack([rvals[b] for _, b in dataset.pairs])
    return rvals, rplus, rminus


def _margin_stats(
    rvals: Mapping[str, np.ndarray], rplus: np.ndarray, rminus: np.ndarray, frac: float
):
    """satisfied / margin-satisfied counts and mean margin, per batch column."""
    sat = (rplus > rminus).sum(axis=0)
    diffs = _pair_diffs(rplus, rminus)
    allr = np.stack(list(rvals.values()))
    finite = np.isfinite(allr)
    hi = np.where(finite, allr, -np.inf).max(axis=0)
    lo = np.where(finite, allr, np.inf).min(axis=0)
    spread = np.where(hi >= lo, hi - lo, 0.0)
    margin_sat = (diffs > frac * spread).sum(axis=0)
    mean_margin = np.clip(diffs, -1e12, 1e12).mean(axis=0)
    return sat, margin_sat, mean_margin


def count_satisfied(
    dataset: PreferenceDataset, phi: Formula, w: WeightValuation
) -> int:
    """Pairs whose preferred signal has strictly larger weighted robustness."""
    if not dataset.pairs:
        return 0
    horizon = dataset.horizon(phi)
    params = _params_from(phi, w, horizon)
    _, rplus, rminus = _robustness_matrix(dataset, phi, params, horizon)
    return int((rplus[:, 0] > rminus[:, 0]).sum())


def _params_from(phi: Formula, w: WeightValuation, horizon: int | None) -> np.ndarray:
    slots = parameter_slots(phi, horizon)
    missing = [s.id for s in slots if s.id not in w.values]
    if missing:
        raise ValueError(f"valuation missing weight slots: {missing[:5]}")
    return np.array([w.values[s.id] for s in slots]).reshape(len(slots), 1)


def predict(
    phi: Formula,
    w: WeightValuation,
    s1: Signal,
    s2: Signal,
    margin: float = 0.0,
    horizon: int | None = None,
) -> str:
    """'first', 'second', or 'tie' by hard weighted robustness at t=0."""
    r1 = wstl_robustness(s1, phi, w, 0, horizon)
    r2 = wstl_robustness(s2, phi, w, 0, horizon)
    if r1 == r2:
        return "tie"
    diff = float(_pair_diffs(np.array([r1]), np.array([r2]))[0])
    if abs(diff) <= margin:
        return "tie"
    return "first" if diff > 0 else "second"


# ---------------------------------------------------------------------------
# Theorem-2 normalization into D = (0, 1]^n
# ---------------------------------------------------------------------------


def normalize_to_domain(
    phi: Formula, w: WeightValuation, horizon: int | None = None
) -> WeightValuation:
    """Rescale a valuation into D = (0,1]^n preserving all robustness orderings.

    Bottom-up, each weighted operator's block is divided by its maximum
    and the parent weights that multiply that subformula's robustness
    absorb the factor; the final division of the root block is covered
    by root-level homogeneity.  Every weighted node ends with max entry
    exactly 1, and the robustness of every signal is scaled by one
    common positive constant, so comparisons are unchanged.

    Only fully parametric formulas can be normalized: a pinned constant
    cannot absorb its children's scale factors.
    """
    values = dict(w.values)

    def visit(node: Formula, path: str) -> float:
        sub = path if path.endswith("/") else path + "/"
        match node:
            case TrueNode() | Pred(_):
                return 1.0
            case Not(child):
                return visit(child, sub + "0")
            case And(l, r, pinned) | Or(l, r, pinned):
                ml = visit(l, sub + "0")
                mr = visit(r, sub + "1")
                return scale_block(node, path, pinned, [ml, mr])
            case Always(child, _, pinned) | Eventually(child, _, pinned):
                mc = visit(child, sub + "0")
                return scale_block(node, path, pinned, None, mc)
            case Until(l, r, _, pinned):
                ml = visit(l, sub + "0")
                mr = visit(r, sub + "1")
                # w1 entries multiply the right operand, w2 the left one
                return scale_block(node, path, pinned, None, None, (mr, ml))

    def scale_block(node, path, pinned, per_entry, uniform=None, halves=None) -> float:
        if pinned is not None:
            raise ValueError(
                "normalization requires a fully parametric formula "
                f"(pinned weights at {path})"
            )
        slots = node_slots(path, node, horizon)
        ids = [s.id for s in slots]
        missing = [i for i in ids if i not in values]
        if missing:
            raise ValueError(f"valuation missing weight slots: {missing[:5]}")
        if per_entry is not None:
            for sid, m in zip(ids, per_entry):
                values[sid] *= m
        elif halves is not None:
            half = len(ids) // 2
            m1, m2 = halves
            for sid in ids[:half]:
                values[sid] *= m1
            for sid in ids[half:]:
                values[sid] *= m2
        else:
            for sid in ids:
                values[sid] *= uniform
        peak = max(values[sid] for sid in ids)
        for sid in ids:
            values[sid] /= peak
        return peak

    visit(phi, "/")
    return WeightValuation(values)


# ---------------------------------------------------------------------------
# Random-sampling solver
# ---------------------------------------------------------------------------


def _uniform_domain(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniform draw from (0, 1]^shape."""
    return 1.0 - rng.random(shape)


def random_sampling_solve(
    dataset: PreferenceDataset,
    phi: Formula,
    cfg: LearnConfig | None = None,
    rng: np.random.Generator | int | None = None,
) -> LearnResult:
    """Best of `cfg.n_samples` valuations drawn uniformly from D.

    Candidates are ranked lexicographically: satisfied pairs, then pairs
    whose margin beats `margin_fraction` of the robustness spread over
    all training signals, then mean margin.  Ties keep the earlier draw.
    """
    cfg = cfg or LearnConfig()
    if not dataset.pairs:
        raise ValueError("cannot learn from an empty preference dataset")
    horizon = dataset.horizon(phi)
    slots = parameter_slots(phi, horizon)
    if not slots:
        raise ValueError("formula has no learnable weight slots")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(
        cfg.seed if rng is None else rng
    )
    params = _uniform_domain(rng, (len(slots), cfg.n_samples))
    rvals, rplus, rminus = _robustness_matrix(dataset, phi, params, horizon)
    sat, margin_sat, mean_margin = _margin_stats(
        rvals, rplus, rminus, cfg.margin_fraction
    )
    best = max(
        range(cfg.n_samples),
        key=lambda i: (sat[i], margin_sat[i], mean_margin[i], -i),
    )
    valuation = WeightValuation.from_vector(phi, params[:, best], horizon)
    return LearnResult(
        valuation=valuation,
        satisfied_pairs=int(sat[best]),
        margin_satisfied_pairs=int(margin_sat[best]),
        mean_margin=float(mean_margin[best]),
        solver="random_sampling",
        diagnostics={
            "n_samples": cfg.n_samples,
            "n_pairs": len(dataset),
            "sample_index": int(best),
        },
    )


# ---------------------------------------------------------------------------
# Gradient solver
# ---------------------------------------------------------------------------


def surrogate_loss(
    pairs: Sequence[tuple[Signal, Signal]],
    phi: Formula,
    w: WeightValuation,
    cfg: LearnConfig,
    w_init: WeightValuation | None = None,
    horizon: int | None = None,
) -> float:
    """Logistic margin penalty plus norm-drift regularizer.

    The first term per pair is 1 / (1 + exp(M * (r+ - r- - epsilon)))
    with r the smoothed robustness at `cfg.beta`; the second is
    log(1 + theta * exp(|w|^2 - |w_init|^2)), added once.
    """
    loss, _ = _surrogate_value_grad(pairs, phi, w, cfg, w_init, horizon, want_grad=False)
    return loss


def _surrogate_value_grad(
    pairs, phi, w, cfg, w_init, horizon, want_grad: bool
) -> tuple[float, np.ndarray | None]:
    soft_cfg = cfg.soft()
    slots = parameter_slots(phi, horizon)
    ids = [s.id for s in slots]
    wvec = np.array([w.values[i] for i in ids])
    init_vec = wvec if w_init is None else np.array([w_init.values[i] for i in ids])

    cache: dict[int, tuple[float, dict[str, float]]] = {}

    def soft_r(sig: Signal):
        key = id(sig)
        if key not in cache:
            if want_grad:
                cache[key] = soft_value_and_grad(sig, phi, w, soft_cfg, 0, horizon)
            else:
                cache[key] = (soft_wstl_robustness(sig, phi, w, soft_cfg, 0, horizon), {})
        return cache[key]

    loss = 0.0
    grad = np.zeros(len(ids)) if want_grad else None
    for splus, sminus in pairs:
        vplus, gplus = soft_r(splus)
        vminus, gminus = soft_r(sminus)
        z = cfg.M * (vplus - vminus - cfg.epsilon)
        loss += float(expit(-z))
        if want_grad:
            dz = -cfg.M * float(expit(z) * expit(-z))
            grad += dz * np.array(
                [gplus.get(i, 0.0) - gminus.get(i, 0.0) for i in ids]
            )
    q = float(np.dot(wvec, wvec) - np.dot(init_vec, init_vec))
    loss += float(np.logaddexp(0.0, q + math.log(cfg.theta)))
    if want_grad:
        grad += float(expit(q + math.log(cfg.theta))) * 2.0 * wvec
    return loss, grad


def _resolve_pairs(dataset: PreferenceDataset) -> list[tuple[Signal, Signal]]:
    return [(dataset.signals[a], dataset.signals[b]) for a, b in dataset.pairs]


def gradient_solve(
    dataset: PreferenceDataset,
    phi: Formula,
    cfg: LearnConfig | None = None,
    rng: np.random.Generator | int | None = None,
) -> LearnResult:
    """Multi-start adaptive-moment descent on the surrogate loss.

    Restart 0 starts from the all-ones (traditional) valuation, the rest
    from uniform draws in D.  Each step uses a random batch of pairs;
    weights are floored at `cfg.w_floor` after every update to stay
    strictly positive.  A restart stops when the full-dataset loss
    change drops below `cfg.loss_tol`; non-finite losses abort the
    restart.  The best restart (satisfied pairs, then loss) is
    normalized into D when the formula is fully parametric.
    """
    cfg = cfg or LearnConfig()
    if not dataset.pairs:
        raise ValueError("cannot learn from an empty preference dataset")
    horizon = dataset.horizon(phi)
    slots = parameter_slots(phi, horizon)
    if not slots:
        raise ValueError("formula has no learnable weight slots")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(
        cfg.seed if rng is None else rng
    )
    all_pairs = _resolve_pairs(dataset)
    n = len(slots)
    fully_parametric = all(
        getattr(node, "pinned", None) is None for _, node in _weighted_nodes(phi)
    )

    best: dict | None = None
    restart_logs = []
    for restart in range(cfg.restarts):
        if restart == 0:
            vec = np.ones(n)
        else:
            vec = _uniform_domain(rng, n)
        w_init = WeightValuation.from_vector(phi, vec, horizon)
        w = w_init
        m = np.zeros(n)
        v = np.zeros(n)
        prev_loss = surrogate_loss(all_pairs, phi, w, cfg, w_init, horizon)
        iterations = 0
        aborted = False
        if not math.isfinite(prev_loss):
            aborted = True
        b1, b2, eps = 0.9, 0.999, 1e-8
        for it in (range(1, cfg.max_iters + 1) if not aborted else ()):
            idx = rng.choice(len(all_pairs), size=min(cfg.batch_size, len(all_pairs)),
                             replace=False)
            batch = [all_pairs[i] for i in idx]
            _, g = _surrogate_value_grad(batch, phi, w, cfg, w_init, horizon, True)
            if not np.all(np.isfinite(g)):
                aborted = True
                break
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            mhat = m / (1 - b1**it)
            vhat = v / (1 - b2**it)
            vec = vec - cfg.learning_rate * mhat / (np.sqrt(vhat) + eps)
            vec = np.maximum(vec, cfg.w_floor)
            w = WeightValuation.from_vector(phi, vec, horizon)
            loss = surrogate_loss(all_pairs, phi, w, cfg, w_init, horizon)
            iterations = it
            if not math.isfinite(loss):
                aborted = True
                break
            if abs(prev_loss - loss) < cfg.loss_tol:
                prev_loss = loss
                break
            prev_loss = loss
        restart_logs.append(
            {"restart": restart, "iterations": iterations, "loss": prev_loss,
             "aborted": aborted}
        )
        if aborted:
            continue
        satisfied = count_satisfied(dataset, phi, w)
        if best is None or (satisfied, -prev_loss) > (best["satisfied"], -best["loss"]):
            best = {"w": w, "satisfied": satisfied, "loss": prev_loss,
                    "restart": restart, "iterations": iterations}
    if best is None:
        raise ValueError("every gradient restart diverged")

    w_final = best["w"]
    if fully_parametric:
        w_final = normalize_to_domain(phi, w_final, horizon)
    params = _params_from(phi, w_final, horizon)
    rvals, rplus, rminus = _robustness_matrix(dataset, phi, params, horizon)
    sat, margin_sat, mean_margin = _margin_stats(
        rvals, rplus, rminus, cfg.margin_fraction
    )
    return LearnResult(
        valuation=w_final,
        satisfied_pairs=int(sat[0]),
        margin_satisfied_pairs=int(margin_sat[0]),
        mean_margin=float(mean_margin[0]),
        solver="gradient",
        diagnostics={
            "restart_index": best["restart"],
            "iterations": best["iterations"],
            "final_loss": best["loss"],
            "restarts": restart_logs,
            "normalized": fully_parametric,
        },
    )


def _weighted_nodes(phi: Formula):
    from .formula import WEIGHTED_KINDS, iter_nodes

    return [(p, n) for p, n in iter_nodes(phi) if isinstance(n, WEIGHTED_KINDS)]


# ---------------------------------------------------------------------------
# Result persistence
# ---------------------------------------------------------------------------


def save_result(path, result: LearnResult, formula_text: str,
                horizon: int | None = None, config: LearnConfig | None = None) -> None:
    doc = {
        "format": FORMAT_RESULT,
        "version": FORMAT_VERSION,
        "formula": formula_text,
        "horizon": horizon,
        "solver": result.solver,
        "weights": result.valuation.values,
        "satisfied_pairs": result.satisfied_pairs,
        "margin_satisfied_pairs": result.margin_satisfied_pairs,
        "mean_margin": result.mean_margin,
        "diagnostics": result.diagnostics,
    }
    if config is not None:
        doc["config"] = {k: getattr(config, k) for k in LearnConfig.__dataclass_fields__}
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def load_result(path) -> dict:
    """Raw result document; 'valuation', 'formula', 'horizon', 'config' keys."""
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != FORMAT_RESULT:
        raise ValueError(f"{path}: not a learn-result file")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {doc.get('version')}")
    doc["valuation"] = WeightValuation(doc.pop("weights"))
    if doc.get("config"):
        doc["config"] = LearnConfig(**doc["config"])
    return doc
