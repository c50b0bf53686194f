"""Robustness semantics: hard, weighted, smoothed, and differentiated.

Evaluation works bottom-up over the syntax tree, computing for every
subformula a robustness trace (one value per time index), i.e. one
computation-graph node per (subformula, time) pair.  A pre-pass records
how far into the trace each subformula is actually consumed so nested
temporal operators do not pay for entries nobody reads.  The weighted
evaluator is batched: it accepts a matrix of weight vectors and returns
one robustness value per column, which is what makes random sampling
over thousands of candidate valuations cheap.

Hard semantics use exact extended-real arithmetic (+/-inf flows through
min/max untouched; positive weights never flip signs, so no NaN can
arise).  The soft path substitutes a large finite sentinel for +/-inf
and replaces min/max with log-sum-exp smoothings of sharpness beta;
`grad_weights` runs a reverse pass over the same graph and returns the
exact derivative of the smoothed robustness with respect to every
learnable weight.

Until is evaluated with the half-open inner window [t, t'), with the
min over an empty window equal to +inf.  Under this convention the
all-ones valuation reproduces the traditional robustness bit for bit.
On finite traces a window [t+a, t+b] is truncated to [t+a, t_final];
if t+a exceeds the trace the value at t is undefined and requesting it
raises TruncationError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

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
    children,
    iter_nodes,
    node_block_length,
    node_slots,
    parameter_slots,
)
from .signals import Signal

INF = math.inf


class TruncationError(ValueError):
    """The requested evaluation time needs samples beyond the trace end."""


@dataclass(frozen=True)
class SoftConfig:
    """Smoothing parameters: log-sum-exp sharpness and the finite stand-in
    for +/-inf (must dominate every finite robustness magnitude)."""

    beta: float = 1e4
    inf_sentinel: float = 1e6

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not (self.inf_sentinel > 0 and math.isfinite(self.inf_sentinel)):
            raise ValueError("inf_sentinel must be finite and positive")


# ---------------------------------------------------------------------------
# Soft min / max primitives
# ---------------------------------------------------------------------------


def soft_max(xs, beta: float) -> float:
    """(1/beta) * log sum exp(beta * x_i), stabilized by max subtraction."""
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise ValueError("soft_max of an empty sequence")
    m = xs.max()
    return float(m + np.log(np.exp(beta * (xs - m)).sum()) / beta)


def soft_min(xs, beta: float) -> float:
    return -soft_max(-np.asarray(xs, dtype=float), beta)


def _lse_reduce(stack: np.ndarray, beta: float, largest: bool):
    """Log-sum-exp reduction along axis 0 with selection weights.

    Returns (value, alpha) where alpha holds the softmax/softmin operand
    weights (alpha sums to 1 along axis 0); the gradient of the value in
    operand i is alpha[i].
    """
    signed = stack if largest else -stack
    m = signed.max(axis=0, keepdims=True)
    e = np.exp(beta * (signed - m))
    s = e.sum(axis=0)
    val = m[0] + np.log(s) / beta
    alpha = e / s
    return (val if largest else -val), alpha


# ---------------------------------------------------------------------------
# Window bookkeeping on finite traces
# ---------------------------------------------------------------------------


def _window_validity(a: int, b, tf: int, vc: int) -> int:
    """Largest t at which a window [t+a, min(t+b, tf)] is nonempty and lies
    within a child trace valid up to vc.  -1 means nowhere defined."""
    if vc >= tf:
        return tf - a
    if b is None:
        return -1
    return min(tf - a, vc - b)


def _window(t: int, a: int, b, tf: int) -> tuple[int, int]:
    lo = t + a
    hi = tf if b is None else min(t + b, tf)
    return lo, hi


def _needed_upto(phi: Formula, t: int, tf: int) -> dict[str, int]:
    """Per node path, the largest trace index any consumer will read."""
    need: dict[str, int] = {}

    def walk(node: Formula, path: str, u: int) -> None:
        need[path] = max(need.get(path, 0), u)
        sub = path if path.endswith("/") else path + "/"
        match node:
            case Not(c):
                walk(c, sub + "0", u)
            case And(l, r, _) | Or(l, r, _):
                walk(l, sub + "0", u)
                walk(r, sub + "1", u)
            case Always(c, itv, _) | Eventually(c, itv, _):
                walk(c, sub + "0", min(u + itv.b, tf) if itv.bounded else tf)
            case Until(l, r, itv, _):
                hi = min(u + itv.b, tf) if itv.bounded else tf
                walk(r, sub + "1", hi)
                walk(l, sub + "0", max(hi - 1, 0))
            case _:
                pass

    walk(phi, "/", t)
    return need


# ---------------------------------------------------------------------------
# Traditional (unweighted) robustness.  Kept as a small standalone
# recursion so it can serve as an independent oracle for the weighted path.
# ---------------------------------------------------------------------------


def _rho_trace(node: Formula, sig: Signal, cache: dict) -> tuple[np.ndarray, int]:
    key = id(node)
    if key in cache:
        return cache[key]
    tf = sig.t_final
    match node:
        case TrueNode():
            out = (np.full(tf + 1, INF), tf)
        case Pred(fn):
            out = (fn.evaluate(sig), tf)
        case Not(child):
            vals, v = _rho_trace(child, sig, cache)
            out = (-vals, v)
        case And(l, r, _) | Or(l, r, _):
            lv, vl = _rho_trace(l, sig, cache)
            rv, vr = _rho_trace(r, sig, cache)
            v = min(vl, vr)
            n = max(v + 1, 0)
            op = np.minimum if isinstance(node, And) else np.maximum
            out = (op(lv[:n], rv[:n]), v)
        case Always(child, itv, _) | Eventually(child, itv, _):
            cv, vc = _rho_trace(child, sig, cache)
            v = _window_validity(itv.a, itv.b, tf, vc)
            vals = np.empty(max(v + 1, 0))
            red = np.min if isinstance(node, Always) else np.max
            for t in range(v + 1):
                lo, hi = _window(t, itv.a, itv.b, tf)
                vals[t] = red(cv[lo : hi + 1])
            out = (vals, v)
        case Until(l, r, itv, _):
            lv, vl = _rho_trace(l, sig, cache)
            rv, vr = _rho_trace(r, sig, cache)
            v = _window_validity(itv.a, itv.b, tf, min(vr, vl + 1))
            vals = np.empty(max(v + 1, 0))
            for t in range(v + 1):
                lo, hi = _window(t, itv.a, itv.b, tf)
                # prefix[j] = min of left robustness over [t, t+j), empty = +inf
                prefix = np.empty(hi - t + 2)
                prefix[0] = INF
                if hi > t:
                    np.minimum.accumulate(lv[t:hi], out=prefix[1 : hi - t + 1])
                vals[t] = np.max(
                    np.minimum(rv[lo : hi + 1], prefix[lo - t : hi - t + 1])
                )
            out = (vals, v)
        case _:
            raise TypeError(f"not a formula node: {node!r}")
    cache[key] = out
    return out


def rho(sig: Signal, phi: Formula, t: int = 0) -> float:
    """Traditional robustness of `phi` on `sig` at time `t`."""
    if not 0 <= t <= sig.t_final:
        raise ValueError(f"t={t} outside the trace [0, {sig.t_final}]")
    vals, v = _rho_trace(phi, sig, {})
    if t > v:
        raise TruncationError(
            f"robustness undefined at t={t}: a window extends beyond the trace"
        )
    return float(vals[t])


# ---------------------------------------------------------------------------
# Weighted robustness, batched over candidate valuations.
# ---------------------------------------------------------------------------


def _build_blocks(
    phi: Formula, horizon: int, params: np.ndarray
) -> dict[str, np.ndarray]:
    """Per-node weight blocks of shape (block_len, batch).

    `params` holds one row per learnable slot, in enumeration order;
    pinned constants broadcast as single-column rows.
    """
    if params.ndim != 2:
        raise ValueError("parameter matrix must be 2-D (n_slots x batch)")
    if params.size and not np.all(params > 0):
        raise ValueError("weights must be strictly positive")
    blocks: dict[str, np.ndarray] = {}
    idx = 0
    for path, node in iter_nodes(phi):
        n = node_block_length(node, horizon)
        if n == 0:
            continue
        pinned = node.pinned
        if pinned is None:
            blocks[path] = params[idx : idx + n]
            idx += n
        else:
            flat = (
                tuple(pinned[0]) + tuple(pinned[1])
                if isinstance(node, Until)
                else tuple(pinned)
            )
            blocks[path] = np.array(flat, dtype=float).reshape(n, 1)
    if idx != params.shape[0]:
        raise ValueError(
            f"expected {idx} weight rows for this formula/horizon, got {params.shape[0]}"
        )
    return blocks


def _wstl_trace(
    node: Formula,
    path: str,
    sig: Signal,
    blocks: dict[str, np.ndarray],
    need: dict[str, int],
    cache: dict,
) -> tuple[np.ndarray, int]:
    """Weighted robustness trace of shape (upto + 1, batch_or_1).

    The second element is the node's true validity bound; the stored
    trace is cut at min(validity, need[path]).
    """
    if path in cache:
        return cache[path]
    tf = sig.t_final
    sub = path if path.endswith("/") else path + "/"
    match node:
        case TrueNode():
            out = (np.full((min(tf, need[path]) + 1, 1), INF), tf)
        case Pred(fn):
            out = (fn.evaluate(sig)[: need[path] + 1, None], tf)
        case Not(_):
            vals, v = _wstl_trace(children(node)[0], sub + "0", sig, blocks, need, cache)
            out = (-vals, v)
        case And(l, r, _) | Or(l, r, _):
            lv, vl = _wstl_trace(l, sub + "0", sig, blocks, need, cache)
            rv, vr = _wstl_trace(r, sub + "1", sig, blocks, need, cache)
            v = min(vl, vr)
            n = max(min(v, need[path]) + 1, 0)
            w = blocks[path]
            op = np.minimum if isinstance(node, And) else np.maximum
            out = (op(w[0] * lv[:n], w[1] * rv[:n]), v)
        case Always(child, itv, _) | Eventually(child, itv, _):
            cv, vc = _wstl_trace(child, sub + "0", sig, blocks, need, cache)
            v = _window_validity(itv.a, itv.b, tf, vc)
            n = min(v, need[path]) + 1
            w = blocks[path]
            batch = max(w.shape[1], cv.shape[1])
            vals = np.empty((max(n, 0), batch))
            red = np.min if isinstance(node, Always) else np.max
            for t in range(n):
                lo, hi = _window(t, itv.a, itv.b, tf)
                k = hi - lo + 1
                vals[t] = red(w[:k] * cv[lo : hi + 1], axis=0)
            out = (vals, v)
        case Until(l, r, itv, _):
            lv, vl = _wstl_trace(l, sub + "0", sig, blocks, need, cache)
            rv, vr = _wstl_trace(r, sub + "1", sig, blocks, need, cache)
            v = _window_validity(itv.a, itv.b, tf, min(vr, vl + 1))
            n = min(v, need[path]) + 1
            w = blocks[path]
            half = w.shape[0] // 2
            w1, w2 = w[:half], w[half:]
            batch = max(w.shape[1], lv.shape[1], rv.shape[1])
            vals = np.empty((max(n, 0), batch))
            inf_row = np.full((1, lv.shape[1]), INF)
            for t in range(n):
                lo, hi = _window(t, itv.a, itv.b, tf)
                k = hi - lo + 1
                prefix = (
                    np.concatenate([inf_row, np.minimum.accumulate(lv[t:hi], axis=0)])
                    if hi > t
                    else inf_row
                )
                cand = np.minimum(
                    w1[:k] * rv[lo : hi + 1], w2[:k] * prefix[lo - t : hi - t + 1]
                )
                vals[t] = cand.max(axis=0)
            out = (vals, v)
        case _:
            raise TypeError(f"not a formula node: {node!r}")
    cache[path] = out
    return out


def _as_params(phi: Formula, w: WeightValuation, horizon: int) -> np.ndarray:
    slots = parameter_slots(phi, horizon)
    missing = [s.id for s in slots if s.id not in w.values]
    if missing:
        raise ValueError(f"valuation missing weight slots: {missing[:5]}")
    return np.array([w.values[s.id] for s in slots], dtype=float).reshape(
        len(slots), 1
    )


def wstl_robustness_batch(
    sig: Signal,
    phi: Formula,
    params: np.ndarray,
    t: int = 0,
    horizon: int | None = None,
) -> np.ndarray:
    """Weighted robustness at time t for every column of `params`."""
    if not 0 <= t <= sig.t_final:
        raise ValueError(f"t={t} outside the trace [0, {sig.t_final}]")
    horizon = sig.t_final if horizon is None else horizon
    blocks = _build_blocks(phi, horizon, params)
    need = _needed_upto(phi, t, sig.t_final)
    vals, v = _wstl_trace(phi, "/", sig, blocks, need, {})
    if t > v:
        raise TruncationError(
            f"robustness undefined at t={t}: a window extends beyond the trace"
        )
    row = vals[t]
    if row.shape[0] == 1 and params.shape[1] > 1:
        row = np.repeat(row, params.shape[1])
    return row


def wstl_robustness(
    sig: Signal,
    phi: Formula,
    w: WeightValuation,
    t: int = 0,
    horizon: int | None = None,
) -> float:
    """Weighted robustness of `phi` on `sig` at time `t` under valuation `w`."""
    horizon = sig.t_final if horizon is None else horizon
    return float(
        wstl_robustness_batch(sig, phi, _as_params(phi, w, horizon), t, horizon)[0]
    )


# ---------------------------------------------------------------------------
# Soft robustness with reverse-mode weight gradients.
# ---------------------------------------------------------------------------


class _SoftEval:
    """One forward/backward evaluation of the smoothed robustness at time t.

    Forward caches, per node, its value trace plus whatever the reverse
    pass needs (operand stacks and selection weights).  `min_gap` tracks
    the smallest pairwise gap seen inside any finite reduction, the
    quantity that controls both soft/hard agreement and the accuracy of
    finite-difference gradient checks.
    """

    def __init__(
        self,
        phi: Formula,
        sig: Signal,
        w: WeightValuation,
        cfg: SoftConfig,
        t: int = 0,
        horizon: int | None = None,
    ):
        if not 0 <= t <= sig.t_final:
            raise ValueError(f"t={t} outside the trace [0, {sig.t_final}]")
        self.phi = phi
        self.sig = sig
        self.cfg = cfg
        self.t = t
        self.tf = sig.t_final
        self.horizon = self.tf if horizon is None else horizon
        params = _as_params(phi, w, self.horizon)
        self.blocks = _build_blocks(phi, self.horizon, params)
        self.need = _needed_upto(phi, t, self.tf)
        self.nodes = list(iter_nodes(phi))
        self.values: dict[str, np.ndarray] = {}
        self.valid: dict[str, int] = {}
        self.records: dict[str, object] = {}
        self.min_gap = INF
        for path, node in reversed(self.nodes):
            self._eval_node(path, node)

    # -- helpers -----------------------------------------------------------

    def _soften(self, vals: np.ndarray) -> np.ndarray:
        s = self.cfg.inf_sentinel
        return np.where(vals == INF, s, np.where(vals == -INF, -s, vals))

    def _track_gap(self, stack: np.ndarray) -> None:
        if stack.shape[0] < 2 or stack.size == 0:
            return
        srt = np.sort(stack, axis=0)
        gap = np.diff(srt, axis=0).min()
        if gap < self.min_gap:
            self.min_gap = float(gap)

    def _reduce(self, stack: np.ndarray, largest: bool):
        self._track_gap(stack)
        return _lse_reduce(stack, self.cfg.beta, largest)

    def _weights(self, path: str) -> np.ndarray:
        return self.blocks[path][:, 0]

    def _child_paths(self, path: str, node: Formula) -> list[str]:
        sub = path if path.endswith("/") else path + "/"
        return [f"{sub}{i}" for i in range(len(children(node)))]

    # -- forward -----------------------------------------------------------

    def _eval_node(self, path: str, node: Formula) -> None:
        tf, beta = self.tf, self.cfg.beta
        kids = self._child_paths(path, node)
        match node:
            case TrueNode():
                vals, v = np.full(min(tf, self.need[path]) + 1, self.cfg.inf_sentinel), tf
            case Pred(fn):
                vals, v = self._soften(fn.evaluate(self.sig))[: self.need[path] + 1], tf
            case Not(_):
                vals, v = -self.values[kids[0]], self.valid[kids[0]]
            case And(_, _, _) | Or(_, _, _):
                lv, rv = self.values[kids[0]], self.values[kids[1]]
                v = min(self.valid[kids[0]], self.valid[kids[1]])
                n = max(min(v, self.need[path]) + 1, 0)
                w = self._weights(path)
                stack = np.stack([w[0] * lv[:n], w[1] * rv[:n]])
                vals, alpha = self._reduce(stack, largest=isinstance(node, Or))
                self.records[path] = alpha
            case Always(_, itv, _) | Eventually(_, itv, _):
                cv = self.values[kids[0]]
                v = _window_validity(itv.a, itv.b, tf, self.valid[kids[0]])
                n = min(v, self.need[path]) + 1
                w = self._weights(path)
                vals = np.empty(max(n, 0))
                alphas = []
                for t in range(n):
                    lo, hi = _window(t, itv.a, itv.b, tf)
                    k = hi - lo + 1
                    vals[t], alpha = self._reduce(
                        w[:k] * cv[lo : hi + 1], largest=isinstance(node, Eventually)
                    )
                    alphas.append(alpha)
                self.records[path] = alphas
            case Until(_, _, itv, _):
                lv, rv = self.values[kids[0]], self.values[kids[1]]
                v = _window_validity(
                    itv.a, itv.b, tf, min(self.valid[kids[1]], self.valid[kids[0]] + 1)
                )
                n = min(v, self.need[path]) + 1
                w = self._weights(path)
                half = w.shape[0] // 2
                w1, w2 = w[:half], w[half:]
                vals = np.empty(max(n, 0))
                recs = []
                for t in range(n):
                    lo, hi = _window(t, itv.a, itv.b, tf)
                    k = hi - lo + 1
                    prefix = np.empty(hi - t + 1)
                    prefix[0] = self.cfg.inf_sentinel
                    for j in range(1, hi - t + 1):
                        prefix[j] = soft_min(lv[t : t + j], beta)
                    pj = prefix[lo - t : hi - t + 1]
                    inner = np.stack([w1[:k] * rv[lo : hi + 1], w2[:k] * pj])
                    inner_val, gamma = self._reduce(inner, largest=False)
                    vals[t], alpha = self._reduce(inner_val, largest=True)
                    recs.append((alpha, gamma, pj))
                self.records[path] = recs
            case _:
                raise TypeError(f"not a formula node: {node!r}")
        self.values[path] = vals
        self.valid[path] = v

    def value(self) -> float:
        if self.t > self.valid["/"]:
            raise TruncationError(
                f"robustness undefined at t={self.t}: a window extends beyond the trace"
            )
        return float(self.values["/"][self.t])

    # -- backward ------------------------------------------------------------

    def gradient(self) -> dict[str, float]:
        self.value()  # validity check
        beta = self.cfg.beta
        adj = {p: np.zeros(len(self.values[p])) for p, _ in self.nodes}
        adj["/"][self.t] = 1.0
        block_grads: dict[str, np.ndarray] = {}
        for path, node in self.nodes:  # preorder: parents before children
            dy = adj[path]
            if not dy.any():
                continue
            kids = self._child_paths(path, node)
            match node:
                case TrueNode() | Pred(_):
                    continue
                case Not(_):
                    adj[kids[0]][: len(dy)] -= dy
                case And(_, _, _) | Or(_, _, _):
                    alpha = self.records[path]
                    n = alpha.shape[1]
                    w = self._weights(path)
                    g = block_grads.setdefault(path, np.zeros(2))
                    lv, rv = self.values[kids[0]], self.values[kids[1]]
                    adj[kids[0]][:n] += dy[:n] * alpha[0] * w[0]
                    adj[kids[1]][:n] += dy[:n] * alpha[1] * w[1]
                    g[0] += np.dot(dy[:n], alpha[0] * lv[:n])
                    g[1] += np.dot(dy[:n], alpha[1] * rv[:n])
                case Always(_, itv, _) | Eventually(_, itv, _):
                    alphas = self.records[path]
                    w = self._weights(path)
                    g = block_grads.setdefault(path, np.zeros(w.shape[0]))
                    cv = self.values[kids[0]]
                    for t_ in range(len(dy)):
                        if dy[t_] == 0.0:
                            continue
                        lo, hi = _window(t_, itv.a, itv.b, self.tf)
                        k = hi - lo + 1
                        a = alphas[t_]
                        adj[kids[0]][lo : hi + 1] += dy[t_] * a * w[:k]
                        g[:k] += dy[t_] * a * cv[lo : hi + 1]
                case Until(_, _, itv, _):
                    recs = self.records[path]
                    w = self._weights(path)
                    half = w.shape[0] // 2
                    w1, w2 = w[:half], w[half:]
                    g = block_grads.setdefault(path, np.zeros(w.shape[0]))
                    lv, rv = self.values[kids[0]], self.values[kids[1]]
                    for t_ in range(len(dy)):
                        if dy[t_] == 0.0:
                            continue
                        lo, hi = _window(t_, itv.a, itv.b, self.tf)
                        k = hi - lo + 1
                        alpha, gamma, pj = recs[t_]
                        du = dy[t_] * alpha * gamma[0]
                        dq = dy[t_] * alpha * gamma[1]
                        adj[kids[1]][lo : hi + 1] += du * w1[:k]
                        g[:k] += du * rv[lo : hi + 1]
                        g[half : half + k] += dq * pj
                        dprefix = dq * w2[:k]
                        for off in range(k):
                            j = lo - t_ + off
                            if j == 0 or dprefix[off] == 0.0:
                                continue
                            seg = lv[t_ : t_ + j]
                            m = seg.min()
                            e = np.exp(-beta * (seg - m))
                            adj[kids[0]][t_ : t_ + j] += dprefix[off] * (e / e.sum())
        out: dict[str, float] = {}
        for path, node in self.nodes:
            if node_block_length(node, self.horizon) == 0 or node.pinned is not None:
                continue
            g = block_grads.get(path)
            for slot in node_slots(path, node, self.horizon):
                out[slot.id] = float(g[slot.index]) if g is not None else 0.0
        return out


def soft_wstl_robustness(
    sig: Signal,
    phi: Formula,
    w: WeightValuation,
    cfg: SoftConfig,
    t: int = 0,
    horizon: int | None = None,
) -> float:
    """Smoothed weighted robustness (log-sum-exp min/max, sentinel infinities)."""
    return _SoftEval(phi, sig, w, cfg, t, horizon).value()


def grad_weights(
    sig: Signal,
    phi: Formula,
    w: WeightValuation,
    cfg: SoftConfig,
    t: int = 0,
    horizon: int | None = None,
) -> dict[str, float]:
    """d soft_wstl_robustness / d w for every parameter slot (0 if unused)."""
    return _SoftEval(phi, sig, w, cfg, t, horizon).gradient()


def soft_value_and_grad(
    sig: Signal,
    phi: Formula,
    w: WeightValuation,
    cfg: SoftConfig,
    t: int = 0,
    horizon: int | None = None,
) -> tuple[float, dict[str, float]]:
    """Smoothed robustness and its weight gradient from one shared forward pass."""
    ev = _SoftEval(phi, sig, w, cfg, t, horizon)
    return ev.value(), ev.gradient()


def soft_operand_gap(
    sig: Signal,
    phi: Formula,
    w: WeightValuation,
    cfg: SoftConfig,
    t: int = 0,
    horizon: int | None = None,
) -> float:
    """Smallest pairwise operand gap over all reductions in the soft graph.

    Instances with a large gap are 'tie-free': the smoothing error and
    the curvature seen by finite differences are both controlled by it.
    """
    return _SoftEval(phi, sig, w, cfg, t, horizon).min_gap


# ---------------------------------------------------------------------------
# Debug report: per-node robustness traces in a stable text format.
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return f"{x:.9g}"


def _node_label(node: Formula) -> str:
    match node:
        case TrueNode():
            return "true"
        case Pred(fn):
            return f"pred[{fn.name or ','.join(ch for ch, _ in fn.coeffs)}]"
        case Not(_):
            return "not"
        case And(_, _, _):
            return "and"
        case Or(_, _, _):
            return "or"
        case Until(_, _, itv, _):
            return f"until{itv}"
        case Always(_, itv, _):
            return f"always{itv}"
        case Eventually(_, itv, _):
            return f"eventually{itv}"
    return "?"


def debug_report(
    sig: Signal,
    phi: Formula,
    w: WeightValuation | None = None,
    horizon: int | None = None,
) -> str:
    """Robustness trace of every (subformula, time) node, one line each.

    With a valuation the weighted semantics are reported; without one the
    traditional robustness is.  The format is stable for golden tests.
    """
    horizon = sig.t_final if horizon is None else horizon
    if w is None:
        w = WeightValuation.ones(phi, horizon)
        header = "semantics: traditional (all weights 1)"
    else:
        header = "semantics: weighted"
    blocks = _build_blocks(phi, horizon, _as_params(phi, w, horizon))
    need = {path: sig.t_final for path, _ in iter_nodes(phi)}
    cache: dict = {}
    _wstl_trace(phi, "/", sig, blocks, need, cache)
    lines = [header, f"trace length: {sig.t_final + 1}"]
    for path, node in iter_nodes(phi):
        vals, v = cache[path]
        row = " ".join(_fmt(float(x)) for x in vals[:, 0]) if v >= 0 else "(undefined)"
        lines.append(f"{path} {_node_label(node)} :: {row}")
    return "\n".join(lines) + "\n"
