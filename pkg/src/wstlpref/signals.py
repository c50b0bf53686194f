"""Discrete-time multi-channel signals over the extended reals.

A signal is a fixed-length, uniformly sampled time series.  Channels are
either real-valued or boolean; boolean channels encode truth values as
+inf (true) / -inf (false) so they can flow through the same min/max
robustness arithmetic as real channels.  Signals are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

INF = math.inf

FORMAT_SIGNALS = "wstlpref-signals"
FORMAT_VERSION = 1


class SignalError(ValueError):
    """Raised on malformed signal data or bad channel access."""


@dataclass(frozen=True)
class Channel:
    """Channel descriptor: a name plus 'real' or 'boolean' kind."""

    name: str
    kind: str = "real"

    def __post_init__(self):
        if self.kind not in ("real", "boolean"):
            raise SignalError(f"unknown channel kind {self.kind!r}")


class Signal:
    """Immutable multi-channel signal of length t_final + 1.

    `samples` has shape (num_channels, t_final + 1).  Boolean channels
    must contain only +/-inf; no channel may contain NaN.  `dt` is
    carried as metadata only; all semantics are index based.
    """

    __slots__ = ("channels", "samples", "dt", "_index")

    def __init__(self, channels: Sequence[Channel], samples, dt: float = 1.0):
        channels = tuple(channels)
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 2:
            raise SignalError("samples must be a 2-D (channels x time) array")
        if arr.shape[0] != len(channels):
            raise SignalError(
                f"{len(channels)} channel descriptors but {arr.shape[0]} sample rows"
            )
        if arr.shape[1] < 1:
            raise SignalError("signals must contain at least one sample")
        if np.isnan(arr).any():
            raise SignalError("NaN is not a valid sample value")
        if len({c.name for c in channels}) != len(channels):
            raise SignalError("duplicate channel names")
        if dt <= 0:
            raise SignalError("dt must be positive")
        for i, c in enumerate(channels):
            if c.kind == "boolean" and not np.all(np.isinf(arr[i])):
                raise SignalError(f"boolean channel {c.name!r} must hold only +/-inf")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "dt", float(dt))
        object.__setattr__(self, "_index", {c.name: i for i, c in enumerate(channels)})

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("Signal is immutable")

    @property
    def t_final(self) -> int:
        return self.samples.shape[1] - 1

    @property
    def num_channels(self) -> int:
        return len(self.channels)

    def channel_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SignalError(f"unknown channel {name!r}") from None

    def kind(self, name: str) -> str:
        return self.channels[self.channel_index(name)].kind

    def channel(self, name: str) -> np.ndarray:
        """Full sample row for a channel (read-only view)."""
        return self.samples[self.channel_index(name)]

    def value_at(self, name: str, t: int) -> float:
        """Stored sample of `name` at index `t`."""
        if not 0 <= t <= self.t_final:
            raise SignalError(f"t={t} outside [0, {self.t_final}]")
        return float(self.samples[self.channel_index(name), t])

    def with_channel(self, channel: Channel, values) -> "Signal":
        """New signal with one extra channel appended."""
        if channel.name in self._index:
            raise SignalError(f"channel {channel.name!r} already exists")
        values = np.asarray(values, dtype=float).reshape(1, -1)
        if values.shape[1] != self.t_final + 1:
            raise SignalError("appended channel has wrong length")
        return Signal(
            self.channels + (channel,), np.vstack([self.samples, values]), self.dt
        )

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return (
            self.channels == other.channels
            and self.dt == other.dt
            and np.array_equal(self.samples, other.samples)
        )

    def __repr__(self):
        names = ",".join(c.name for c in self.channels)
        return f"Signal([{names}], len={self.t_final + 1}, dt={self.dt})"


def boolean_channel(flags: Iterable[bool]) -> np.ndarray:
    """Encode an iterable of truth values as a +/-inf sample row."""
    return np.where(np.asarray(list(flags), dtype=bool), INF, -INF)


@dataclass(frozen=True)
class PredicateFn:
    """Named affine map over channels: sum(coeff_i * s_i(t)) + offset.

    A boolean channel may appear only as the sole nonzero term with zero
    offset, so evaluation yields +/-inf rather than an inf-inf NaN.
    """

    coeffs: tuple[tuple[str, float], ...]
    offset: float = 0.0
    name: str = field(default="", compare=False)

    @staticmethod
    def of(coeffs: Mapping[str, float], offset: float = 0.0, name: str = "") -> "PredicateFn":
        return PredicateFn(tuple(coeffs.items()), float(offset), name)

    def negated(self) -> "PredicateFn":
        return PredicateFn(
            tuple((ch, -c) for ch, c in self.coeffs), -self.offset, self.name
        )

    def evaluate(self, signal: Signal) -> np.ndarray:
        """Value trace f(s(t)) for all t, shape (t_final + 1,)."""
        nonzero = [(ch, c) for ch, c in self.coeffs if c != 0.0]
        bool_terms = [
            (ch, c) for ch, c in nonzero if signal.kind(ch) == "boolean"
        ]
        if bool_terms:
            if len(nonzero) != 1 or self.offset != 0.0:
                raise SignalError(
                    "a boolean channel must be the sole nonzero term of a predicate"
                )
            ch, c = bool_terms[0]
            row = signal.channel(ch)
            return np.where(row > 0, math.copysign(INF, c), -math.copysign(INF, c))
        out = np.full(signal.t_final + 1, self.offset, dtype=float)
        for ch, c in nonzero:
            out += c * signal.channel(ch)
        return out


def append_indicator_channel(
    signal: Signal, fn: PredicateFn, name: str, eq_tol: float = 1e-9
) -> Signal:
    """Append the zero-set indicator of `fn` as a boolean channel.

    The new channel is +inf exactly where |fn(s(t))| <= eq_tol and -inf
    elsewhere.  `fn` must evaluate to a finite real at every step.
    """
    values = fn.evaluate(signal)
    if not np.all(np.isfinite(values)):
        raise SignalError("indicator transform requires a finite-valued predicate")
    return signal.with_channel(
        Channel(name, "boolean"), boolean_channel(np.abs(values) <= eq_tol)
    )


def euclidean_distance(s1: Signal, s2: Signal, channels: Sequence[str]) -> float:
    """2-norm of the per-sample differences over the listed real channels."""
    if s1.t_final != s2.t_final:
        raise SignalError("signals must have equal length")
    total = 0.0
    for name in channels:
        if s1.kind(name) != "real" or s2.kind(name) != "real":
            raise SignalError(f"channel {name!r} must be real-kind in both signals")
        diff = s1.channel(name) - s2.channel(name)
        total += float(np.dot(diff, diff))
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# Persistence.  Versioned JSON: +/-inf samples are serialized as the literal
# strings "inf" / "-inf" since JSON has no portable infinity.
# ---------------------------------------------------------------------------


def _encode_value(x: float):
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return x


def _decode_value(x) -> float:
    if x == "inf":
        return INF
    if x == "-inf":
        return -INF
    return float(x)


def signal_to_dict(signal: Signal) -> dict:
    return {
        "dt": signal.dt,
        "channels": [{"name": c.name, "kind": c.kind} for c in signal.channels],
        "samples": [[_encode_value(v) for v in row] for row in signal.samples],
    }


def signal_from_dict(data: dict) -> Signal:
    channels = [Channel(c["name"], c.get("kind", "real")) for c in data["channels"]]
    samples = [[_decode_value(v) for v in row] for row in data["samples"]]
    return Signal(channels, samples, dt=data.get("dt", 1.0))


def save_signals(path, signals: Mapping[str, Signal], meta: dict | None = None) -> None:
    """Write a named-signal dataset file."""
    doc = {
        "format": FORMAT_SIGNALS,
        "version": FORMAT_VERSION,
        "signals": [
            {"name": name, **signal_to_dict(sig)} for name, sig in signals.items()
        ],
    }
    if meta:
        doc["meta"] = meta
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def load_signals(path) -> tuple[dict[str, Signal], dict]:
    """Read a dataset file; returns (name -> Signal, meta)."""
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != FORMAT_SIGNALS:
        raise SignalError(f"{path}: not a signal dataset file")
    if doc.get("version") != FORMAT_VERSION:
        raise SignalError(f"{path}: unsupported version {doc.get('version')}")
    signals = {entry["name"]: signal_from_dict(entry) for entry in doc["signals"]}
    return signals, doc.get("meta", {})
