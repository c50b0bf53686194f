"""Weighted temporal-logic formulas as immutable syntax trees.

Node kinds: TrueNode, Pred, Not, And, Or, Until, Always, Eventually.
Binary connectives carry two weight entries; Always/Eventually carry one
entry per step of their window and Until carries two such blocks.  True,
predicates and negation are unweighted.  Each weighted operator either
leaves its block as learnable parameters (``pinned is None``) or pins it
to positive constants.

Weight slots are addressed by tree path so that two parses of the same
text agree on ids: the root path is "/" and children extend it with the
child index ("/0", "/0/1", ...).  Slot ids look like "/0#w2".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

import numpy as np

from .signals import PredicateFn

UNBOUNDED = None


@dataclass(frozen=True)
class Interval:
    """Discrete time window [a, b]; b may be UNBOUNDED (None)."""

    a: int = 0
    b: Optional[int] = UNBOUNDED

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("interval start must be >= 0")
        if self.b is not UNBOUNDED and self.b < self.a:
            raise ValueError(f"malformed interval [{self.a},{self.b}]")

    @property
    def bounded(self) -> bool:
        return self.b is not UNBOUNDED

    def block_length(self, horizon: Optional[int]) -> int:
        """Number of weight entries; unbounded windows are sized for t=0."""
        if self.bounded:
            return self.b - self.a + 1
        if horizon is None:
            raise ValueError(
                "formula has an unbounded interval; a horizon (t_final) is required"
            )
        if horizon < self.a:
            raise ValueError(
                f"horizon {horizon} too short for interval starting at {self.a}"
            )
        return horizon - self.a + 1

    def __str__(self):
        if self.bounded:
            return f"[{self.a},{self.b}]"
        return "" if self.a == 0 else f"[{self.a},inf]"


@dataclass(frozen=True)
class TrueNode:
    pass


@dataclass(frozen=True)
class Pred:
    fn: PredicateFn


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    pinned: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    pinned: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"
    interval: Interval = field(default_factory=Interval)
    pinned: Optional[tuple[tuple[float, ...], tuple[float, ...]]] = None


@dataclass(frozen=True)
class Always:
    child: "Formula"
    interval: Interval = field(default_factory=Interval)
    pinned: Optional[tuple[float, ...]] = None


@dataclass(frozen=True)
class Eventually:
    child: "Formula"
    interval: Interval = field(default_factory=Interval)
    pinned: Optional[tuple[float, ...]] = None


Formula = Union[TrueNode, Pred, Not, And, Or, Until, Always, Eventually]

WEIGHTED_KINDS = (And, Or, Until, Always, Eventually)


def children(node: Formula) -> tuple[Formula, ...]:
    match node:
        case Not(child) | Always(child, _, _) | Eventually(child, _, _):
            return (child,)
        case And(l, r, _) | Or(l, r, _) | Until(l, r, _, _):
            return (l, r)
        case _:
            return ()


def iter_nodes(phi: Formula, path: str = "/") -> Iterator[tuple[str, Formula]]:
    """Depth-first, left-to-right traversal yielding (path, node)."""
    yield path, phi
    prefix = path if path.endswith("/") else path + "/"
    for i, c in enumerate(children(phi)):
        yield from iter_nodes(c, f"{prefix}{i}")


def _validate_pin(values, length: int, where: str) -> None:
    if len(values) != length:
        raise ValueError(f"{where}: expected {length} pinned weights, got {len(values)}")
    if any(v <= 0 for v in values):
        raise ValueError(f"{where}: pinned weights must be positive")


def node_block_length(node: Formula, horizon: Optional[int]) -> int:
    """Total weight entries carried by one node (0 for unweighted kinds)."""
    match node:
        case And() | Or():
            return 2
        case Always(_, interval, _) | Eventually(_, interval, _):
            return interval.block_length(horizon)
        case Until(_, _, interval, _):
            return 2 * interval.block_length(horizon)
        case _:
            return 0


@dataclass(frozen=True)
class WeightSlot:
    """One weight entry of one operator.

    `id` is "<node path>#w<k>" with k the entry offset inside the node's
    block (Until blocks are laid out w1 entries then w2 entries).
    `value` is None for learnable parameters and the pinned constant
    otherwise.
    """

    id: str
    path: str
    index: int
    value: Optional[float] = None

    @property
    def is_parameter(self) -> bool:
        return self.value is None


def node_slots(path: str, node: Formula, horizon: Optional[int]) -> list[WeightSlot]:
    n = node_block_length(node, horizon)
    if n == 0:
        return []
    pinned = getattr(node, "pinned", None)
    values: list[Optional[float]]
    if pinned is None:
        values = [None] * n
    elif isinstance(node, Until):
        w1, w2 = pinned
        half = n // 2
        _validate_pin(w1, half, path)
        _validate_pin(w2, half, path)
        values = list(w1) + list(w2)
    else:
        _validate_pin(pinned, n, path)
        values = list(pinned)
    return [WeightSlot(f"{path}#w{k}", path, k, values[k]) for k in range(n)]


def weight_slots(phi: Formula, horizon: Optional[int] = None) -> list[WeightSlot]:
    """All weight slots in deterministic depth-first, left-to-right order."""
    out: list[WeightSlot] = []
    for path, node in iter_nodes(phi):
        out.extend(node_slots(path, node, horizon))
    return out


def parameter_slots(phi: Formula, horizon: Optional[int] = None) -> list[WeightSlot]:
    return [s for s in weight_slots(phi, horizon) if s.is_parameter]


def root_weighted_node(phi: Formula) -> tuple[str, Formula]:
    """First weighted operator reached from the root through unweighted nodes."""
    path, node = "/", phi
    while True:
        if isinstance(node, WEIGHTED_KINDS):
            return path, node
        if isinstance(node, Not):
            prefix = path if path.endswith("/") else path + "/"
            path, node = f"{prefix}0", node.child
            continue
        raise ValueError("formula contains no weighted operator")


def root_weight_slots(phi: Formula, horizon: Optional[int] = None) -> list[WeightSlot]:
    path, node = root_weighted_node(phi)
    return node_slots(path, node, horizon)


def levels(phi: Formula) -> dict[int, list[tuple[str, Formula]]]:
    """Weighted nodes grouped by nesting depth among weighted operators.

    The weighted operator nearest the root is level 1; a weighted node
    strictly inside k weighted ancestors is level k+1.  Unweighted nodes
    (negation, predicates) do not open a level.
    """
    out: dict[int, list[tuple[str, Formula]]] = {}

    def walk(node: Formula, path: str, level: int) -> None:
        here = level
        if isinstance(node, WEIGHTED_KINDS):
            here += 1
            out.setdefault(here, []).append((path, node))
        prefix = path if path.endswith("/") else path + "/"
        for i, c in enumerate(children(node)):
            walk(c, f"{prefix}{i}", here)

    walk(phi, "/", 0)
    return out


def has_unbounded(phi: Formula) -> bool:
    return any(
        isinstance(n, (Until, Always, Eventually)) and not n.interval.bounded
        for _, n in iter_nodes(phi)
    )


@dataclass(frozen=True)
class WeightValuation:
    """Assignment of positive reals to every parameter slot of a formula."""

    values: "dict[str, float]"

    def __post_init__(self):
        bad = {k: v for k, v in self.values.items() if not (v > 0)}
        if bad:
            raise ValueError(f"weights must be strictly positive: {bad}")

    def __getitem__(self, slot_id: str) -> float:
        try:
            return self.values[slot_id]
        except KeyError:
            raise KeyError(f"no weight for slot {slot_id}") from None

    def __len__(self) -> int:
        return len(self.values)

    def validate_total(self, phi: Formula, horizon: Optional[int] = None) -> None:
        missing = [s.id for s in parameter_slots(phi, horizon) if s.id not in self.values]
        if missing:
            raise ValueError(f"valuation missing slots: {missing[:5]}")

    def vector(self, phi: Formula, horizon: Optional[int] = None):
        return np.array(
            [self.values[s.id] for s in parameter_slots(phi, horizon)], dtype=float
        )

    @staticmethod
    def from_vector(phi: Formula, vec, horizon: Optional[int] = None) -> "WeightValuation":
        slots = parameter_slots(phi, horizon)
        if len(vec) != len(slots):
            raise ValueError(f"expected {len(slots)} weights, got {len(vec)}")
        return WeightValuation({s.id: float(v) for s, v in zip(slots, vec)})

    @staticmethod
    def ones(phi: Formula, horizon: Optional[int] = None) -> "WeightValuation":
        """The traditional-robustness valuation: every parameter weight is 1."""
        return WeightValuation({s.id: 1.0 for s in parameter_slots(phi, horizon)})


# ---------------------------------------------------------------------------
# Canonical printer.  parse(to_text(phi)) reproduces phi structurally.
# ---------------------------------------------------------------------------


def _fmt_num(x: float) -> str:
    if math.isfinite(x) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _affine_text(fn: PredicateFn) -> str:
    parts: list[str] = []
    for ch, c in fn.coeffs:
        if c == 0:
            continue
        if not parts:
            if c == 1:
                parts.append(ch)
            elif c == -1:
                parts.append(f"-{ch}")
            else:
                parts.append(f"{_fmt_num(c)}*{ch}")
        else:
            sign = "+" if c > 0 else "-"
            mag = abs(c)
            term = ch if mag == 1 else f"{_fmt_num(mag)}*{ch}"
            parts.append(f"{sign} {term}")
    if fn.offset != 0 or not parts:
        if not parts:
            parts.append(_fmt_num(fn.offset))
        else:
            sign = "+" if fn.offset > 0 else "-"
            parts.append(f"{sign} {_fmt_num(abs(fn.offset))}")
    return " ".join(parts)


def _pin_text(values) -> str:
    return "{" + ",".join(_fmt_num(v) for v in values) + "}"


def to_text(phi: Formula) -> str:
    """Canonical textual form of a formula."""
    match phi:
        case TrueNode():
            return "true"
        case Pred(fn):
            return f"({_affine_text(fn)} >= 0)"
        case Not(child):
            return f"!{to_text(child)}"
        case And(l, r, pinned):
            op = "&" if pinned is None else "&" + _pin_text(pinned)
            return f"({to_text(l)} {op} {to_text(r)})"
        case Or(l, r, pinned):
            op = "|" if pinned is None else "|" + _pin_text(pinned)
            return f"({to_text(l)} {op} {to_text(r)})"
        case Until(l, r, interval, pinned):
            op = f"U{interval}"
            if pinned is not None:
                w1, w2 = pinned
                op += "{" + ",".join(map(_fmt_num, w1)) + ";" + ",".join(map(_fmt_num, w2)) + "}"
            return f"({to_text(l)} {op} {to_text(r)})"
        case Always(c, interval, pinned):
            op = f"G{interval}"
            if pinned is not None:
                op += _pin_text(pinned)
            return f"{op} {to_text(c)}"
        case Eventually(c, interval, pinned):
            op = f"F{interval}"
            if pinned is not None:
                op += _pin_text(pinned)
            return f"{op} {to_text(c)}"
    raise TypeError(f"not a formula node: {phi!r}")
