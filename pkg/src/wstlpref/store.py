"""On-disk project layout, sessions, and crash-safe persistence.

A project directory groups generated artifacts under datasets/, pairs/,
sessions/, and results/.  All writes go through a write-temp-then-rename
step so a crash can lose at most the in-flight record, never corrupt an
existing file.

A `Session` tracks one participant answering one pair set.  Pairs are
presented in pair-set order but each pair's left/right placement is
randomized from the session seed, so position bias cannot leak into the
data.  Choices are recorded per pair ("left"/"right"); a completed
session exports ordered (preferred, non-preferred) id pairs.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .scenarios import PairSet

FORMAT_SESSION = "wstlpref-session"
FORMAT_VERSION = 1


def atomic_write_json(path, doc: dict) -> None:
    """Serialize to a sibling temp file, then rename over the target."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


@dataclass(frozen=True)
class Session:
    """One participant's progress through a pair set."""

    id: str
    scenario: str
    pairs_file: str
    layout: tuple[tuple[str, str], ...]  # per pair: (left id, right id)
    choices: tuple[str | None, ...]  # "left" | "right" | None
    seed: int
    created: str
    updated: str

    def __post_init__(self):
        if len(self.choices) != len(self.layout):
            raise ValueError("choices and layout lengths differ")

    @property
    def total(self) -> int:
        return len(self.layout)

    @property
    def answered(self) -> int:
        return sum(1 for c in self.choices if c is not None)

    @property
    def complete(self) -> bool:
        return self.answered == self.total

    def with_choice(self, index: int, choice: str) -> "Session":
        if not 0 <= index < self.total:
            raise IndexError(f"pair index {index} outside [0, {self.total})")
        if choice not in ("left", "right"):
            raise ValueError("choice must be 'left' or 'right'")
        choices = list(self.choices)
        choices[index] = choice
        return replace(self, choices=tuple(choices), updated=_now())

    def preferences(self) -> list[tuple[str, str]]:
        """Ordered (preferred, non-preferred) ids; session must be complete."""
        if not self.complete:
            raise ValueError(
                f"session incomplete: {self.answered}/{self.total} pairs answered"
            )
        out = []
        for (left, right), choice in zip(self.layout, self.choices):
            out.append((left, right) if choice == "left" else (right, left))
        return out


def new_session(
    pairs: PairSet,
    pairs_file: str,
    seed: int = 0,
    scenario: str = "",
    session_id: str | None = None,
) -> Session:
    rng = np.random.default_rng(seed)
    layout = []
    for a, b, _ in pairs.pairs:
        layout.append((a, b) if rng.random() < 0.5 else (b, a))
    now = _now()
    if session_id is None:
        digest = hashlib.sha256(
            json.dumps([seed, [list(p) for p in pairs.pairs]]).encode()
        )
        session_id = digest.hexdigest()[:12]
    return Session(
        id=session_id,
        scenario=scenario,
        pairs_file=pairs_file,
        layout=tuple(layout),
        choices=(None,) * len(layout),
        seed=seed,
        created=now,
        updated=now,
    )


def save_session(path, session: Session) -> None:
    atomic_write_json(
        path,
        {
            "format": FORMAT_SESSION,
            "version": FORMAT_VERSION,
            "id": session.id,
            "scenario": session.scenario,
            "pairs_file": session.pairs_file,
            "layout": [list(p) for p in session.layout],
            "choices": list(session.choices),
            "seed": session.seed,
            "created": session.created,
            "updated": session.updated,
        },
    )


def load_session(path) -> Session:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != FORMAT_SESSION:
        raise ValueError(f"{path}: not a session file")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {doc.get('version')}")
    for key in ("id", "layout", "choices"):
        if key not in doc:
            raise ValueError(f"{path}: corrupt session file (missing {key!r})")
    return Session(
        id=doc["id"],
        scenario=doc.get("scenario", ""),
        pairs_file=doc.get("pairs_file", ""),
        layout=tuple((a, b) for a, b in doc["layout"]),
        choices=tuple(doc["choices"]),
        seed=doc.get("seed", 0),
        created=doc.get("created", ""),
        updated=doc.get("updated", ""),
    )


@dataclass(frozen=True)
class ProjectStore:
    """Standard directory layout for generated artifacts."""

    root: Path
    kinds: tuple[str, ...] = field(
        default=("datasets", "pairs", "sessions", "results"), repr=False
    )

    def __post_init__(self):
        object.__setattr__(self, "root", Path(self.root))

    def ensure(self) -> "ProjectStore":
        for kind in self.kinds:
            (self.root / kind).mkdir(parents=True, exist_ok=True)
        return self

    def path(self, kind: str, name: str) -> Path:
        if kind not in self.kinds:
            raise ValueError(f"unknown artifact kind {kind!r}")
        return self.root / kind / name
