"""Sum-dependent target functions and alphabet separation.

A :class:`FunctionSpec` describes a function of the total ``X1 + X2 + ...``
of the node measurements. :func:`separate` merges the letters of one node
that no value of the other side can tell apart.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Hashable, Optional, Sequence

from .errors import DomainError

THRESHOLD = "threshold"
INTERVAL = "interval"
GENERAL = "general"


@dataclass(frozen=True)
class FunctionSpec:
    kind: str
    theta: int = 0
    a: int = 0
    b: int = 0
    table: tuple = ()

    def __post_init__(self):
        if self.kind == THRESHOLD:
            if self.theta < 0:
                raise DomainError(f"threshold must be >= 0, got {self.theta}")
        elif self.kind == INTERVAL:
            if self.a < 0 or self.b < 0:
                raise DomainError("interval endpoints must be >= 0")
            if self.a > self.b:
                raise DomainError(f"interval needs a <= b, got [{self.a}, {self.b}]")
        elif self.kind == GENERAL:
            if not self.table:
                raise DomainError("general function needs a non-empty table")
            object.__setattr__(self, "table", tuple(self.table))
        else:
            raise DomainError(f"unknown function kind {self.kind!r}")

    @classmethod
    def threshold(cls, theta: int) -> "FunctionSpec":
        return cls(THRESHOLD, theta=theta)

    @classmethod
    def interval(cls, a: int, b: int) -> "FunctionSpec":
        return cls(INTERVAL, a=a, b=b)

    @classmethod
    def general(cls, table: Sequence[Hashable]) -> "FunctionSpec":
        return cls(GENERAL, table=tuple(table))

    def __call__(self, total: int):
        return evaluate(self, total)

    @property
    def is_boolean(self) -> bool:
        if self.kind != GENERAL:
            return True
        return all(v in (0, 1) for v in self.table)

    def is_constant(self, max_sum: int) -> bool:
        """True if the function takes one value on every sum in ``0..max_sum``."""
        return len({evaluate(self, s) for s in range(max_sum + 1)}) == 1

    def to_dict(self) -> dict:
        if self.kind == THRESHOLD:
            return {"kind": THRESHOLD, "theta": self.theta}
        if self.kind == INTERVAL:
            return {"kind": INTERVAL, "a": self.a, "b": self.b}
        return {"kind": GENERAL, "table": list(self.table)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "FunctionSpec":
        try:
            kind = obj["kind"]
            if kind == THRESHOLD:
                return cls.threshold(int(obj["theta"]))
            if kind == INTERVAL:
                return cls.interval(int(obj["a"]), int(obj["b"]))
            if kind == GENERAL:
                return cls.general(obj["table"])
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed function spec {obj!r}: {exc}") from exc
        raise DomainError(f"unknown function kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "FunctionSpec":
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        if self.kind == THRESHOLD:
            return f"threshold(theta={self.theta})"
        if self.kind == INTERVAL:
            return f"interval([{self.a}, {self.b}])"
        return f"general({list(self.table)})"


def evaluate(spec: FunctionSpec, total: int):
    """Value of ``spec`` at the given total sum."""
    if total < 0:
        raise DomainError(f"sum must be nonnegative, got {total}")
    if spec.kind == THRESHOLD:
        return 1 if total >= spec.theta else 0
    if spec.kind == INTERVAL:
        return 1 if spec.a <= total <= spec.b else 0
    if total >= len(spec.table):
        raise DomainError(f"sum {total} outside the table (defined on 0..{len(spec.table) - 1})")
    return spec.table[total]


@dataclass(frozen=True)
class SeparationPartition:
    """Equivalence classes of one node's letters ``0..own_max``.

    ``classes`` are ordered by smallest member. ``a0_class`` / ``a1_class``
    index the class whose row is constantly 0 / 1, if any.
    """

    classes: tuple[tuple[int, ...], ...]
    rows: tuple[tuple, ...]
    a0_class: Optional[int] = None
    a1_class: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.classes)

    @property
    def constant_classes(self) -> frozenset[int]:
        return frozenset(c for c in (self.a0_class, self.a1_class) if c is not None)

    @property
    def ambiguous(self) -> tuple[int, ...]:
        """Class indices that still need a reply from the other side."""
        const = self.constant_classes
        return tuple(i for i in range(self.size) if i not in const)

    @property
    def scheme_size(self) -> int:
        """``2l - |A0| - |A1|``: the Kraft sum base of the coding scheme."""
        return 2 * self.size - len(self.constant_classes)

    def class_of(self, letter: int) -> int:
        for idx, members in enumerate(self.classes):
            if letter in members:
                return idx
        raise DomainError(f"letter {letter} not in alphabet 0..{self.classes[-1][-1]}")

    def lookup(self) -> tuple[int, ...]:
        """``lookup()[x]`` is the class index of letter ``x``."""
        out = [0] * (max(max(c) for c in self.classes) + 1)
        for idx, members in enumerate(self.classes):
            for x in members:
                out[x] = idx
        return tuple(out)

    def representative(self, idx: int) -> int:
        return self.classes[idx][0]


def separate(spec: FunctionSpec, own_max: int, other_max: int) -> SeparationPartition:
    """Partition ``0..own_max`` by the row ``y -> f(x + y)``, ``y in 0..other_max``.

    Letters with equal rows need not be told apart. Classes are ordered by
    their smallest letter; a class with an all-0 (all-1) row is reported as
    ``a0_class`` (``a1_class``).
    """
    if own_max < 0 or other_max < 0:
        raise DomainError("alphabet maxima must be >= 0")
    if spec.kind == GENERAL and len(spec.table) < own_max + other_max + 1:
        raise DomainError(
            f"general table has {len(spec.table)} entries, needs {own_max + other_max + 1}"
        )
    by_row: dict[tuple, list[int]] = {}
    for x in range(own_max + 1):
        row = tuple(evaluate(spec, x + y) for y in range(other_max + 1))
        by_row.setdefault(row, []).append(x)
    # dict preserves first-seen order, i.e. increasing smallest letter
    classes = tuple(tuple(v) for v in by_row.values())
    rows = tuple(by_row.keys())
    a0 = a1 = None
    for idx, row in enumerate(rows):
        if all(v == 0 for v in row):
            a0 = idx
        elif all(v == 1 for v in row):
            a1 = idx
    return SeparationPartition(classes, rows, a0, a1)
