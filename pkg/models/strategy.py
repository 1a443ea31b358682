from __future__ import annotations

from dataclasses import dataclass

from errors import InvalidInputError
from models.behavior import Behavior


@dataclass(frozen=True)
class DeterministicStrategy:
    """
    Classical encoding E: [n] -> [d] and decoding D: [d] x [l] -> [k].

    Labels are zero-based: `encoding[x]` is the message for input x and
    `decoding[m][y]` is Bob's output for message m and setting y.
    """

    encoding: tuple[int, ...]
    decoding: tuple[tuple[int, ...], ...]
    k: int

    def __post_init__(self) -> None:
        encoding = tuple(int(m) for m in self.encoding)
        decoding = tuple(tuple(int(b) for b in row) for row in self.decoding)
        if not encoding or not decoding:
            raise InvalidInputError("strategy needs a non-empty encoding and decoding")
        d = len(decoding)
        l = len(decoding[0])
        if any(len(row) != l for row in decoding) or l < 1:
            raise InvalidInputError("decoding rows must all have l >= 1 entries")
        if any(not 0 <= m < d for m in encoding):
            raise InvalidInputError(f"encoding uses messages outside [0, {d})")
        if any(not 0 <= b < self.k for row in decoding for b in row):
            raise InvalidInputError(f"decoding uses outputs outside [0, {self.k})")
        object.__setattr__(self, "encoding", encoding)
        object.__setattr__(self, "decoding", decoding)

    @property
    def n(self) -> int:
        return len(self.encoding)

    @property
    def d(self) -> int:
        return len(self.decoding)

    @property
    def l(self) -> int:
        return len(self.decoding[0])

    def output(self, x: int, y: int) -> int:
        return self.decoding[self.encoding[x]][y]


@dataclass(frozen=True, eq=False)
class Vertex:
    """Deterministic behavior of the classical polytope and its minimal guessing cost."""

    behavior: Behavior
    cost: float

    def __post_init__(self) -> None:
        floor = self.behavior.scenario.max_prior
        if not floor - 1e-12 <= self.cost <= 1.0 + 1e-12:
            raise InvalidInputError(f"vertex cost {self.cost!r} outside [{floor!r}, 1]")
