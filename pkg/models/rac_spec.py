from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from errors import InvalidInputError


class RacVariant(str, Enum):
    AVERAGE = "average"
    WORST_CASE = "worst_case"


@dataclass(frozen=True)
class RacSpec:
    """Random access code on n_bits input bits, compared against an m-bit budget."""

    n_bits: int
    m: int = 1
    variant: RacVariant = RacVariant.AVERAGE

    def __post_init__(self) -> None:
        if int(self.n_bits) != self.n_bits or self.n_bits < 1:
            raise InvalidInputError(f"n_bits must be a positive integer, got {self.n_bits!r}")
        if int(self.m) != self.m or self.m < 1:
            raise InvalidInputError(f"m must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "variant", RacVariant(self.variant))

    @property
    def inputs(self) -> int:
        return 2**self.n_bits

    def bit(self, x: int, y: int) -> int:
        """Bit x_y of input x; x_1 is the most significant bit."""
        return (x >> (self.n_bits - 1 - y)) & 1
