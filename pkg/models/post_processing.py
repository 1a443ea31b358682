from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import config
from errors import InvalidInputError


@dataclass(frozen=True, eq=False)
class PostProcessing:
    """Bob's relabelling p(b'|y,b), b' in [n], stored as a (y, b, b') tensor."""

    table: np.ndarray

    def __post_init__(self) -> None:
        table = np.array(self.table, dtype=float)
        if table.ndim != 3:
            raise InvalidInputError("post-processing table must be indexed (y, b, b')")
        if table.min() < -config.STATE_TOL:
            raise InvalidInputError("post-processing entries must be non-negative")
        if np.abs(table.sum(axis=2) - 1.0).max() > config.STATE_TOL:
            raise InvalidInputError("every (y, b) row of a post-processing must sum to 1")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def deterministic(cls, guesses: np.ndarray, n: int) -> PostProcessing:
        """b' = guesses[y, b] with probability one."""
        guesses = np.asarray(guesses, dtype=int)
        table = np.zeros(guesses.shape + (n,))
        ys, bs = np.indices(guesses.shape)
        table[ys, bs, guesses] = 1.0
        return cls(table)

    def guessing_per_setting(self, prior: np.ndarray, behavior_table: np.ndarray) -> np.ndarray:
        """sum_{x,b} p_X(x) p(b|x,y) p(b'=x|y,b) for every y."""
        n = behavior_table.shape[0]
        hits = self.table[:, :, :n]
        return np.einsum("x,xyb,ybx->y", prior, behavior_table, hits)
