from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from errors import InvalidInputError
from models.operators import HermitianOperator, Povm, check_density_matrix


@dataclass(frozen=True, eq=False)
class EaStrategy:
    """
    Entanglement-assisted classical communication of a d-valued message.

    Alice measures `alice_povms[x]` on her half of `shared_state` (A tensor B),
    sends the label `message_labels[x][a]` in [d], and Bob measures
    `bob_povms[y]` on the message register tensor his half B. The message
    register is modelled by diagonal basis states |m><m| of dimension d.
    """

    shared_state: HermitianOperator
    dims: tuple[int, int]
    alice_povms: tuple[Povm, ...]
    message_labels: tuple[tuple[int, ...], ...]
    message_dim: int
    bob_povms: tuple[Povm, ...]

    def __post_init__(self) -> None:
        state = self.shared_state
        if not isinstance(state, HermitianOperator):
            state = HermitianOperator(state)
        d_a, d_b = (int(v) for v in self.dims)
        if state.dim != d_a * d_b:
            raise InvalidInputError(f"shared state has dimension {state.dim}, dims give {d_a * d_b}")
        check_density_matrix(state)
        if self.message_dim < 1:
            raise InvalidInputError("message dimension must be >= 1")
        if len(self.alice_povms) != len(self.message_labels):
            raise InvalidInputError("need one message-label row per Alice input")
        for x, (povm, labels) in enumerate(zip(self.alice_povms, self.message_labels)):
            if povm.dim != d_a:
                raise InvalidInputError(f"Alice's measurement {x} acts on dimension {povm.dim}, expected {d_a}")
            if len(labels) != povm.outcomes:
                raise InvalidInputError(f"input {x} needs one message label per outcome")
            if any(not 0 <= m < self.message_dim for m in labels):
                raise InvalidInputError(f"input {x} uses message labels outside [0, {self.message_dim})")
        for y, povm in enumerate(self.bob_povms):
            if povm.dim != self.message_dim * d_b:
                raise InvalidInputError(
                    f"Bob's measurement {y} acts on dimension {povm.dim}, expected {self.message_dim * d_b}"
                )
        if len({p.outcomes for p in self.bob_povms}) != 1:
            raise InvalidInputError("Bob's measurements must share one outcome count")
        object.__setattr__(self, "shared_state", state)
        object.__setattr__(self, "dims", (d_a, d_b))
        object.__setattr__(
            self, "message_labels", tuple(tuple(int(m) for m in row) for row in self.message_labels)
        )

    @property
    def n(self) -> int:
        return len(self.alice_povms)

    @property
    def l(self) -> int:
        return len(self.bob_povms)

    @property
    def k(self) -> int:
        return self.bob_povms[0].outcomes

    def message_state(self, label: int) -> np.ndarray:
        mu = np.zeros((self.message_dim, self.message_dim), dtype=complex)
        mu[label, label] = 1.0
        return mu
