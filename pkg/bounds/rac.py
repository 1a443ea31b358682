from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

import config
from bounds.quantum import info_of_ensemble
from errors import InvalidInputError
from models.behavior import Behavior
from models.ea_strategy import EaStrategy
from models.ensemble import QuantumEnsemble, behavior_from_quantum
from models.operators import (
    SIGMA_I,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    HermitianOperator,
    Povm,
    observable_to_povm,
    partial_trace,
    random_density_matrix,
    random_povm,
)
from models.rac_spec import RacSpec, RacVariant
from models.scenario import Scenario
from solvers.sdp import SdpDiscriminationProblem, solve_guessing_sdp

logger = logging.getLogger(__name__)

# B_1..B_4 of the four-bit construction; term j of each state carries sign (-1)^{x_j}.
FOUR_BIT_OBSERVABLES = (
    np.kron(SIGMA_X, SIGMA_X),
    np.kron(SIGMA_Y, SIGMA_X),
    np.kron(SIGMA_Z, SIGMA_X),
    np.kron(SIGMA_I, SIGMA_Y),
)


def rac_scenario(spec: RacSpec) -> Scenario:
    return Scenario.uniform(spec.inputs, spec.n_bits, 2)


def _hits(p: Behavior, spec: RacSpec) -> np.ndarray:
    if p.scenario.shape != (spec.inputs, spec.n_bits, 2):
        raise InvalidInputError(
            f"behavior shape {p.scenario.shape} does not fit a {spec.n_bits}-bit RAC "
            f"({spec.inputs}, {spec.n_bits}, 2)"
        )
    x, y = np.indices((spec.inputs, spec.n_bits))
    bits = (x >> (spec.n_bits - 1 - y)) & 1
    return p.table[x, y, bits]


def rac_score(p: Behavior, spec: RacSpec) -> float:
    """
    Average or worst-case probability that Bob outputs the requested bit.

    Raises:
        InvalidInputError: When the behavior is not shaped (2^n, n, 2).
    """
    hits = _hits(p, spec)
    if spec.variant is RacVariant.WORST_CASE:
        return float(hits.min())
    return float(hits.mean())


def build_four_bit_ensemble() -> tuple[QuantumEnsemble, tuple[Povm, ...]]:
    """
    Sixteen rank-two states on two qubits carrying one bit, scoring 3/4 on every (x, y).

    Term j of rho_x enters with sign +(-1)^{x_j}, so a zero bit sits in the +1
    eigenspace of B_j and is read as outcome 0 of observable_to_povm. The
    opposite sign would pair bit 0 with the -1 eigenspace and score 1/4.

    Returns:
        tuple[QuantumEnsemble, tuple[Povm, ...]]: Uniform ensemble over x = x_1..x_4
        (x_1 most significant) and the eigenprojector POVMs of B_1..B_4.
    """
    spec = RacSpec(4)
    states = []
    for x in range(spec.inputs):
        rho = 2.0 * np.eye(4, dtype=complex)
        for j, observable in enumerate(FOUR_BIT_OBSERVABLES):
            rho = rho + (-1) ** spec.bit(x, j) * observable
        states.append(rho / 8.0)
    ensemble = QuantumEnsemble.from_matrices([1.0 / spec.inputs] * spec.inputs, states)
    return ensemble, tuple(observable_to_povm(b) for b in FOUR_BIT_OBSERVABLES)


def qubit_rac_reference(n_bits: int) -> tuple[QuantumEnsemble, tuple[Povm, ...]]:
    """Pure-qubit RAC with Bloch vectors on square (n=2) or cube (n=3) vertices."""
    if n_bits not in (2, 3):
        raise InvalidInputError(f"qubit reference RACs exist for n_bits in {{2, 3}}, got {n_bits}")
    paulis = (SIGMA_X, SIGMA_Z) if n_bits == 2 else (SIGMA_X, SIGMA_Y, SIGMA_Z)
    spec = RacSpec(n_bits)
    states = []
    for x in range(spec.inputs):
        bloch = sum((-1) ** spec.bit(x, j) * sigma for j, sigma in enumerate(paulis)) / math.sqrt(n_bits)
        states.append(0.5 * (SIGMA_I + bloch))
    ensemble = QuantumEnsemble.from_matrices([1.0 / spec.inputs] * spec.inputs, states)
    return ensemble, tuple(observable_to_povm(s) for s in paulis)


def worst_case_reference(n_bits: int) -> tuple[QuantumEnsemble, tuple[Povm, ...]]:
    """Constructions reaching 1/2 + 1/(2 sqrt n) in the worst case for n in {2, 3, 4}."""
    if n_bits == 4:
        return build_four_bit_ensemble()
    return qubit_rac_reference(n_bits)


def qudit_worst_case_ceiling(spec: RacSpec) -> float | None:
    """1/2 once n_bits >= 4^m: m bits of information cannot beat guessing in the worst case."""
    if spec.n_bits >= 4**spec.m:
        return 0.5
    return None


# ---------------------------------------------------------------------------
# Entanglement-assisted classical communication
# ---------------------------------------------------------------------------


def _conditional_states(strategy: EaStrategy, x: int) -> list[tuple[float, int, np.ndarray]]:
    """(p(a|x), label, unnormalised sigma) for outcomes with non-zero probability."""
    d_a, d_b = strategy.dims
    rho = strategy.shared_state.entries
    parts = []
    for a, effect in enumerate(strategy.alice_povms[x].matrices()):
        steered = partial_trace(np.kron(effect, np.eye(d_b)) @ rho, (d_a, d_b), keep=1)
        weight = float(np.trace(steered).real)
        if weight > 1e-15:
            parts.append((weight, strategy.message_labels[x][a], steered))
    return parts


def _uniform(n: int) -> tuple[float, ...]:
    return tuple([1.0 / n] * n)


def ea_to_qc(strategy: EaStrategy, prior: Sequence[float] | None = None) -> QuantumEnsemble:
    """
    Classical-quantum states tau_x = sum_a p(a|x) |m_a><m_a| (x) sigma_{a|x}.

    Args:
        strategy (EaStrategy): Entanglement-assisted protocol.
        prior (Sequence[float] | None): Prior over x; uniform when omitted.

    Returns:
        QuantumEnsemble: Messages of dimension d * d_B reproducing the EA behavior.
    """
    prior = _uniform(strategy.n) if prior is None else tuple(prior)
    d = strategy.message_dim
    states = []
    for x in range(strategy.n):
        tau = np.zeros((d * strategy.dims[1],) * 2, dtype=complex)
        for _, label, steered in _conditional_states(strategy, x):
            tau = tau + np.kron(strategy.message_state(label), steered)
        states.append(tau)
    return QuantumEnsemble.from_matrices(prior, states)


def ea_behavior(strategy: EaStrategy, prior: Sequence[float] | None = None) -> Behavior:
    """p(b|x,y) = sum_a Tr[(A_{a|x} (x) M^{m_a}_{b|y}) rho_AB] with M^m the block Bob applies on message m."""
    prior = _uniform(strategy.n) if prior is None else tuple(prior)
    d_a, d_b = strategy.dims
    d = strategy.message_dim
    rho = strategy.shared_state.entries
    scenario = Scenario(strategy.n, strategy.l, strategy.k, prior)
    table = np.zeros(scenario.shape)
    for y, povm in enumerate(strategy.bob_povms):
        blocks = [e.reshape(d, d_b, d, d_b) for e in povm.matrices()]
        for x in range(strategy.n):
            for a, effect in enumerate(strategy.alice_povms[x].matrices()):
                m = strategy.message_labels[x][a]
                for b, block in enumerate(blocks):
                    joint = np.kron(effect, block[m, :, m, :])
                    table[x, y, b] += float(np.trace(joint @ rho).real)
    return Behavior(scenario, np.clip(table, 0.0, 1.0))


@dataclass(frozen=True)
class EaCeilingReport:
    """Outcome of the three checks behind P_g(QC) <= d * max_x p_X(x)."""

    no_signaling_deviation: float
    guessing: float
    ceiling: float
    behavior_deviation: float

    @property
    def no_signaling_ok(self) -> bool:
        return self.no_signaling_deviation <= 1e-9

    @property
    def ceiling_ok(self) -> bool:
        return self.guessing <= self.ceiling + config.VALUE_ACCURACY

    @property
    def behavior_ok(self) -> bool:
        return self.behavior_deviation <= 1e-9

    @property
    def passed(self) -> bool:
        return self.no_signaling_ok and self.ceiling_ok and self.behavior_ok

    def violations(self) -> list[str]:
        names = []
        if not self.no_signaling_ok:
            names.append(f"remote states average to rho_B only within {self.no_signaling_deviation:.3e}")
        if not self.ceiling_ok:
            names.append(f"guessing probability {self.guessing:.9f} above {self.ceiling:.9f}")
        if not self.behavior_ok:
            names.append(f"cq behavior deviates from the EA behavior by {self.behavior_deviation:.3e}")
        return names


def verify_ea_ceiling(strategy: EaStrategy, prior: Sequence[float] | None = None) -> EaCeilingReport:
    prior = _uniform(strategy.n) if prior is None else tuple(prior)
    d_a, d_b = strategy.dims
    rho_b = partial_trace(strategy.shared_state.entries, (d_a, d_b), keep=1)
    deviation = 0.0
    for x in range(strategy.n):
        averaged = sum((s for _, _, s in _conditional_states(strategy, x)), np.zeros_like(rho_b))
        deviation = max(deviation, float(np.abs(averaged - rho_b).max()))

    ensemble = ea_to_qc(strategy, prior)
    guessing = solve_guessing_sdp(SdpDiscriminationProblem(ensemble)).value
    ceiling = strategy.message_dim * max(prior)

    direct = ea_behavior(strategy, prior)
    via_tau = behavior_from_quantum(ensemble, strategy.bob_povms, direct.scenario)
    behavior_deviation = float(np.abs(direct.table - via_tau.table).max())
    report = EaCeilingReport(deviation, guessing, ceiling, behavior_deviation)
    if not report.passed:
        logger.warning("EA ceiling check failed: %s", "; ".join(report.violations()))
    return report


def random_ea_strategy(
    rng: np.random.Generator,
    d: int,
    dim_a: int,
    dim_b: int,
    outcomes: int,
    n: int,
    l: int,
    k: int = 2,
) -> EaStrategy:
    """Random shared state, Alice POVMs with random message labels, and Bob POVMs on message (x) B."""
    shared = random_density_matrix(dim_a * dim_b, rng)
    alice = tuple(random_povm(dim_a, outcomes, rng) for _ in range(n))
    labels = tuple(tuple(int(m) for m in rng.integers(0, d, size=outcomes)) for _ in range(n))
    bob = tuple(random_povm(d * dim_b, k, rng) for _ in range(l))
    return EaStrategy(HermitianOperator(shared), (dim_a, dim_b), alice, labels, d, bob)


def rac_table(n_values: Sequence[int] = (2, 3, 4)) -> list[dict]:
    """Rows (n_bits, variant, score, info_bits) of the reference constructions."""
    rows = []
    for n_bits in n_values:
        ensemble, measurements = worst_case_reference(n_bits)
        info = info_of_ensemble(ensemble)
        for variant in RacVariant:
            spec = RacSpec(n_bits, variant=variant)
            behavior = behavior_from_quantum(ensemble, measurements, rac_scenario(spec))
            rows.append(
                {
                    "n_bits": n_bits,
                    "variant": variant.value,
                    "score": rac_score(behavior, spec),
                    "info_bits": info,
                }
            )
    return rows
