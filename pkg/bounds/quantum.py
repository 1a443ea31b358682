from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

import config
from errors import InvalidInputError, UnsupportedScenarioError
from models.ensemble import MixedEnsemble, QuantumEnsemble
from models.operators import (
    SIGMA_X,
    SIGMA_Z,
    HermitianOperator,
    Povm,
    as_matrix,
    constant_povm,
    ket,
    maximally_mixed,
    observable_to_povm,
    projector,
)
from models.quantum_strategy import QuantumStrategy
from models.scenario import hmin
from models.witness import Witness, witness_value
from solvers.sdp import SdpDiscriminationProblem, SdpSolution, solve_guessing_sdp

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
F1_ONE_BIT = 1.0 + 2.0 * SQRT2
F1_RELAY = 5.0


# ---------------------------------------------------------------------------
# Information of ensembles
# ---------------------------------------------------------------------------


def guessing_solution(e: QuantumEnsemble) -> SdpSolution:
    return solve_guessing_sdp(SdpDiscriminationProblem(e))


def info_from_guessing(prior: Sequence[float], guessing: float) -> float:
    """H_min(X) + log2(P_g), clipped to [0, H_min(X)] against solver noise."""
    h = hmin(prior)
    value = h + math.log2(max(guessing, 1e-300))
    return min(max(value, 0.0), h)


def info_of_ensemble(e: QuantumEnsemble) -> float:
    """
    One-shot accessible information of an ensemble in bits.

    Raises:
        ConvergenceError: When the guessing SDP does not certify its value.
    """
    return info_from_guessing(e.prior, guessing_solution(e).value)


def mixed_guessing(m: MixedEnsemble) -> float:
    return float(sum(w * guessing_solution(e).value for w, e in m.branches if w > 0.0))


def info_of_mixed(m: MixedEnsemble) -> float:
    """Information of a shared-randomness mixture: the branch guessing probabilities are averaged first."""
    return info_from_guessing(m.prior, mixed_guessing(m))


def info_eigen_bound(e: QuantumEnsemble, tol: float = 1e-9) -> tuple[float, bool]:
    """
    Eigenvalue bound log2 d + log2(max_x p_X(x) lambda_max(rho_x) / max_x p_X(x)).

    Returns:
        tuple[float, bool]: The bound and whether it is attained. Every state
        must be flat on its support and p_X(x) lambda_max(rho_x) must not depend
        on x; those two conditions alone admit ensembles that stay below the
        bound (three generic pure qubits), so the flag also requires the
        guessing SDP to reach it within config.EIGEN_TIGHT_TOL.

    Raises:
        ConvergenceError: When the conditions hold and the guessing SDP does not
            certify its value.
    """
    prior = e.prior_array
    spectra = [s.eigvalsh() for s in e.states]
    tops = np.array([float(v.max()) for v in spectra])
    weighted = prior * tops
    bound = math.log2(e.dim) + math.log2(float(weighted.max()) / float(prior.max()))

    flat = all(np.all(np.abs(v[v > tol] - v.max()) <= tol) for v in spectra)
    constant = float(weighted.max() - weighted.min()) <= tol
    if not (flat and constant):
        return bound, False
    attained = abs(info_of_ensemble(e) - bound) <= config.EIGEN_TIGHT_TOL
    if not attained:
        logger.debug("eigenvalue bound %.6f: conditions hold but the ensemble stays below it", bound)
    return bound, attained


def strategy_info_and_value(s: QuantumStrategy, w: Witness) -> tuple[float, float]:
    """Information of the branch ensembles and the witness value of the mixed behavior."""
    info = info_of_mixed(s.mixed_ensemble())
    return info, witness_value(w, s.behavior())


# ---------------------------------------------------------------------------
# Exact half-steps of the seesaw
# ---------------------------------------------------------------------------


def _require_binary(w: Witness) -> None:
    if w.scenario.k != 2:
        raise UnsupportedScenarioError(f"binary-outcome step needs k = 2, witness has k = {w.scenario.k}")


def optimal_binary_measurements(
    states: Sequence[np.ndarray | HermitianOperator], w: Witness
) -> tuple[tuple[Povm, ...], float]:
    """
    Best two-outcome measurements for fixed states.

    For each setting y the witness reads sum_x r_xy1 + Tr(G_y M_0|y) with
    G_y = sum_x (r_xy0 - r_xy1) rho_x, maximised by the projector onto the
    non-negative eigenspace of G_y. Zero eigenvalues go to outcome 0.
    """
    _require_binary(w)
    rhos = np.stack([as_matrix(s) for s in states])
    if rhos.shape[0] != w.scenario.n:
        raise InvalidInputError(f"got {rhos.shape[0]} states for a witness with n = {w.scenario.n}")
    r = w.coefficients
    dim = rhos.shape[1]
    povms = []
    value = 0.0
    for y in range(w.scenario.l):
        g = np.tensordot(r[:, y, 0] - r[:, y, 1], rhos, axes=1)
        values, vectors = np.linalg.eigh(0.5 * (g + g.conj().T))
        keep = values >= -config.HERMITIAN_TOL
        plus = vectors[:, keep] @ vectors[:, keep].conj().T
        povms.append(Povm((HermitianOperator(plus), HermitianOperator(np.eye(dim) - plus))))
        value += float(r[:, y, 1].sum()) + float(values[values > 0].sum())
    return tuple(povms), value


def optimal_states(measurements: Sequence[Povm], w: Witness) -> tuple[list[np.ndarray], float]:
    """
    Best pure states for fixed measurements.

    Each rho_x is the top eigenvector of O_x = sum_{y,b} r_xyb M_{b|y}, which
    maximises the witness when the information constraint is ignored.
    """
    r = w.coefficients
    effects = [m.matrices() for m in measurements]
    states = []
    value = 0.0
    for x in range(w.scenario.n):
        o = sum(r[x, y, b] * effects[y][b] for y in range(w.scenario.l) for b in range(w.scenario.k))
        values, vectors = np.linalg.eigh(0.5 * (o + o.conj().T))
        states.append(projector(vectors[:, -1]))
        value += float(values[-1])
    return states, value


# ---------------------------------------------------------------------------
# Analytic (3,2,2) strategies
# ---------------------------------------------------------------------------


def qubit_f1_ensemble() -> tuple[QuantumEnsemble, tuple[Povm, ...]]:
    """Three qubit states with P_g = 2/3 and the two observables reaching F1 = 1 + 2 sqrt 2."""
    s, c = math.sin(math.pi / 8), math.cos(math.pi / 8)
    states = (
        projector([1.0, 1.0]),
        projector([1.0, 0.0]),
        projector([s, -c]),
    )
    ensemble = QuantumEnsemble.from_matrices((1 / 3, 1 / 3, 1 / 3), states)
    observables = (-(SIGMA_X + SIGMA_Z) / SQRT2, (SIGMA_Z - SIGMA_X) / SQRT2)
    return ensemble, tuple(observable_to_povm(b) for b in observables)


def silent_branch(dim: int = 2, n: int = 3, output: int = 1, l: int = 2, k: int = 2) -> tuple[QuantumEnsemble, tuple[Povm, ...]]:
    """Identical maximally mixed states and measurements that always answer `output`."""
    ensemble = QuantumEnsemble.from_matrices([1.0 / n] * n, [maximally_mixed(dim)] * n)
    return ensemble, tuple(constant_povm(dim, k, output) for _ in range(l))


def relay_branch(n: int = 3) -> tuple[QuantumEnsemble, tuple[Povm, ...]]:
    """Orthogonal qutrit relay: Bob answers 0 only on the inputs F1 rewards, giving F1 = 5."""
    if n != 3:
        raise UnsupportedScenarioError("the F1 relay branch is defined for n = 3")
    ensemble = QuantumEnsemble.from_matrices([1 / 3] * 3, [projector(ket(3, x)) for x in range(3)])
    measurements = []
    for target in (2, 1):
        plus = projector(ket(3, target))
        measurements.append(Povm((HermitianOperator(plus), HermitianOperator(np.eye(3) - plus))))
    return ensemble, tuple(measurements)


def mixed_f1_strategy(q: float, second: str = "silent") -> QuantumStrategy:
    """
    Shared-randomness mixture of the one-bit qubit strategy (weight q) and a second branch.

    Args:
        q (float): Weight of the qubit branch, in [0, 1].
        second (str): "silent" (information log2(1+q)) or "relay" (log2(3-q)).

    Returns:
        QuantumStrategy: The two-branch strategy.
    """
    if not 0.0 <= q <= 1.0:
        raise InvalidInputError(f"mixing weight q must lie in [0, 1], got {q!r}")
    ensemble, measurements = qubit_f1_ensemble()
    if second == "silent":
        other = silent_branch()
    elif second == "relay":
        other = relay_branch()
    else:
        raise InvalidInputError(f"second branch must be 'silent' or 'relay', got {second!r}")
    return QuantumStrategy(((q, ensemble, measurements), (1.0 - q, *other)))


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not -config.PROBABILITY_TOL <= alpha <= config.LOG2_3 + config.PROBABILITY_TOL:
        raise InvalidInputError(f"alpha must lie in [0, log2 3], got {alpha!r}")
    return min(max(alpha, 0.0), config.LOG2_3)


def analytic_f1_curve(alpha: float) -> float:
    """Value of the two analytic strategy families at information alpha."""
    alpha = _check_alpha(alpha)
    if alpha <= 1.0:
        q = 2.0**alpha - 1.0
        return 1.0 + 2.0 * SQRT2 * q
    q = 3.0 - 2.0**alpha
    return F1_ONE_BIT * q + F1_RELAY * (1.0 - q)


def analytic_f1_strategy(alpha: float) -> QuantumStrategy:
    """The strategy behind analytic_f1_curve(alpha)."""
    alpha = _check_alpha(alpha)
    if alpha <= 1.0:
        return mixed_f1_strategy(min(1.0, 2.0**alpha - 1.0), "silent")
    return mixed_f1_strategy(min(1.0, max(0.0, 3.0 - 2.0**alpha)), "relay")
