from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

import config
from errors import ConvergenceError, InvalidInputError
from models.ensemble import QuantumEnsemble
from models.operators import HermitianOperator, Povm

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SdpDiscriminationProblem:
    """max_{N} sum_x p_X(x) Tr(rho_x N_x) over POVMs {N_x}."""

    ensemble: QuantumEnsemble

    def __post_init__(self) -> None:
        if self.ensemble.dim > config.SDP_MAX_DIM:
            raise InvalidInputError(f"dimension {self.ensemble.dim} above the dense limit {config.SDP_MAX_DIM}")
        if self.ensemble.n > config.SDP_MAX_STATES:
            raise InvalidInputError(f"{self.ensemble.n} states above the limit {config.SDP_MAX_STATES}")


@dataclass(frozen=True, eq=False)
class SdpSolution:
    """
    Certified guessing probability.

    `lower` is the value of the returned POVM, `upper` is Tr(Y) for the dual
    certificate Y, which satisfies Y - p_X(x) rho_x >= 0 for every x.
    """

    value: float
    povm: Povm
    certificate: HermitianOperator
    lower: float
    upper: float
    outer_iterations: int = 0
    newton_steps: int = 0

    @property
    def gap(self) -> float:
        return self.upper - self.lower


@lru_cache(maxsize=None)
def hermitian_basis(dim: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of d x d Hermitian matrices, shape (d*d, d, d)."""
    basis = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(dim):
        for j in range(i + 1, dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(e)
            f = np.zeros((dim, dim), dtype=complex)
            f[i, j] = -1j / np.sqrt(2.0)
            f[j, i] = 1j / np.sqrt(2.0)
            basis.append(f)
    stacked = np.stack(basis)
    stacked.setflags(write=False)
    return stacked


def _cholesky_ok(matrix: np.ndarray) -> np.ndarray | None:
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        return None


class GuessingSdpSolver:
    """
    Barrier method on the dual  min Tr(Y)  s.t.  Y >= p_X(x) rho_x  for all x.

    The single Hermitian variable Y is parameterised in an orthonormal
    Hermitian basis and centred by damped Newton steps for an increasing
    barrier weight t. On the central path N_x = (Y - p_X(x) rho_x)^{-1} / t is a
    POVM, which gives the primal certificate after a final projection onto
    sum_x N_x = 1.
    """

    def __init__(
        self,
        gap_tol: float = config.SDP_GAP_TOL,
        t0: float = config.SDP_BARRIER_T0,
        mu: float = config.SDP_BARRIER_MU,
        max_outer: int = config.SDP_MAX_OUTER,
        max_newton: int = config.SDP_MAX_NEWTON,
        newton_tol: float = config.SDP_NEWTON_TOL,
        accuracy: float = config.VALUE_ACCURACY,
    ):
        self.gap_tol = gap_tol
        self.t0 = t0
        self.mu = mu
        self.max_outer = max_outer
        self.max_newton = max_newton
        self.newton_tol = newton_tol
        self.accuracy = accuracy
        self.newton_steps = 0

    def _barrier(self, y: np.ndarray, targets: np.ndarray, t: float) -> float | None:
        total = t * float(np.trace(y).real)
        for a in targets:
            chol = _cholesky_ok(y - a)
            if chol is None:
                return None
            total -= 2.0 * float(np.log(np.abs(np.diag(chol))).sum())
        return total

    def _center(self, y: np.ndarray, targets: np.ndarray, t: float) -> tuple[np.ndarray, bool]:
        dim = y.shape[0]
        basis = hermitian_basis(dim)
        rows = basis.reshape(dim * dim, -1)
        identity = np.eye(dim)
        current = self._barrier(y, targets, t)
        for _ in range(self.max_newton):
            inverses = np.linalg.inv(y[None, :, :] - targets)
            gradient_matrix = t * identity - inverses.sum(axis=0)
            kernel = sum(np.kron(w, w.T) for w in inverses)
            hessian = np.real(rows.conj() @ kernel @ rows.T)
            gradient = np.real(rows.conj() @ gradient_matrix.reshape(-1))
            # Jacobi-scaled solve
            scale = 1.0 / np.sqrt(np.maximum(np.diag(hessian), 1e-300))
            try:
                step = -scale * scipy.linalg.solve(
                    hessian * np.outer(scale, scale), scale * gradient, assume_a="pos"
                )
            except (np.linalg.LinAlgError, ValueError):
                return y, False
            decrement = float(-gradient @ step)
            if decrement / 2.0 <= max(self.newton_tol, 1e-14 * abs(current)):
                return y, True
            direction = np.tensordot(step, basis, axes=1)
            direction = 0.5 * (direction + direction.conj().T)
            size = 1.0
            while size > 1e-14:
                candidate = y + size * direction
                value = self._barrier(candidate, targets, t)
                if value is not None and value <= current - 0.25 * size * decrement:
                    break
                size *= 0.5
            else:
                return y, False
            y, current = candidate, value
            self.newton_steps += 1
        return y, True

    @staticmethod
    def _recover_povm(y: np.ndarray, targets: np.ndarray, t: float) -> list[np.ndarray]:
        dim = y.shape[0]
        effects = [np.linalg.inv(y - a) / t for a in targets]
        effects = [0.5 * (e + e.conj().T) for e in effects]
        total = sum(effects) + config.SDP_REGULARIZATION * np.eye(dim)
        root = scipy.linalg.inv(scipy.linalg.sqrtm(total))
        root = 0.5 * (root + root.conj().T)
        effects = [root @ e @ root for e in effects]
        effects = [0.5 * (e + e.conj().T) for e in effects]
        # Clip tiny negative eigenvalues, then move the completeness residual onto the largest effect.
        clipped = []
        for e in effects:
            values, vectors = np.linalg.eigh(e)
            clipped.append((vectors * np.maximum(values, 0.0)) @ vectors.conj().T)
        residual = np.eye(dim) - sum(clipped)
        largest = int(np.argmax([np.trace(e).real for e in clipped]))
        clipped[largest] = clipped[largest] + residual
        return clipped

    def solve(self, problem: SdpDiscriminationProblem) -> SdpSolution:
        ensemble = problem.ensemble
        targets = np.stack(ensemble.weighted())
        dim, count = ensemble.dim, ensemble.n
        self.newton_steps = 0

        top = max(float(np.linalg.eigvalsh(a).max()) for a in targets)
        y = (top + 1.0) * np.eye(dim, dtype=complex)
        t = self.t0
        outer = 0
        stalled = False
        while True:
            y, centred = self._center(y, targets, t)
            outer += 1
            if not centred:
                stalled = True
                break
            if count * dim / t <= self.gap_tol or outer >= self.max_outer:
                break
            t *= self.mu

        effects = self._recover_povm(y, targets, t)
        lower = float(sum(np.trace(a @ e).real for a, e in zip(targets, effects)))
        upper = float(np.trace(y).real)
        gap = upper - lower
        logger.debug(
            "guessing SDP: lower %.12g upper %.12g after %d outer / %d Newton steps",
            lower, upper, outer, self.newton_steps,
        )
        if gap > self.accuracy:
            raise ConvergenceError(
                f"guessing SDP stopped with gap {gap:.3e} (lower {lower:.9f}, upper {upper:.9f})",
                lower=lower,
                upper=upper,
            )
        if stalled:
            logger.warning("guessing SDP stalled at t=%.3e but gap %.3e is within accuracy", t, gap)

        povm = Povm(tuple(HermitianOperator(e) for e in effects))
        value = 0.5 * (lower + upper)
        return SdpSolution(
            value=value,
            povm=povm,
            certificate=HermitianOperator(0.5 * (y + y.conj().T)),
            lower=lower,
            upper=upper,
            outer_iterations=outer,
            newton_steps=self.newton_steps,
        )


def solve_guessing_sdp(problem: SdpDiscriminationProblem) -> SdpSolution:
    """
    Optimal guessing probability of an ensemble with primal and dual certificates.

    Raises:
        ConvergenceError: When the certified gap stays above the accuracy target.
    """
    return GuessingSdpSolver().solve(problem)


def guessing_probability(ensemble: QuantumEnsemble) -> float:
    return solve_guessing_sdp(SdpDiscriminationProblem(ensemble)).value
