"""Symmetric Lanczos three-term recurrence as a resumable stepper.

The stepper form keeps only the rolling pair of basis vectors, which is all
the quadrature-bound and solve paths need; :func:`lanczos_run` additionally
stores the basis when the caller wants the factorization ``Z Q_k =
Q_{k+1} T_{k+1,k}``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .operators import LinearOperator

__all__ = ["LanczosState", "lanczos_step", "lanczos_run", "LanczosFactorization"]

BREAKDOWN_RTOL = 1e-14


@dataclass
class LanczosState:
    """Rolling state of the recurrence: two basis vectors plus the recorded
    tridiagonal coefficients.

    ``reorth_window > 0`` enables local reorthogonalization: the freshly
    orthogonalized vector is re-projected against that many recent basis
    vectors.  On breakdown (``beta`` numerically zero) ``q_curr`` is zeroed
    and the state refuses further steps; callers treat breakdown as exact
    convergence of the Krylov space.
    """

    q_prev: np.ndarray
    q_curr: np.ndarray
    beta_prev: float
    step: int
    alphas: list[float]
    betas: list[float]
    breakdown: bool = False
    reorth_window: int = 0
    _window: deque = field(default_factory=deque, repr=False)

    @classmethod
    def start(cls, v: np.ndarray, reorth_window: int = 0) -> "LanczosState":
        v = np.asarray(v, dtype=np.float64)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("start vector must be nonzero")
        q0 = v / norm
        state = cls(
            q_prev=np.zeros_like(q0),
            q_curr=q0,
            beta_prev=0.0,
            step=0,
            alphas=[],
            betas=[],
            reorth_window=reorth_window,
            _window=deque(maxlen=max(reorth_window, 1)),
        )
        if reorth_window > 0:
            state._window.append(q0)
        return state


def lanczos_step(op: LinearOperator, state: LanczosState) -> tuple[float, float]:
    """Advance the recurrence one step, consuming exactly one matvec.

    Returns the new ``(alpha, beta)`` pair and mutates ``state`` in place.
    ``beta == 0.0`` signals breakdown: the Krylov space is invariant and the
    tridiagonal factorization is exact.
    """
    if state.breakdown:
        raise RuntimeError("cannot step a broken-down Lanczos state")
    z = op.apply(state.q_curr)
    raw_norm = float(np.linalg.norm(z))
    alpha = float(state.q_curr @ z)
    z = z - alpha * state.q_curr - state.beta_prev * state.q_prev
    if state.reorth_window > 0:
        for v in state._window:
            z -= (v @ z) * v
    beta = float(np.linalg.norm(z))
    state.alphas.append(alpha)
    if beta <= BREAKDOWN_RTOL * raw_norm:
        beta = 0.0
        state.breakdown = True
        q_next = np.zeros_like(z)
    else:
        q_next = z / beta
    state.betas.append(beta)
    state.q_prev = state.q_curr
    state.q_curr = q_next
    state.beta_prev = beta
    state.step += 1
    if state.reorth_window > 0 and not state.breakdown:
        state._window.append(q_next)
    return alpha, beta


@dataclass
class LanczosFactorization:
    """Result of :func:`lanczos_run`.

    ``Q`` has ``steps + 1`` orthonormal columns normally; on breakdown at
    step j it is truncated to the j valid columns and the factorization
    ``Z Q = Q T`` holds exactly with the square tridiagonal part.
    """

    Q: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    breakdown: bool

    @property
    def steps(self) -> int:
        return self.alphas.shape[0]

    def tridiagonal(self) -> np.ndarray:
        """The (steps+1) x steps rectangular tridiagonal matrix (square on
        breakdown, where the trailing beta vanishes)."""
        k = self.steps
        rows = k if self.breakdown else k + 1
        T = np.zeros((rows, k))
        for j in range(k):
            T[j, j] = self.alphas[j]
        for j in range(k - 1):
            T[j + 1, j] = self.betas[j]
            T[j, j + 1] = self.betas[j]
        if not self.breakdown:
            T[k, k - 1] = self.betas[k - 1]
        return T

    def tridiagonal_square(self) -> np.ndarray:
        """The leading steps x steps tridiagonal block T_k."""
        return self.tridiagonal()[: self.steps, :]


def lanczos_run(op: LinearOperator, q: np.ndarray, k: int,
                reorth: str = "full") -> LanczosFactorization:
    """Run k Lanczos steps from start vector q, storing the basis.

    ``reorth`` is ``"full"`` (orthogonalize against every stored vector,
    the default since the basis is stored anyway), ``"local"`` (previous
    two), or ``"none"``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if reorth not in ("full", "local", "none"):
        raise ValueError(f"unknown reorth mode {reorth!r}")
    q = np.asarray(q, dtype=np.float64)
    norm = np.linalg.norm(q)
    if norm == 0:
        raise ValueError("start vector must be nonzero")
    n = op.n
    steps_cap = min(k, n)  # the basis cannot exceed n orthonormal vectors
    basis = np.zeros((steps_cap + 1, n))
    basis[0] = q / norm
    alphas, betas = [], []
    breakdown = False
    steps = 0
    for j in range(steps_cap):
        qj = basis[j]
        z = op.apply(qj)
        raw_norm = float(np.linalg.norm(z))
        alpha = float(qj @ z)
        z = z - alpha * qj
        if j > 0:
            z -= betas[-1] * basis[j - 1]
        if reorth == "full":
            coeffs = basis[: j + 1] @ z
            z -= basis[: j + 1].T @ coeffs
        elif reorth == "local":
            for back in range(max(0, j - 1), j + 1):
                z -= (basis[back] @ z) * basis[back]
        beta = float(np.linalg.norm(z))
        alphas.append(alpha)
        steps = j + 1
        if beta <= BREAKDOWN_RTOL * raw_norm:
            betas.append(0.0)
            breakdown = True
            break
        betas.append(beta)
        basis[j + 1] = z / beta
    Q = basis[:steps] if breakdown else basis[: steps + 1]
    return LanczosFactorization(
        Q=Q.T.copy(),
        alphas=np.asarray(alphas),
        betas=np.asarray(betas),
        breakdown=breakdown,
    )
