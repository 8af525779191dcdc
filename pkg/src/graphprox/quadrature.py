"""Gauss-Radau upper/lower bounds on quadratic forms u^T Z^{-1} u.

Given the Lanczos coefficients of a symmetric positive definite operator
and an enclosing spectrum interval [lambda_lo, lambda_hi], a Gauss-Radau
rule with its prescribed node at one end of the interval gives a one-sided
estimate of the Stieltjes integral behind the quadratic form: prescribing
``lambda_lo`` yields an upper bound, prescribing ``lambda_hi`` a lower
bound (the error term of the rule changes sign with the prescribed end,
and every odd derivative of 1/x is negative on x > 0).

Two routes are provided and cross-checked in the tests: a constant-time
scalar recurrence updated once per Lanczos step (:func:`radau_step`,
following Golub & Meurant's quadrature-rule updates), and a dense
evaluation that explicitly builds the extended tridiagonal matrix
(:func:`radau_rule_dense`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateStepError

__all__ = [
    "BoundsPair",
    "GaussRadauState",
    "radau_step",
    "gauss_rule_dense",
    "radau_rule_dense",
    "radau_bounds_dense",
]

PIVOT_EPS = 1e-14


class BoundsPair(NamedTuple):
    lower: float
    upper: float


@dataclass
class GaussRadauState:
    """Constant-size scalar state advanced once per Lanczos step.

    ``b`` carries the running Gauss-rule value e_1^T T_k^{-1} e_1, ``c`` the
    product of off-diagonal/pivot ratios, and ``d`` the k-th pivot of the
    LDL factorization of T_k.  ``d_upper``/``d_lower`` are the pivot chains
    of T_k shifted by the prescribed points: ``d_upper`` serves the
    upper-bound rule (prescribed ``lambda_lo``), ``d_lower`` the lower-bound
    rule (prescribed ``lambda_hi``).
    """

    lambda_lo: float
    lambda_hi: float
    b: float = 0.0
    c: float = 1.0
    d: float = 1.0
    d_upper: float = 1.0
    d_lower: float = 1.0
    step: int = 0

    def __post_init__(self):
        if not (0 < self.lambda_lo < self.lambda_hi):
            raise ValueError(
                f"need 0 < lambda_lo < lambda_hi, got ({self.lambda_lo}, {self.lambda_hi})"
            )


def _check_pivot(value: float, what: str):
    if abs(value) <= PIVOT_EPS:
        raise DegenerateStepError(f"near-zero {what} in Gauss-Radau update")


def radau_step(alpha: float, beta_prev: float, beta: float,
               state: GaussRadauState) -> BoundsPair:
    """Fold one Lanczos step (alpha_j, beta_{j-1}, beta_j) into the bounds.

    Mutates ``state`` and returns the pair bracketing the normalized
    quadratic form: ``lower <= q^T Z^{-1} q <= upper`` for the unit start
    vector q, assuming the prescribed interval encloses the spectrum.

    The first step seeds the recurrences directly from T_1 = [alpha]; later
    steps apply the standard constant-time updates.  A zero ``beta`` means
    the Krylov space is invariant, so the Gauss value itself is exact and
    both bounds collapse to it.

    Raises
    ------
    DegenerateStepError
        On a near-zero pivot or denominator; callers can re-evaluate the
        step with :func:`radau_bounds_dense` instead.
    """
    if state.step == 0:
        _check_pivot(alpha, "first pivot")
        state.b = 1.0 / alpha
        state.c = 1.0
        state.d = alpha
        state.d_upper = alpha - state.lambda_lo
        state.d_lower = alpha - state.lambda_hi
    else:
        _check_pivot(state.d, "pivot d")
        _check_pivot(state.d_upper, "pivot d_upper")
        _check_pivot(state.d_lower, "pivot d_lower")
        bp2 = beta_prev * beta_prev
        gauss_denom = alpha * state.d - bp2
        _check_pivot(gauss_denom, "Gauss denominator")
        state.b = state.b + bp2 * state.c * state.c / (state.d * gauss_denom)
        state.c = state.c * beta_prev / state.d
        state.d = alpha - bp2 / state.d
        state.d_upper = alpha - state.lambda_lo - bp2 / state.d_upper
        state.d_lower = alpha - state.lambda_hi - bp2 / state.d_lower
    state.step += 1

    if beta == 0.0:
        return BoundsPair(state.b, state.b)
    _check_pivot(state.d, "pivot d")
    _check_pivot(state.d_upper, "pivot d_upper")
    _check_pivot(state.d_lower, "pivot d_lower")
    b2 = beta * beta
    omega_upper = state.lambda_lo + b2 / state.d_upper
    omega_lower = state.lambda_hi + b2 / state.d_lower
    cc = state.c * state.c
    denom_upper = state.d * (omega_upper * state.d - b2)
    denom_lower = state.d * (omega_lower * state.d - b2)
    _check_pivot(denom_upper, "upper-rule denominator")
    _check_pivot(denom_lower, "lower-rule denominator")
    upper = state.b + b2 * cc / denom_upper
    lower = state.b + b2 * cc / denom_lower
    return BoundsPair(lower, upper)


def _tridiagonal(alphas, betas) -> np.ndarray:
    k = len(alphas)
    T = np.diag(np.asarray(alphas, dtype=np.float64))
    if k > 1:
        off = np.asarray(betas[: k - 1], dtype=np.float64)
        T += np.diag(off, 1) + np.diag(off, -1)
    return T


def gauss_rule_dense(alphas, betas, sigma: float) -> float:
    """k-point Gauss estimate sigma^2 e_1^T T_k^{-1} e_1 by dense solve.

    ``betas`` holds the k-1 interior off-diagonals (a trailing extra entry
    is ignored so callers can pass the full recorded sequence).
    """
    T = _tridiagonal(alphas, betas)
    e1 = np.zeros(len(alphas))
    e1[0] = 1.0
    return float(sigma * sigma * np.linalg.solve(T, e1)[0])


def radau_rule_dense(alphas, betas, sigma: float, prescribed_lambda: float) -> float:
    """(k+1)-point Gauss-Radau estimate with one prescribed node.

    Builds the extended tridiagonal explicitly: with T_k from the first k
    coefficients and the coupling off-diagonal beta_k, solve
    ``(T_k - phi I) delta = beta_k^2 e_k`` and append the diagonal entry
    ``phi + delta_k``, which makes ``phi`` an exact eigenvalue of the
    extended matrix.  Returns ``sigma^2 e_1^T That^{-1} e_1`` via a dense
    solve.  This is the slow reference route for :func:`radau_step`.

    Raises
    ------
    DegenerateStepError
        If the prescribed point collides with a Ritz value of T_k (the
        shifted system is singular).
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    betas = np.asarray(betas, dtype=np.float64)
    k = alphas.shape[0]
    if betas.shape[0] != k:
        raise ValueError("need k off-diagonals: the last couples the extension")
    beta_k = betas[-1]
    T = _tridiagonal(alphas, betas)
    if beta_k == 0.0:
        # decoupled extension: the prescribed eigenvalue is appended without
        # affecting e_1^T f(That) e_1
        e1 = np.zeros(k)
        e1[0] = 1.0
        return float(sigma * sigma * np.linalg.solve(T, e1)[0])
    rhs = np.zeros(k)
    rhs[-1] = beta_k * beta_k
    shifted = T - prescribed_lambda * np.eye(k)
    try:
        delta = np.linalg.solve(shifted, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateStepError(
            "prescribed point collides with a Ritz value"
        ) from exc
    ext = np.zeros((k + 1, k + 1))
    ext[:k, :k] = T
    ext[k, k] = prescribed_lambda + delta[-1]
    ext[k - 1, k] = beta_k
    ext[k, k - 1] = beta_k
    e1 = np.zeros(k + 1)
    e1[0] = 1.0
    try:
        sol = np.linalg.solve(ext, e1)
    except np.linalg.LinAlgError as exc:
        raise DegenerateStepError("singular extended tridiagonal") from exc
    return float(sigma * sigma * sol[0])


def radau_bounds_dense(alphas, betas, sigma: float, lambda_lo: float,
                       lambda_hi: float) -> BoundsPair:
    """Both one-sided estimates via the dense route.

    Prescribing ``lambda_hi`` gives the lower bound, ``lambda_lo`` the
    upper bound.  With a vanishing coupling off-diagonal both collapse to
    the exact Gauss value.
    """
    lower = radau_rule_dense(alphas, betas, sigma, lambda_hi)
    upper = radau_rule_dense(alphas, betas, sigma, lambda_lo)
    return BoundsPair(lower, upper)
