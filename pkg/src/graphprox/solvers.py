"""Shared baselines and ground-truth solves.

The dense routines are the desk-scale oracles every approximate method is
tested against; :func:`conjugate_gradient` is also the timing baseline the
bound algorithms are compared with, including the dual stopping rule used
in those comparisons (probed-value relative change, or residual norm).
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, IndefiniteSystemError
from .graph import Graph
from .operators import LinearOperator

__all__ = [
    "SolveReport",
    "conjugate_gradient",
    "reference_solve",
    "DenseReferences",
    "dense_reference_matrices",
]

DENSE_CUTOFF = 2000


@dataclass
class SolveReport:
    """Outcome of a conjugate gradient solve.

    ``residual_history[k]`` is the recurrence residual 2-norm after
    iteration k+1; the final entry is at most ``tol * ||b||`` when
    ``converged`` is True and the probe rule did not fire first.
    ``probe_history`` records the probed scalar per iteration when a
    probe was supplied.
    """

    solution: np.ndarray
    iterations: int
    matvecs: int
    residual_history: list[float]
    converged: bool
    probe_history: list[float] | None = None


def conjugate_gradient(op: LinearOperator, b: np.ndarray, tol: float = 1e-8,
                       max_iter: int | None = None,
                       pairwise_probe=None) -> SolveReport:
    """Textbook conjugate gradient on an SPD operator, one matvec per step.

    Stops when the residual 2-norm drops below ``tol * ||b||``.  When
    ``pairwise_probe`` (a function of the iterate) is supplied, the solve
    additionally stops once the probed value changes by less than ``tol``
    in relative terms between consecutive iterations; the probe rule only
    fires on a nonzero probe value, since probes of distant entries stay
    exactly zero until the Krylov space reaches them.

    Raises
    ------
    IndefiniteSystemError
        If a search direction has non-positive curvature.
    """
    b = np.asarray(b, dtype=np.float64)
    n = op.n
    if max_iter is None:
        max_iter = 10 * n
    start_count = op.matvec_count
    x = np.zeros(n)
    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0:
        return SolveReport(x, 0, 0, [], True, [] if pairwise_probe else None)
    residual_history: list[float] = []
    probe_history: list[float] | None = [] if pairwise_probe else None
    converged = False
    iterations = 0
    for _ in range(max_iter):
        Zp = op.apply(p)
        curvature = float(p @ Zp)
        if curvature <= 0:
            raise IndefiniteSystemError(
                f"non-positive curvature {curvature:g} at iteration {iterations + 1}"
            )
        gamma = rs / curvature
        x += gamma * p
        r -= gamma * Zp
        iterations += 1
        rnorm = float(np.linalg.norm(r))
        residual_history.append(rnorm)
        if pairwise_probe is not None:
            pk = float(pairwise_probe(x))
            probe_history.append(pk)
            if rnorm <= tol * b_norm:
                converged = True
                break
            if (
                len(probe_history) >= 2
                and pk != 0.0
                and abs(pk - probe_history[-2]) < tol * abs(pk)
            ):
                converged = True
                break
        elif rnorm <= tol * b_norm:
            converged = True
            break
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
    return SolveReport(
        solution=x,
        iterations=iterations,
        matvecs=op.matvec_count - start_count,
        residual_history=residual_history,
        converged=converged,
        probe_history=probe_history,
    )


def reference_solve(op: LinearOperator, b: np.ndarray,
                    dense_cutoff: int = DENSE_CUTOFF) -> np.ndarray:
    """Ground-truth solve of ``op x = b``.

    Dense Cholesky-backed solve up to ``dense_cutoff``; beyond that, CG
    driven to a 1e-12 relative residual with a 4n iteration budget (all
    operators in this package are SPD, where that is a safe stand-in).

    Raises
    ------
    ConvergenceError
        If the iterative fallback fails to reach the tolerance: ground
        truth must not be silently wrong.
    """
    b = np.asarray(b, dtype=np.float64)
    if op.n <= dense_cutoff:
        return scipy.linalg.solve(op.to_dense(), b, assume_a="pos")
    report = conjugate_gradient(op, b, tol=1e-12, max_iter=4 * op.n)
    if not report.converged:
        raise ConvergenceError(
            f"reference solve stalled at residual {report.residual_history[-1]:g}",
            best_estimate=report.solution,
        )
    return report.solution


@dataclass
class DenseReferences:
    """Dense ground-truth matrices for a small graph: the path-weighted
    affinity matrix K, the commute-time matrix C, and the Laplacian
    pseudo-inverse they derive from."""

    katz: np.ndarray | None
    commute: np.ndarray
    laplacian_pinv: np.ndarray
    volume: int


_cache: OrderedDict[tuple, DenseReferences] = OrderedDict()
_CACHE_MAX = 16


def dense_reference_matrices(graph: Graph, alpha: float | None = None) -> DenseReferences:
    """Brute-force reference matrices for graphs up to the dense cutoff.

    ``K = (I - alpha A)^{-1} - I`` (skipped when alpha is None),
    ``Lpinv = (L + ee^T/n)^{-1} - ee^T/n``, and
    ``C[i, j] = vol * (Lpinv[i, i] - 2 Lpinv[i, j] + Lpinv[j, j])``.
    Results are cached by (graph fingerprint, alpha).
    """
    if graph.n > DENSE_CUTOFF:
        raise ValueError(f"dense references refused for n={graph.n} > {DENSE_CUTOFF}")
    key = (graph.fingerprint(), alpha)
    if key in _cache:
        _cache.move_to_end(key)
        return _cache[key]
    A = graph.adjacency().toarray()
    n = graph.n
    deg = graph.degrees.astype(np.float64)
    ltil = np.diag(deg) - A + 1.0 / n
    linv = scipy.linalg.inv(ltil)
    lpinv = linv - 1.0 / n
    diag = np.diag(lpinv)
    commute = graph.volume * (diag[:, None] + diag[None, :] - 2.0 * lpinv)
    np.fill_diagonal(commute, 0.0)
    katz = None
    if alpha is not None:
        katz = scipy.linalg.inv(np.eye(n) - alpha * A) - np.eye(n)
    refs = DenseReferences(
        katz=katz, commute=commute, laplacian_pinv=lpinv, volume=graph.volume
    )
    _cache[key] = refs
    while len(_cache) > _CACHE_MAX:
        _cache.popitem(last=False)
    return refs
