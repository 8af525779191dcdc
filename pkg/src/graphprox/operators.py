"""Matrix-free linear operators built from a :class:`~graphprox.graph.Graph`.

Every solver consumes the graph only through these operators, and one
``apply`` call is the canonical unit of work (one matrix-vector product).
"""
from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla

from .errors import ConvergenceError
from .graph import Graph

__all__ = [
    "LinearOperator",
    "MatrixOperator",
    "KatzOperator",
    "AdjustedLaplacianOperator",
    "PreconditionedLaplacianOperator",
    "katz_operator",
    "adjusted_laplacian_operator",
    "preconditioned_laplacian_operator",
    "one_norm",
    "spectral_norm_estimate",
    "hard_alpha",
]

_DENSE_SPECTRUM_CUTOFF = 64


class LinearOperator:
    """Symmetric operator on R^n with a cumulative matvec counter.

    ``apply`` increments ``matvec_count`` by one; ``to_dense`` builds the
    dense matrix for oracle checks without touching the counter.
    """

    def __init__(self, n: int):
        self.n = int(n)
        self.matvec_count = 0

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"expected vector of length {self.n}, got shape {x.shape}")
        self.matvec_count += 1
        return self._apply(x)

    def _apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_dense(self) -> np.ndarray:
        raise NotImplementedError


class MatrixOperator(LinearOperator):
    """Wrap an explicit symmetric matrix (dense or scipy sparse)."""

    def __init__(self, matrix):
        super().__init__(matrix.shape[0])
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError("matrix must be square")
        self.matrix = matrix

    def _apply(self, x):
        return np.asarray(self.matrix @ x, dtype=np.float64).ravel()

    def to_dense(self):
        if hasattr(self.matrix, "toarray"):
            return self.matrix.toarray()
        return np.asarray(self.matrix, dtype=np.float64)


class KatzOperator(LinearOperator):
    """Applies x -> x - alpha * (A x).

    Positive definite when ``alpha < 1/sigma_max(A)``; the caller is
    responsible for choosing alpha in that regime when definiteness matters.
    """

    def __init__(self, graph: Graph, alpha: float):
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        super().__init__(graph.n)
        self.graph = graph
        self.alpha = float(alpha)
        self._adj = graph.adjacency()

    def _apply(self, x):
        return x - self.alpha * (self._adj @ x)

    def to_dense(self):
        return np.eye(self.n) - self.alpha * self._adj.toarray()


class AdjustedLaplacianOperator(LinearOperator):
    """Applies x -> D x - A x + mean(x) e.

    The rank-one shift makes the Laplacian of a connected graph symmetric
    positive definite; the all-ones vector is an eigenvector with
    eigenvalue 1.
    """

    def __init__(self, graph: Graph):
        super().__init__(graph.n)
        self.graph = graph
        self._adj = graph.adjacency()
        self._deg = graph.degrees.astype(np.float64)

    def _apply(self, x):
        return self._deg * x - self._adj @ x + x.mean()

    def to_dense(self):
        dense = np.diag(self._deg) - self._adj.toarray()
        dense += 1.0 / self.n
        return dense


class PreconditionedLaplacianOperator(LinearOperator):
    """Applies the degree-scaled adjusted Laplacian D^{-1/2} (L + ee^T/n) D^{-1/2}."""

    def __init__(self, graph: Graph):
        super().__init__(graph.n)
        self.graph = graph
        self._adj = graph.adjacency()
        self._deg = graph.degrees.astype(np.float64)
        self.inv_sqrt_deg = 1.0 / np.sqrt(self._deg)

    def _apply(self, x):
        s = self.inv_sqrt_deg * x
        y = self._deg * s - self._adj @ s + s.mean()
        return self.inv_sqrt_deg * y

    def to_dense(self):
        core = np.diag(self._deg) - self._adj.toarray() + 1.0 / self.n
        return self.inv_sqrt_deg[:, None] * core * self.inv_sqrt_deg[None, :]


def katz_operator(graph: Graph, alpha: float) -> KatzOperator:
    return KatzOperator(graph, alpha)


def adjusted_laplacian_operator(graph: Graph) -> AdjustedLaplacianOperator:
    return AdjustedLaplacianOperator(graph)


def preconditioned_laplacian_operator(graph: Graph) -> PreconditionedLaplacianOperator:
    return PreconditionedLaplacianOperator(graph)


def one_norm(op: LinearOperator) -> float:
    """Exact maximum absolute column sum, computed from degrees.

    For x -> x - alpha A x the column sum at v is ``1 + alpha*deg(v)``.
    For the adjusted Laplacian the column at v holds ``deg(v) + 1/n`` on the
    diagonal, ``1/n - 1`` at each of deg(v) neighbors, and ``1/n`` at the
    remaining ``n - 1 - deg(v)`` rows, which totals ``1 + 2 deg(v)(1 - 1/n)``.
    """
    if isinstance(op, KatzOperator):
        d_max = int(op.graph.degrees.max())
        return 1.0 + op.alpha * d_max
    if isinstance(op, AdjustedLaplacianOperator):
        g = op.graph
        d_max = int(g.degrees.max())
        return 1.0 + 2.0 * d_max * (1.0 - 1.0 / g.n)
    raise TypeError(f"no closed-form 1-norm for {type(op).__name__}")


def spectral_norm_estimate(graph: Graph, tol: float = 1e-6, seed: int = 0,
                           max_iter: int = 10000) -> float:
    """Estimate ``sigma_max(A) = lambda_max(|A|)`` of the adjacency matrix.

    Uses a dense symmetric eigensolve for small graphs and seeded ARPACK
    (largest magnitude) otherwise, so the result is deterministic for a
    fixed seed.

    Raises
    ------
    ConvergenceError
        If the iteration does not converge; carries the best estimate.
    """
    adj = graph.adjacency()
    if graph.n <= _DENSE_SPECTRUM_CUTOFF:
        eigs = np.linalg.eigvalsh(adj.toarray())
        return float(np.abs(eigs).max())
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(graph.n)
    try:
        vals = spla.eigsh(
            adj, k=1, which="LM", v0=v0, tol=tol, maxiter=max_iter,
            return_eigenvectors=False,
        )
    except spla.ArpackNoConvergence as exc:
        best = float(np.abs(exc.eigenvalues).max()) if len(exc.eigenvalues) else None
        raise ConvergenceError(
            f"spectral norm estimate did not converge within {max_iter} iterations",
            best_estimate=best,
        ) from exc
    return float(np.abs(vals).max())


def hard_alpha(graph: Graph, tol: float = 1e-6, seed: int = 0) -> float:
    """Damping value 1/(sigma_max + 1): nearly indefinite, hardest to solve."""
    return 1.0 / (spectral_norm_estimate(graph, tol=tol, seed=seed) + 1.0)
