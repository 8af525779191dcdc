"""Measurement vocabulary for the experiments: localization, top-k quality,
rank correlation, relative work, and the vertex sampling schemes.

All functions are pure and deterministic given their inputs and seeds; ties
in rankings break toward the smaller vertex id so repeated runs emit
identical reports.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import kendalltau

from .graph import Graph

__all__ = [
    "participation_ratio",
    "TopKSet",
    "precision_at_k",
    "kendall_tau_on_exact_topk",
    "performance_ratio",
    "degree_sample_ranks",
    "sample_vertices",
    "sample_vertex_pairs",
]


def participation_ratio(v) -> float:
    """Effective number of nonzero entries: (sum v^2)^2 / sum v^4.

    Equals n for a uniform vector of length n and 1 for a single-entry
    vector; scale-invariant.
    """
    v = np.asarray(v, dtype=np.float64)
    sq = v * v
    total = sq.sum()
    if total == 0:
        raise ValueError("participation ratio is undefined for the zero vector")
    return float(total * total / (sq * sq).sum())


@dataclass
class TopKSet:
    """The k best-scoring vertices for one query, source excluded.

    ``direction="largest"`` keeps the highest scores (Katz), ``"smallest"``
    the lowest (commute time).  Ties break by vertex id.  When fewer than k
    candidates exist, the set holds all of them.
    """

    k: int
    vertices: np.ndarray
    scores: np.ndarray
    direction: str

    @classmethod
    def from_scores(cls, scores, k: int, direction: str,
                    exclude: int | None = None) -> "TopKSet":
        if direction not in ("largest", "smallest"):
            raise ValueError(f"direction must be 'largest' or 'smallest', got {direction!r}")
        if k < 1:
            raise ValueError("k must be >= 1")
        scores = np.asarray(scores, dtype=np.float64)
        candidates = np.arange(scores.shape[0])
        if exclude is not None:
            candidates = candidates[candidates != exclude]
        key = -scores[candidates] if direction == "largest" else scores[candidates]
        order = np.lexsort((candidates, key))
        chosen = candidates[order[: min(k, candidates.shape[0])]]
        return cls(k=k, vertices=chosen, scores=scores[chosen], direction=direction)


def precision_at_k(approx: TopKSet, exact: TopKSet) -> float:
    """Fraction of the exact top-k set recovered by the approximation."""
    if approx.k != exact.k or approx.direction != exact.direction:
        raise ValueError("top-k sets must share k and direction")
    denom = exact.vertices.shape[0]
    if denom == 0:
        raise ValueError("empty exact top-k set")
    overlap = np.intersect1d(approx.vertices, exact.vertices).shape[0]
    return overlap / denom


def kendall_tau_on_exact_topk(alg_scores_on_exact_set, exact_scores) -> float:
    """Tie-adjusted (tau-b) rank correlation between the algorithm's scores
    and the exact scores, both restricted to the exact top-k vertex set.

    Returns NaN when either side is constant (the correlation is undefined
    there; exactly tied oracle values are the usual cause).
    """
    x = np.asarray(alg_scores_on_exact_set, dtype=np.float64)
    y = np.asarray(exact_scores, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("score vectors must be 1-d and of equal length")
    if x.shape[0] < 2:
        raise ValueError("need at least two scores")
    if np.all(x == x[0]) or np.all(y == y[0]):
        return float("nan")
    return float(kendalltau(x, y).statistic)


def performance_ratio(k_cg: int, k_alg: int) -> float:
    """Relative matvec savings (k_cg - k_alg)/k_cg: 0 for parity, 1 when the
    algorithm is free, -1 (-2) when it costs twice (thrice) as much."""
    if k_cg < 1:
        raise ValueError("baseline count must be >= 1")
    return (k_cg - k_alg) / k_cg


def degree_sample_ranks(n: int, variant: str = "katz") -> list[int]:
    """1-based ranks into the degree-descending order used for sampling.

    The katz variant takes 1..5 in every decade (1,2,3,4,5,10,20,...,50,
    100,...); the commute variant thins that to 1 and 5 per decade
    (1,5,10,50,100,...).  Ranks beyond n are dropped.
    """
    if variant not in ("katz", "commute"):
        raise ValueError(f"unknown variant {variant!r}")
    multipliers = (1, 2, 3, 4, 5) if variant == "katz" else (1, 5)
    ranks = []
    scale = 1
    while scale <= n:
        for m in multipliers:
            rank = m * scale
            if rank <= n:
                ranks.append(rank)
        scale *= 10
    return ranks


def _degree_order(graph: Graph) -> np.ndarray:
    # descending degree, ties by ascending vertex id
    return np.lexsort((np.arange(graph.n), -graph.degrees))


def sample_vertices(graph: Graph, scheme: str, count: int | None = None,
                    seed: int = 0, variant: str = "katz") -> list[int]:
    """Query vertices for column studies.

    ``scheme="random"`` takes the first ``count`` entries of a seeded
    permutation; ``scheme="degree_correlated"`` walks the degree-descending
    order at the sparse rank pattern of :func:`degree_sample_ranks`.
    """
    if scheme == "random":
        if count is None:
            count = 50
        if count > graph.n:
            warnings.warn(f"requested {count} vertices, only {graph.n} exist; truncating")
            count = graph.n
        perm = np.random.default_rng(seed).permutation(graph.n)
        return [int(v) for v in perm[:count]]
    if scheme == "degree_correlated":
        order = _degree_order(graph)
        chosen = [int(order[rank - 1]) for rank in degree_sample_ranks(graph.n, variant)]
        if count is not None and count < len(chosen):
            chosen = chosen[:count]
        return chosen
    raise ValueError(f"unknown scheme {scheme!r}")


def sample_vertex_pairs(graph: Graph, scheme: str, count: int | None = None,
                        seed: int = 0, variant: str = "katz") -> list[tuple[int, int]]:
    """Query pairs for the pairwise benchmarks.

    ``scheme="random"``: consecutive pairs of a seeded permutation (so the
    pairs are disjoint); default count is 100 for the katz variant and 20
    for commute.  ``scheme="degree_correlated"``: all pairs among the
    degree-rank sample of :func:`sample_vertices`.  A count larger than the
    available pairs is truncated with a warning.
    """
    if scheme == "random":
        if count is None:
            count = 100 if variant == "katz" else 20
        available = graph.n // 2
        if count > available:
            warnings.warn(f"requested {count} pairs, only {available} disjoint ones; truncating")
            count = available
        perm = np.random.default_rng(seed).permutation(graph.n)
        return [(int(perm[2 * t]), int(perm[2 * t + 1])) for t in range(count)]
    if scheme == "degree_correlated":
        chosen = sample_vertices(graph, "degree_correlated", variant=variant)
        pairs = list(itertools.combinations(chosen, 2))
        if count is not None and count < len(pairs):
            warnings.warn(f"degree scheme produced {len(pairs)} pairs; truncating to {count}")
            pairs = pairs[:count]
        return [(int(a), int(b)) for a, b in pairs]
    raise ValueError(f"unknown scheme {scheme!r}")
