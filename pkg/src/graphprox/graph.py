"""Loading, cleaning, and compressed-row representation of undirected graphs.

Every solver in the package consumes the same immutable :class:`Graph`:
a symmetric, self-loop-free adjacency stored as CSR index arrays plus the
degree vector.  Inputs are cleaned to that shape by :func:`preprocess`
(symmetrize, dedupe, strip self-loops and weights, keep the largest
connected component, relabel vertices contiguously).
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import ParseError

__all__ = [
    "Graph",
    "load_edge_list",
    "load_matrix_market",
    "preprocess",
    "load_graph",
]


@dataclass
class Graph:
    """Connected undirected graph in compressed sparse row form.

    Attributes
    ----------
    n : int
        Vertex count after preprocessing.
    row_offsets : ndarray, shape (n+1,)
        CSR row pointers; the neighbors of ``v`` are
        ``neighbors[row_offsets[v]:row_offsets[v+1]]``, sorted ascending.
    neighbors : ndarray, shape (2m,)
        Flattened adjacency lists.  Each undirected edge appears twice.
    degrees : ndarray, shape (n,)
        ``degrees[v] == row_offsets[v+1] - row_offsets[v]``.
    volume : int
        Sum of all adjacency entries; ``2m`` for an unweighted graph.
    original_ids : ndarray, shape (n,)
        External label of each relabeled vertex (ascending).
    components_discarded : int
        Number of connected components dropped by preprocessing.

    The arrays are marked read-only; a constructed Graph is safe to share
    across concurrent queries.
    """

    n: int
    row_offsets: np.ndarray
    neighbors: np.ndarray
    degrees: np.ndarray
    volume: int
    original_ids: np.ndarray
    components_discarded: int = 0
    _adjacency: sp.csr_matrix | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for arr in (self.row_offsets, self.neighbors, self.degrees, self.original_ids):
            arr.setflags(write=False)

    @property
    def num_edges(self) -> int:
        return self.neighbors.shape[0] // 2

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.row_offsets[v]:self.row_offsets[v + 1]]

    def adjacency(self) -> sp.csr_matrix:
        """Adjacency matrix as a scipy CSR matrix (built once, cached)."""
        if self._adjacency is None:
            data = np.ones(self.neighbors.shape[0], dtype=np.float64)
            self._adjacency = sp.csr_matrix(
                (data, self.neighbors, self.row_offsets), shape=(self.n, self.n)
            )
        return self._adjacency

    def summary(self) -> dict:
        return {
            "n": int(self.n),
            "m": int(self.num_edges),
            "avg_degree": float(self.degrees.mean()),
            "max_degree": int(self.degrees.max()),
            "volume": int(self.volume),
            "components_discarded": int(self.components_discarded),
        }

    def fingerprint(self) -> str:
        """Content hash of the adjacency structure, used as a cache key."""
        h = hashlib.sha256()
        h.update(np.int64(self.n).tobytes())
        h.update(np.ascontiguousarray(self.row_offsets).tobytes())
        h.update(np.ascontiguousarray(self.neighbors).tobytes())
        return h.hexdigest()

    def to_internal(self, external_id: int) -> int:
        """Map an original vertex label to its post-preprocessing index."""
        pos = int(np.searchsorted(self.original_ids, external_id))
        if pos >= self.n or self.original_ids[pos] != external_id:
            raise KeyError(f"vertex {external_id} is not in the retained component")
        return pos


def _iter_lines(source):
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
    elif hasattr(source, "read"):
        yield from source
    else:  # iterable of lines
        yield from source


def load_edge_list(source, one_based: bool = False) -> list[tuple[int, int]]:
    """Parse an edge-list text stream of ``u v`` lines.

    Lines starting with ``#`` and blank lines are skipped.  Tokens past the
    first two (edge weights) are discarded.  Self-loops are kept here;
    :func:`preprocess` strips them.

    Parameters
    ----------
    source : path, file-like, or iterable of str
    one_based : bool
        If True, vertex indices in the file start at 1 and are shifted down.

    Raises
    ------
    ParseError
        On a malformed line or an index below the declared base.
    """
    base = 1 if one_based else 0
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("%"):
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise ParseError(f"expected two integer tokens, got {line!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError as exc:
            raise ParseError(f"non-integer vertex token in {line!r}", lineno) from exc
        if u < base or v < base:
            raise ParseError(
                f"vertex index below {base} in {'1' if one_based else '0'}-based input", lineno
            )
        edges.append((u - base, v - base))
    return edges


def load_matrix_market(source) -> list[tuple[int, int]]:
    """Parse a MatrixMarket coordinate file into an edge list.

    Accepts pattern/real/integer fields with general or symmetric symmetry;
    entry values are ignored.  Indices are 1-based per the format.
    """
    lines = _iter_lines(source)
    header = None
    lineno = 0
    for lineno, raw in enumerate(lines, start=1):
        header = raw.strip()
        break
    if header is None or not header.lower().startswith("%%matrixmarket"):
        raise ParseError("missing MatrixMarket header", 1)
    parts = header.lower().split()
    if len(parts) < 5 or parts[1] != "matrix" or parts[2] != "coordinate":
        raise ParseError(f"unsupported MatrixMarket header {header!r}", 1)
    fieldkind, symmetry = parts[3], parts[4]
    if fieldkind not in ("pattern", "real", "integer"):
        raise ParseError(f"unsupported field type {fieldkind!r}", 1)
    if symmetry not in ("general", "symmetric"):
        raise ParseError(f"unsupported symmetry {symmetry!r}", 1)

    nrows = ncols = nnz = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(lines, start=lineno + 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        tokens = line.split()
        if nrows is None:
            if len(tokens) != 3:
                raise ParseError("expected size line 'rows cols nnz'", lineno)
            try:
                nrows, ncols, nnz = (int(t) for t in tokens)
            except ValueError as exc:
                raise ParseError("non-integer size line", lineno) from exc
            if nrows != ncols:
                raise ParseError(f"adjacency must be square, got {nrows}x{ncols}", lineno)
            continue
        if len(tokens) < 2:
            raise ParseError(f"expected 'i j [value]', got {line!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError as exc:
            raise ParseError(f"non-integer coordinate in {line!r}", lineno) from exc
        if not (1 <= u <= nrows and 1 <= v <= ncols):
            raise ParseError(f"coordinate ({u},{v}) outside declared {nrows}x{ncols}", lineno)
        edges.append((u - 1, v - 1))
    if nrows is None:
        raise ParseError("missing size line", lineno or 1)
    if len(edges) != nnz:
        raise ParseError(f"declared {nnz} entries, found {len(edges)}", lineno)
    return edges


def preprocess(edges) -> Graph:
    """Clean a raw edge set into a connected :class:`Graph`.

    Symmetrizes, removes duplicate edges and self-loops, restricts to the
    largest connected component (ties broken by the smallest original
    vertex id contained), and relabels the surviving vertices 0..n-1 in
    ascending original-id order.

    Raises
    ------
    ValueError
        If the edge set is empty or no edges survive cleaning.
    """
    arr = np.asarray(list(edges), dtype=np.int64)
    if arr.size == 0:
        raise ValueError("empty edge set")
    arr = arr.reshape(-1, 2)
    loop_only = np.setdiff1d(arr[arr[:, 0] == arr[:, 1]].ravel(), arr[arr[:, 0] != arr[:, 1]].ravel())
    arr = arr[arr[:, 0] != arr[:, 1]]
    if arr.size == 0:
        raise ValueError("no edges left after removing self-loops")

    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    undirected = np.unique(np.stack([lo, hi], axis=1), axis=0)

    verts = np.unique(undirected)  # ascending original ids
    cu = np.searchsorted(verts, undirected[:, 0])
    cv = np.searchsorted(verts, undirected[:, 1])
    nv = verts.shape[0]
    adj = sp.coo_matrix(
        (np.ones(cu.shape[0]), (cu, cv)), shape=(nv, nv)
    )
    ncomp, labels = connected_components(adj, directed=False)

    sizes = np.bincount(labels, minlength=ncomp)
    best = np.flatnonzero(sizes == sizes.max())
    if best.size > 1:
        # tie: the component containing the smallest original id wins; verts
        # is sorted, so the first occurrence of each tied label decides
        first_vertex = np.full(ncomp, nv, dtype=np.int64)
        np.minimum.at(first_vertex, labels, np.arange(nv))
        chosen = best[np.argmin(first_vertex[best])]
    else:
        chosen = best[0]

    keep_mask = labels == chosen
    keep_edges = keep_mask[cu]  # endpoints share a component
    eu, ev = cu[keep_edges], cv[keep_edges]

    old_to_new = np.cumsum(keep_mask) - 1
    eu = old_to_new[eu]
    ev = old_to_new[ev]
    n = int(keep_mask.sum())

    src = np.concatenate([eu, ev])
    dst = np.concatenate([ev, eu])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    degrees = np.bincount(src, minlength=n).astype(np.int64)
    row_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=row_offsets[1:])

    discarded = (ncomp - 1) + loop_only.shape[0]
    return Graph(
        n=n,
        row_offsets=row_offsets,
        neighbors=dst.astype(np.int64),
        degrees=degrees,
        volume=int(dst.shape[0]),
        original_ids=verts[keep_mask],
        components_discarded=int(discarded),
    )


def load_graph(path, fmt: str = "edges0") -> Graph:
    """Load and preprocess a graph file.

    ``fmt`` is one of ``edges0`` (0-based edge list), ``edges1`` (1-based),
    or ``mtx`` (MatrixMarket coordinate).
    """
    if fmt == "edges0":
        edges = load_edge_list(path, one_based=False)
    elif fmt == "edges1":
        edges = load_edge_list(path, one_based=True)
    elif fmt == "mtx":
        edges = load_matrix_market(path)
    else:
        raise ValueError(f"unknown format {fmt!r}; expected edges0, edges1, or mtx")
    return preprocess(edges)
