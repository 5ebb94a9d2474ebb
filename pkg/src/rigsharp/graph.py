"""Sparse undirected graphs, feature assignments and edge-draw sequences.

Vertices are the integers ``0..n-1`` and features ``0..m-1``.  An edge
``{u, v}`` with ``u < v`` is stored as the integer key ``u * n + v``; the
sorted key array is the canonical form used for equality, subgraph and
union tests.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np


class IncompatibleGraphs(ValueError):
    """Raised when two graphs on different vertex sets are combined."""


def _canonical_pairs(n: int, pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pairs must have shape (k, 2)")
    if (arr < 0).any() or (arr >= n).any():
        raise ValueError(f"vertex index out of range 0..{n - 1}")
    if (arr[:, 0] == arr[:, 1]).any():
        raise ValueError("self-loops are not allowed")
    return np.sort(arr, axis=1)


class Graph:
    """Immutable simple graph on ``n`` labelled vertices.

    Duplicate edges passed to the constructor are merged; self-loops raise.
    """

    __slots__ = ("n", "_keys", "_adj", "_deg")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise ValueError("n must be nonnegative")
        pairs = _canonical_pairs(n, list(edges))
        keys = np.unique(pairs[:, 0] * n + pairs[:, 1])
        self._init_from_keys(n, keys)

    @classmethod
    def from_keys(cls, n: int, keys: np.ndarray) -> Graph:
        """Build from edge keys ``u * n + v`` (``u < v``); duplicates allowed."""
        g = cls.__new__(cls)
        g._init_from_keys(n, np.unique(np.asarray(keys, dtype=np.int64)))
        return g

    @classmethod
    def from_pairs(cls, n: int, pairs: np.ndarray) -> Graph:
        pairs = _canonical_pairs(n, pairs)
        return cls.from_keys(n, pairs[:, 0] * n + pairs[:, 1])

    def _init_from_keys(self, n: int, keys: np.ndarray) -> None:
        self.n = n
        self._keys = keys
        self._keys.setflags(write=False)
        self._adj = None
        self._deg = None

    # -- basic accessors -------------------------------------------------

    @property
    def keys(self) -> np.ndarray:
        return self._keys

    @property
    def num_edges(self) -> int:
        return int(self._keys.size)

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(E, 2)`` array of ``(u, v)`` with ``u < v``, sorted."""
        if self.n == 0:
            return np.empty((0, 2), dtype=np.int64)
        return np.stack(np.divmod(self._keys, self.n), axis=1)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edge_array()]

    @property
    def adjacency(self) -> list[list[int]]:
        """Sorted neighbour lists; computed once and cached."""
        if self._adj is None:
            self._adj = _adjacency_lists(self.n, self.edge_array())
        return self._adj

    def degrees(self) -> np.ndarray:
        if self._deg is None:
            e = self.edge_array()
            self._deg = np.bincount(e.ravel(), minlength=self.n)
        return self._deg

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if u > v:
            u, v = v, u
        key = u * self.n + v
        i = np.searchsorted(self._keys, key)
        return bool(i < self._keys.size and self._keys[i] == key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._keys, other._keys)

    def __hash__(self) -> int:
        return hash((self.n, self._keys.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"

    # -- serialization ---------------------------------------------------

    def to_edgelist(self) -> str:
        lines = [f"n {self.n}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> Graph:
        """Parse the ``n <n>`` / ``u v`` edge-list format.

        Lines of the form ``v: w1 w2 ...`` (feature listings) and blank
        lines are ignored.
        """
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines or not lines[0].startswith("n "):
            raise ValueError("edge list must start with a line 'n <count>'")
        n = int(lines[0].split()[1])
        pairs = []
        for ln in lines[1:]:
            if ":" in ln:
                continue
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"malformed edge line: {ln!r}")
            pairs.append((int(parts[0]), int(parts[1])))
        return cls(n, pairs)


def _adjacency_lists(n: int, e: np.ndarray) -> list[list[int]]:
    if e.size == 0:
        return [[] for _ in range(n)]
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    bounds = np.searchsorted(src, np.arange(n + 1))
    flat = dst.tolist()
    return [flat[bounds[i]:bounds[i + 1]] for i in range(n)]


def empty_graph(n: int) -> Graph:
    return Graph.from_keys(n, np.empty(0, dtype=np.int64))


def complete_graph(n: int) -> Graph:
    iu, iv = np.triu_indices(n, 1)
    return Graph.from_keys(n, iu * n + iv)


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def min_degree(g: Graph) -> int:
    if g.n < 1:
        raise ValueError("minimum degree of the empty vertex set is undefined")
    return int(g.degrees().min())


def _check_same_n(g1: Graph, g2: Graph) -> None:
    if g1.n != g2.n:
        raise IncompatibleGraphs(f"vertex counts differ: {g1.n} != {g2.n}")


def is_subgraph(g1: Graph, g2: Graph) -> bool:
    """True iff every edge of ``g1`` is an edge of ``g2``."""
    _check_same_n(g1, g2)
    if g1.num_edges > g2.num_edges:
        return False
    return bool(np.isin(g1.keys, g2.keys, assume_unique=True).all())


def union(g1: Graph, g2: Graph) -> Graph:
    _check_same_n(g1, g2)
    return Graph.from_keys(g1.n, np.union1d(g1.keys, g2.keys))


def pair_keys(n: int, pairs: np.ndarray) -> np.ndarray:
    """Edge keys for an array of vertex pairs in either orientation."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    return lo * n + hi


class DrawSequence:
    """Ordered vertex-pair draws, repetitions allowed."""

    __slots__ = ("n", "draws")

    def __init__(self, n: int, draws=()):
        self.n = n
        self.draws = _canonical_pairs(n, list(draws) if not isinstance(draws, np.ndarray) else draws)
        self.draws.setflags(write=False)

    def __len__(self) -> int:
        return int(self.draws.shape[0])

    def prefix(self, k: int) -> DrawSequence:
        return DrawSequence(self.n, self.draws[:k])

    def concat(self, other: DrawSequence) -> DrawSequence:
        if other.n != self.n:
            raise IncompatibleGraphs("draw sequences on different vertex sets")
        return DrawSequence(self.n, np.concatenate([self.draws, other.draws]))

    def __repr__(self) -> str:
        return f"DrawSequence(n={self.n}, draws={len(self)})"


def collapse(d: DrawSequence) -> Graph:
    """Graph whose edges are the pairs drawn at least once."""
    return Graph.from_keys(d.n, pair_keys(d.n, d.draws))


class FeatureAssignment:
    """Vertex/feature incidences ``{W_v}`` with the inverse index ``{V_w}``.

    Stored as two CSR-style views over the same incidence list so that
    ``m`` can be large (``10**8``) without allocating per-feature objects.
    """

    __slots__ = ("n", "m", "_v_ptr", "_v_feat", "_f_ids", "_f_ptr", "_f_vert")

    def __init__(self, n: int, m: int, features_of: Sequence[Iterable[int]]):
        if len(features_of) != n:
            raise ValueError("features_of must have one entry per vertex")
        verts, feats = [], []
        for v, ws in enumerate(features_of):
            for w in ws:
                verts.append(v)
                feats.append(w)
        self._build(n, m, np.asarray(verts, dtype=np.int64), np.asarray(feats, dtype=np.int64))

    @classmethod
    def from_incidences(cls, n: int, m: int, verts: np.ndarray, feats: np.ndarray) -> FeatureAssignment:
        a = cls.__new__(cls)
        a._build(n, m, np.asarray(verts, dtype=np.int64), np.asarray(feats, dtype=np.int64))
        return a

    def _build(self, n: int, m: int, verts: np.ndarray, feats: np.ndarray) -> None:
        if verts.size and (verts.min() < 0 or verts.max() >= n):
            raise ValueError("vertex index out of range")
        if feats.size and (feats.min() < 0 or feats.max() >= m):
            raise ValueError("feature index out of range")
        self.n, self.m = n, m
        inc = np.unique(verts * m + feats) if verts.size else np.empty(0, dtype=np.int64)
        verts, feats = np.divmod(inc, m) if m else (inc, inc)
        self._v_ptr = np.searchsorted(verts, np.arange(n + 1))
        self._v_feat = feats
        # incidences are vertex-sorted, so a stable sort by feature keeps vertices sorted within V_w
        order = np.argsort(feats, kind="stable")
        f_sorted = feats[order]
        self._f_vert = verts[order]
        self._f_ids, starts = np.unique(f_sorted, return_index=True)
        self._f_ptr = np.append(starts, f_sorted.size)

    @property
    def num_incidences(self) -> int:
        return int(self._v_feat.size)

    def features_of(self, v: int) -> np.ndarray:
        return self._v_feat[self._v_ptr[v]:self._v_ptr[v + 1]]

    def vertices_of(self, w: int) -> np.ndarray:
        i = np.searchsorted(self._f_ids, w)
        if i < self._f_ids.size and self._f_ids[i] == w:
            return self._f_vert[self._f_ptr[i]:self._f_ptr[i + 1]]
        return np.empty(0, dtype=np.int64)

    def vertex_counts(self) -> np.ndarray:
        """``|W_v|`` for every vertex."""
        return np.diff(self._v_ptr)

    def feature_counts(self) -> np.ndarray:
        """``|V_w|`` for every feature (length ``m``)."""
        out = np.zeros(self.m, dtype=np.int64)
        out[self._f_ids] = np.diff(self._f_ptr)
        return out

    def nonempty_features(self):
        """Yield ``(w, V_w)`` for features chosen by at least one vertex."""
        for i, w in enumerate(self._f_ids.tolist()):
            yield w, self._f_vert[self._f_ptr[i]:self._f_ptr[i + 1]]

    def __repr__(self) -> str:
        return f"FeatureAssignment(n={self.n}, m={self.m}, incidences={self.num_incidences})"


def _clique_keys(n: int, members: np.ndarray) -> np.ndarray:
    iu, iv = np.triu_indices(members.size, 1)
    return members[iu] * n + members[iv]


def intersection_graph(a: FeatureAssignment) -> Graph:
    """Vertices adjacent iff their feature sets meet: the union of cliques on each ``V_w``."""
    sizes = np.diff(a._f_ptr)
    starts = a._f_ptr[:-1]
    chunks = []
    # features of equal size s share one triu pattern: gather them as a (count, s) block
    for s in np.unique(sizes[sizes >= 2]).tolist():
        block = a._f_vert[starts[sizes == s][:, None] + np.arange(s)]
        iu, iv = np.triu_indices(s, 1)
        chunks.append((block[:, iu] * a.n + block[:, iv]).ravel())
    keys = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    return Graph.from_keys(a.n, keys)


def intersection_degrees(a: FeatureAssignment) -> np.ndarray:
    """Vertex degrees of ``intersection_graph(a)`` without materialising its edges.

    Meant for dense feature classes where the edge set is too large to
    build; cost is one sparse boolean product.
    """
    from scipy import sparse

    inc = sparse.csr_matrix(
        (np.ones(a.num_incidences, dtype=np.int32),
         (np.repeat(np.arange(a.n), a.vertex_counts()), a._v_feat)),
        shape=(a.n, a.m),
    )
    co = (inc @ inc.T).tocsr()
    co.data[:] = 1
    deg = np.asarray(co.sum(axis=1)).ravel()
    # the diagonal is set exactly for vertices with at least one feature
    return deg - (a.vertex_counts() > 0)
