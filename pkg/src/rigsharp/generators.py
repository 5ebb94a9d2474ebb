"""Seeded samplers for G(n, p), the random intersection graph and G*(M).

Every sampler takes a :class:`Seed`.  A seed maps to a Philox-4x64
counter-based generator keyed by ``(root, stream)``, so distinct streams are
independent and a Monte Carlo harness can hand sample ``i`` the stream ``i``
without coordinating between workers.  Reproducibility is bit-exact for a
given numpy version.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import DrawSequence, FeatureAssignment, Graph, collapse, intersection_graph

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Seed:
    root: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.root <= _MASK64 and 0 <= self.stream <= _MASK64):
            raise ValueError("root and stream must be 64-bit unsigned integers")

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=(self.stream << 64) | self.root))

    def child(self, stream: int) -> Seed:
        return Seed(self.root, stream)


def as_rng(seed: Seed | np.random.Generator) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else seed.rng()


@dataclass(frozen=True)
class MSpec:
    """Law of the number of draws ``M`` in G*(M)."""

    kind: str
    t: int = 0
    N: int = 0
    q: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if self.kind == "constant":
            if self.t < 0:
                raise ValueError("constant count t must be >= 0")
        elif self.kind == "binomial":
            if self.N < 0 or not 0.0 <= self.q <= 1.0:
                raise ValueError("binomial needs N >= 0 and 0 <= q <= 1")
        elif self.kind == "poisson":
            if self.lam < 0:
                raise ValueError("poisson mean must be >= 0")
        else:
            raise ValueError(f"unknown MSpec kind {self.kind!r}")

    @classmethod
    def constant(cls, t: int) -> MSpec:
        return cls("constant", t=t)

    @classmethod
    def binomial(cls, N: int, q: float) -> MSpec:
        return cls("binomial", N=N, q=q)

    @classmethod
    def poisson(cls, lam: float) -> MSpec:
        return cls("poisson", lam=lam)

    @property
    def mean(self) -> float:
        return {"constant": float(self.t), "binomial": self.N * self.q, "poisson": self.lam}[self.kind]

    @property
    def variance(self) -> float:
        return {"constant": 0.0, "binomial": self.N * self.q * (1 - self.q), "poisson": self.lam}[self.kind]

    def sample(self, rng: np.random.Generator) -> int:
        if self.kind == "constant":
            return self.t
        if self.kind == "binomial":
            return int(rng.binomial(self.N, self.q))
        return int(rng.poisson(self.lam))

    def pmf(self, t: int) -> float:
        if self.kind == "constant":
            return 1.0 if t == self.t else 0.0
        if self.kind == "binomial":
            if t < 0 or t > self.N:
                return 0.0
            return math.comb(self.N, t) * self.q**t * (1 - self.q) ** (self.N - t)
        if t < 0:
            return 0.0
        if self.lam == 0:
            return 1.0 if t == 0 else 0.0
        return math.exp(t * math.log(self.lam) - self.lam - math.lgamma(t + 1))


def _check_prob(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")


def decode_pair_index(n: int, idx: np.ndarray) -> np.ndarray:
    """Map indices in ``[0, C(n,2))`` to pairs ``(u, v)``, ``u < v``, in row-major order."""
    idx = np.asarray(idx, dtype=np.int64)
    # row u starts at u*(2n-u-1)/2; invert the quadratic then fix rounding
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * idx, 0.0))) / 2).astype(np.int64)
    start = u * (2 * n - u - 1) // 2
    over = start > idx
    u[over] -= 1
    start = u * (2 * n - u - 1) // 2
    nxt = (u + 1) * (2 * n - u - 2) // 2
    under = idx >= nxt
    u[under] += 1
    start = u * (2 * n - u - 1) // 2
    v = idx - start + u + 1
    return np.stack([u, v], axis=1)


def sample_subset(rng: np.random.Generator, population: int, size: int) -> np.ndarray:
    """Uniform ``size``-subset of ``range(population)`` (numpy's Floyd sampler when sparse)."""
    return rng.choice(population, size=size, replace=False, shuffle=False)


def sample_subsets(rng: np.random.Generator, population: int, sizes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One independent uniform subset per row, sizes given; returns (row, element) incidences.

    Sparse rows draw with replacement and redraw collisions, which yields
    a uniform subset because the procedure commutes with relabelling the
    population.  Dense rows fall back to per-row sampling.
    """
    sizes = np.asarray(sizes, dtype=np.int64)
    rows = np.repeat(np.arange(sizes.size, dtype=np.int64), sizes)
    if sizes.size == 0 or sizes.sum() == 0:
        return rows, np.empty(0, dtype=np.int64)
    if sizes.max() * 4 > population:
        elems = np.concatenate([sample_subset(rng, population, int(s)) for s in sizes])
        return rows, np.asarray(elems, dtype=np.int64)
    elems = rng.integers(0, population, size=rows.size)
    while True:
        key = rows * population + elems
        order = np.argsort(key, kind="stable")
        dup = np.zeros(key.size, dtype=bool)
        dup[order[1:]] = key[order[1:]] == key[order[:-1]]
        ndup = int(dup.sum())
        if ndup == 0:
            return rows, elems
        elems[dup] = rng.integers(0, population, size=ndup)


def gen_gnp(n: int, p_hat: float, seed: Seed | np.random.Generator) -> Graph:
    """Erdős–Rényi G(n, p_hat)."""
    _check_prob("p_hat", p_hat)
    rng = as_rng(seed)
    total = n * (n - 1) // 2
    if total == 0 or p_hat == 0.0:
        return Graph.from_keys(n, np.empty(0, dtype=np.int64))
    if p_hat > 0.1:
        idx = np.flatnonzero(rng.random(total) < p_hat)
    else:
        count = int(rng.binomial(total, p_hat))
        idx = sample_subset(rng, total, count)
    pairs = decode_pair_index(n, idx)
    return Graph.from_keys(n, pairs[:, 0] * n + pairs[:, 1])


def sample_assignment(n: int, m: int, p: float, seed: Seed | np.random.Generator) -> FeatureAssignment:
    """Feature sets of the binomial random intersection graph.

    Each vertex draws ``|W_v| ~ Bin(m, p)`` and then that many distinct
    features uniformly, which is the same law as including every
    ``(v, w)`` independently with probability ``p``.
    """
    _check_prob("p", p)
    rng = as_rng(seed)
    sizes = rng.binomial(m, p, size=n) if m > 0 else np.zeros(n, dtype=np.int64)
    verts, feats = sample_subsets(rng, m, sizes)
    return FeatureAssignment.from_incidences(n, m, verts, feats)


def gen_rig(n: int, m: int, p: float, seed: Seed | np.random.Generator) -> tuple[FeatureAssignment, Graph]:
    a = sample_assignment(n, m, p, seed)
    return a, intersection_graph(a)


def gen_uniform_rig(n: int, m: int, d: int, seed: Seed | np.random.Generator) -> tuple[FeatureAssignment, Graph]:
    """Uniform random intersection graph: every ``W_v`` is a uniform ``d``-subset."""
    if not 0 <= d <= m:
        raise ValueError(f"feature budget d={d} must satisfy 0 <= d <= m={m}")
    rng = as_rng(seed)
    verts, feats = sample_subsets(rng, m, np.full(n, d, dtype=np.int64))
    a = FeatureAssignment.from_incidences(n, m, verts, feats)
    return a, intersection_graph(a)


def uniform_pair_draws(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` i.i.d. uniform pairs of distinct vertices, as an ``(count, 2)`` array."""
    total = n * (n - 1) // 2
    if count and total == 0:
        raise ValueError("cannot draw vertex pairs with fewer than two vertices")
    return decode_pair_index(n, rng.integers(0, total, size=count)) if count else np.empty((0, 2), dtype=np.int64)


def gen_gstar(n: int, mspec: MSpec, seed: Seed | np.random.Generator) -> tuple[DrawSequence, Graph]:
    """G*(M): draw ``M`` pairs with repetition and keep every pair seen."""
    rng = as_rng(seed)
    d = DrawSequence(n, uniform_pair_draws(n, mspec.sample(rng), rng))
    return d, collapse(d)


def aux_degree_stats(a: FeatureAssignment) -> np.ndarray:
    """Per-vertex count of bipartite edges from ``W_v`` to the other vertices.

    ``Z_v = sum over w in W_v of (|V_w| - 1)``; an upper bound on ``deg(v)``.
    """
    sizes = a.feature_counts()
    z = np.zeros(a.n, dtype=np.int64)
    counts = a.vertex_counts()
    if a.num_incidences:
        owner = np.repeat(np.arange(a.n), counts)
        np.add.at(z, owner, sizes[a._v_feat] - 1)
    return z
