"""Joint sampling of G(n, p_minus) inside the random intersection graph.

The construction embeds ``floor(X_w / 2)`` uniform pair draws inside every
feature clique ``V_w``.  A Poisson number ``K`` of those draws, coupled to
the realised feature sizes, forms a G*(Po(lam)) sample, which is exactly
G(n, 1 - exp(-lam / C(n,2))); thinning it gives G(n, p_minus).  When the
count coupling succeeds the lower graph is a subgraph of the intersection
graph by construction, and that relation is re-checked on every sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import stats

from .generators import MSpec, Seed, as_rng, gen_gnp, sample_assignment, uniform_pair_draws
from .graph import DrawSequence, FeatureAssignment, Graph, collapse, intersection_graph, is_subgraph

SMALL_NP, LARGE_NP = "small_np", "large_np"
COUNT_DOMINATION, BIN_PO_MISMATCH = "count_domination", "bin_po_mismatch"
# np inside this window is neither small nor large; outcomes are tagged, not refused
UNSUPPORTED_NP = (0.5, 2.0)


class PhatMinus(NamedTuple):
    value: float
    regime: str
    degenerate: bool
    raw: float


def select_regime(n: int, p: float) -> str:
    return SMALL_NP if n * p < 1 else LARGE_NP


def default_omega(n: int, m: int, p: float) -> float:
    """``(m n p) ** (1/4)``: diverges and is ``o(sqrt(m n p))``."""
    return (m * n * p) ** 0.25


def _check_hypothesis(m: int, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if m * p * p >= 1:
        raise ValueError(f"m*p^2 = {m * p * p:.6g} >= 1 violates the coupling hypothesis")


def phat_minus(n: int, m: int, p: float, omega_c: float | None = None, regime: str | None = None) -> PhatMinus:
    """Edge probability of the G(n, p) graph coupled below the intersection graph.

    Small ``np``: ``m p^2 (1 - (n-2) p - m p^2 / 2)``.
    Large ``np``: ``(m p / n)(1 - omega/sqrt(m n p) - 2/(n p) - m p / (2 n))``.
    Negative values are clamped to 0 and flagged as degenerate.
    """
    _check_hypothesis(m, p)
    regime = regime or select_regime(n, p)
    if regime == SMALL_NP:
        raw = m * p * p * (1 - (n - 2) * p - m * p * p / 2)
    elif regime == LARGE_NP:
        if p == 0:
            raise ValueError("the large-np formula needs p > 0")
        mnp = m * n * p
        omega_c = default_omega(n, m, p) if omega_c is None else omega_c
        raw = (m * p / n) * (1 - omega_c / math.sqrt(mnp) - 2 / (n * p) - m * p / (2 * n))
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if raw < 0:
        return PhatMinus(0.0, regime, True, raw)
    return PhatMinus(raw, regime, False, raw)


@dataclass(frozen=True)
class CouplingParams:
    n: int
    m: int
    p: float
    omega_c: float | None = None
    regime: str | None = None

    def __post_init__(self):
        if self.n < 2 or self.m < 1:
            raise ValueError("need n >= 2 and m >= 1")
        _check_hypothesis(self.m, self.p)
        if self.regime not in (None, SMALL_NP, LARGE_NP):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.resolved_regime == LARGE_NP:
            if self.p == 0:
                raise ValueError("the large-np regime needs p > 0")
            w = self.omega
            if not 0 < w < math.sqrt(self.m * self.n * self.p):
                raise ValueError("omega_c must satisfy 0 < omega_c < sqrt(m n p)")

    @property
    def resolved_regime(self) -> str:
        return self.regime or select_regime(self.n, self.p)

    @property
    def omega(self) -> float:
        if self.omega_c is not None:
            return self.omega_c
        return default_omega(self.n, self.m, self.p) if self.p > 0 else 0.0

    @property
    def regime_supported(self) -> bool:
        lo, hi = UNSUPPORTED_NP
        return not lo <= self.n * self.p <= hi


@dataclass
class CouplingOutcome:
    g_lower: Graph
    g_rig: Graph
    assignment: FeatureAssignment
    success: bool
    failure_stage: str | None
    regime: str
    regime_supported: bool
    phat_minus: float
    phat_prime: float
    counters: dict = field(default_factory=dict)


def _embed_feature_sets(n: int, sizes: np.ndarray, rng: np.random.Generator):
    """Per feature, ``floor(X_w/2)`` uniform draws and a vertex set ``V_w`` containing their ends.

    Returns the draws grouped by feature (``draw_owner`` gives the feature
    of every draw, in feature order) and the incidence arrays of the
    assignment.  ``V_w`` is the set of non-isolated draw vertices topped up
    with uniformly chosen extra vertices, so it is a uniform ``X_w``-subset.
    """
    halves = sizes // 2
    draw_owner = np.repeat(np.arange(sizes.size), halves)
    draws = uniform_pair_draws(n, int(halves.sum()), rng)

    verts, feats = [], []
    singles = np.flatnonzero(sizes == 1)
    verts.append(rng.integers(0, n, size=singles.size))
    feats.append(singles)

    multi = np.flatnonzero(sizes >= 2)
    bounds = np.concatenate([[0], np.cumsum(halves)])
    for w in multi.tolist():
        ends = np.unique(draws[bounds[w]:bounds[w + 1]])
        extra = int(sizes[w]) - ends.size
        if extra:
            # the c-th vertex outside `ends` is c + #{j : ends[j] - j <= c}
            c = rng.choice(n - ends.size, size=extra, replace=False)
            c = np.sort(c)
            c = c + np.searchsorted(ends - np.arange(ends.size), c, side="right")
            members = np.concatenate([ends, c])
        else:
            members = ends
        verts.append(members)
        feats.append(np.full(members.size, w))
    return draws, draw_owner, bounds, np.concatenate(verts), np.concatenate(feats)


def _maximal_coupling_given(b: int, law_b, law_k, support: np.ndarray, rng: np.random.Generator) -> int:
    """Sample ``K ~ law_k`` from the maximal coupling with an observed ``B = b ~ law_b``."""
    pb, pk = law_b.pmf(b), law_k.pmf(b)
    if pb > 0 and rng.random() * pb < pk:
        return b
    resid = np.clip(law_k.pmf(support) - law_b.pmf(support), 0.0, None)
    total = resid.sum()
    if total <= 0:
        return b
    i = np.searchsorted(np.cumsum(resid), rng.random() * total, side="right")
    return int(support[min(i, support.size - 1)])


def couple(params: CouplingParams, seed: Seed | np.random.Generator) -> CouplingOutcome:
    n, m, p = params.n, params.m, params.p
    rng = as_rng(seed)
    regime = params.resolved_regime
    pm = phat_minus(n, m, p, params.omega, regime)
    pairs_total = n * (n - 1) // 2

    sizes = rng.binomial(n, p, size=m)
    draws, owner, bounds, verts, feats = _embed_feature_sets(n, sizes, rng)
    assignment = FeatureAssignment.from_incidences(n, m, verts, feats)
    g_rig = intersection_graph(assignment)
    halves = sizes // 2
    T = int(halves.sum())

    counters: dict = {"T": T}
    if regime == SMALL_NP:
        q = math.comb(n, 2) * p * p * (1 - p) ** (n - 2)
        lam = m * q
        B = int((sizes == 2).sum())
        Z1 = int((sizes >= 2).sum())
        law_b, law_k = stats.binom(m, q), stats.poisson(lam)
        if lam > 0:
            # both laws put < 1e-20 mass beyond this point
            support = np.arange(int(lam + 12 * math.sqrt(lam) + 30) + 1)
            K = _maximal_coupling_given(B, law_b, law_k, support, rng)
        else:
            K = 0
        success = K <= Z1
        stage = None if success else BIN_PO_MISMATCH
        counters.update(Z1=Z1, B=B, K=K, lam=lam, q=q)
        # one draw per feature with X_w >= 2, features in random order
        pool = draws[bounds[:-1][rng.permutation(np.flatnonzero(sizes >= 2))]] if Z1 else np.empty((0, 2), dtype=np.int64)
    else:
        mnp = m * n * p
        s = math.sqrt(mnp)
        omega = params.omega
        a = (mnp / 2) * (1 - omega / (2 * s) - 2 / (n * p))
        lam = max((mnp / 2) * (1 - omega / s - 2 / (n * p)), 0.0)
        Z2 = int(sizes.sum())
        K = int(rng.poisson(lam))
        success = K <= a and Z2 / 2 - m >= a
        stage = None if success else COUNT_DOMINATION
        counters.update(Z2=Z2, K=K, lam=lam, pivot=a)
        # round-robin over features in random order: all first draws, then second draws, ...
        order = rng.permutation(np.flatnonzero(halves >= 1))
        feat_rank = np.empty(m, dtype=np.int64)
        feat_rank[order] = np.arange(order.size)
        within = np.arange(owner.size) - bounds[owner]
        rank = np.lexsort((feat_rank[owner], within))
        pool = draws[rank]

    if K > len(pool):
        # only on failure: keep the lower graph's law exact with fresh draws
        pool = np.concatenate([pool, uniform_pair_draws(n, K - len(pool), rng)])
    lower_draws = DrawSequence(n, pool[:K])
    phat_prime = -math.expm1(-lam / pairs_total) if lam > 0 else 0.0
    if pm.value > phat_prime * (1 + 1e-12):
        raise ArithmeticError(f"p_minus={pm.value} exceeds p_hat'={phat_prime}; thinning impossible")
    g_star = collapse(lower_draws)
    if pm.value == 0.0 or g_star.num_edges == 0:
        g_lower = Graph.from_keys(n, np.empty(0, dtype=np.int64))
    else:
        keep = rng.random(g_star.num_edges) < pm.value / phat_prime
        g_lower = Graph.from_keys(n, g_star.keys[keep])

    if success and not is_subgraph(g_lower, g_rig):
        raise RuntimeError("coupling invariant violated: lower graph is not a subgraph")
    counters["degenerate"] = pm.degenerate
    return CouplingOutcome(
        g_lower=g_lower,
        g_rig=g_rig,
        assignment=assignment,
        success=bool(success),
        failure_stage=stage,
        regime=regime,
        regime_supported=params.regime_supported,
        phat_minus=pm.value,
        phat_prime=phat_prime,
        counters=counters,
    )


def couple_gnp_monotone(n: int, p_lo: float, p_hi: float, seed) -> tuple[Graph, Graph]:
    """``G(n, p_lo)`` inside ``G(n, p_hi)`` by independent edge thinning."""
    if not 0 <= p_lo <= p_hi <= 1:
        raise ValueError("need 0 <= p_lo <= p_hi <= 1")
    rng = as_rng(seed)
    hi = gen_gnp(n, p_hi, rng)
    if p_hi == 0:
        return hi, hi
    keep = rng.random(hi.num_edges) < p_lo / p_hi
    return Graph.from_keys(n, hi.keys[keep]), hi


def couple_rig_monotone(n: int, m: int, p_lo: float, p_hi: float, seed) -> tuple[Graph, Graph]:
    """Intersection graphs at ``p_lo <= p_hi`` sharing thinned feature incidences."""
    if not 0 <= p_lo <= p_hi <= 1:
        raise ValueError("need 0 <= p_lo <= p_hi <= 1")
    rng = as_rng(seed)
    a_hi = sample_assignment(n, m, p_hi, rng)
    verts = np.repeat(np.arange(n), a_hi.vertex_counts())
    feats = a_hi._v_feat
    keep = rng.random(verts.size) < (p_lo / p_hi if p_hi > 0 else 0.0)
    a_lo = FeatureAssignment.from_incidences(n, m, verts[keep], feats[keep])
    return intersection_graph(a_lo), intersection_graph(a_hi)


# -- total variation -------------------------------------------------------

def tv_bound(m: int, p_hat: float) -> float:
    """Upper bound ``2 p_hat`` on the graph-level distance between G*(Bin(m, p_hat)) and G*(Po(m p_hat))."""
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError("p_hat must lie in [0, 1]")
    if m < 0:
        raise ValueError("m must be nonnegative")
    return 2.0 * p_hat


def surjections(t: int, e: int) -> int:
    """Number of length-``t`` sequences over ``e`` symbols using every symbol."""
    return sum((-1) ** j * math.comb(e, j) * (e - j) ** t for j in range(e + 1))


def _support(law: MSpec, tail: float = 1e-13) -> range:
    if law.kind == "constant":
        return range(law.t, law.t + 1)
    if law.kind == "binomial":
        return range(0, law.N + 1)
    hi = int(stats.poisson(law.lam).isf(tail)) + 1 if law.lam > 0 else 0
    return range(0, hi + 1)


def _gstar_profile(n_pairs: int, law: MSpec) -> list[float]:
    """``P(G*(M) = G)`` for any fixed graph with ``e`` edges, indexed by ``e``."""
    prof = [0.0] * (n_pairs + 1)
    for t in _support(law):
        w = law.pmf(t)
        if w == 0.0:
            continue
        denom = n_pairs**t
        for e in range(min(t, n_pairs) + 1):
            s = surjections(t, e)
            if s:
                prof[e] += w * (s / denom)
    return prof


def exact_tv_small(n: int, law1: MSpec | float, law2: MSpec | float) -> float:
    """Exact ``sum_G |P1(G) - P2(G)|`` over all graphs on ``n <= 5`` vertices.

    Each law is an :class:`MSpec` (the G*(M) model) or a float ``p_hat``
    (the G(n, p_hat) model).  Note the sum is twice the ``max over events``
    form of the distance.
    """
    if n > 5:
        raise ValueError("exact enumeration is limited to n <= 5")
    if n < 2:
        return 0.0
    N = n * (n - 1) // 2

    def profile(law):
        if isinstance(law, MSpec):
            return _gstar_profile(N, law)
        ph = float(law)
        if not 0 <= ph <= 1:
            raise ValueError("p_hat must lie in [0, 1]")
        return [ph**e * (1 - ph) ** (N - e) for e in range(N + 1)]

    f1, f2 = profile(law1), profile(law2)
    return math.fsum(abs(f1[e] - f2[e]) for e in (mask.bit_count() for mask in range(1 << N)))


# -- Chernoff-type tail bounds ---------------------------------------------

def chernoff_bound(mean: float, t: float) -> float:
    """``P(|X - EX| >= t) <= 2 exp(-3 t^2 / (2 (3 EX + t)))`` for binomial ``X``."""
    if t <= 0:
        raise ValueError("deviation t must be positive")
    if mean < 0:
        raise ValueError("mean must be nonnegative")
    return 2.0 * math.exp(-3.0 * t * t / (2.0 * (3.0 * mean + t)))


class PoissonTailBound(NamedTuple):
    value: float
    caveat: str


def chernoff_poisson_bound(lam: float, t: float, i: int = 1) -> PoissonTailBound:
    """Leading term of the Poisson tail bound; the additive ``o(n^-i)`` term has no explicit constant."""
    return PoissonTailBound(chernoff_bound(lam, t), f"+ o(n^-{i}) (not evaluated)")
