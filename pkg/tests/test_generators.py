"""Samplers: exact small cases, 3-sigma distributional checks, determinism."""
from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigsharp.generators import (MSpec, Seed, aux_degree_stats, decode_pair_index, gen_gnp, gen_gstar, gen_rig,
                                 gen_uniform_rig, sample_subsets)
from rigsharp.graph import FeatureAssignment, complete_graph, empty_graph, intersection_graph


def within_3sigma(values, mean, var):
    values = np.asarray(values, dtype=float)
    se = math.sqrt(var / values.size)
    assert abs(values.mean() - mean) <= 3 * se, (values.mean(), mean, se)


class TestSeed:
    def test_streams_are_independent_and_reproducible(self):
        a = Seed(7, 1).rng().integers(0, 2**63, size=4)
        assert np.array_equal(a, Seed(7, 1).rng().integers(0, 2**63, size=4))
        assert not np.array_equal(a, Seed(7, 2).rng().integers(0, 2**63, size=4))
        assert not np.array_equal(a, Seed(8, 1).rng().integers(0, 2**63, size=4))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Seed(-1)
        with pytest.raises(ValueError):
            Seed(0, 1 << 64)


@given(n=st.integers(2, 60))
@settings(max_examples=40, deadline=None)
def test_decode_pair_index_is_row_major(n):
    pairs = decode_pair_index(n, np.arange(n * (n - 1) // 2))
    assert [tuple(p) for p in pairs] == list(itertools.combinations(range(n), 2))


def test_sample_subsets_are_distinct_and_uniform():
    rng = Seed(3).rng()
    rows, elems = sample_subsets(rng, 6, np.full(30000, 2))
    pairs = np.sort(elems.reshape(-1, 2), axis=1)
    assert np.all(pairs[:, 0] != pairs[:, 1])
    counts = np.bincount(pairs[:, 0] * 6 + pairs[:, 1], minlength=36)
    nonzero = counts[counts > 0]
    assert nonzero.size == 15
    expected, var = 30000 / 15, 30000 * (1 / 15) * (14 / 15)
    assert np.all(np.abs(nonzero - expected) <= 4 * math.sqrt(var))


class TestGnp:
    def test_extremes(self):
        assert gen_gnp(5, 0.0, Seed(1)) == empty_graph(5)
        assert gen_gnp(5, 1.0, Seed(1)) == complete_graph(5)

    def test_edge_count_mean(self):
        rng = Seed(11).rng()
        within_3sigma([gen_gnp(100, 0.1, rng).num_edges for _ in range(10_000)], 495.0, 4950 * 0.1 * 0.9)

    def test_sparse_path_edge_count(self):
        rng = Seed(12).rng()
        within_3sigma([gen_gnp(200, 0.01, rng).num_edges for _ in range(4000)], 199.0, 19900 * 0.01 * 0.99)

    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            gen_gnp(5, 1.5, Seed(0))


class TestRig:
    def test_extremes(self):
        a, g = gen_rig(4, 3, 0.0, Seed(0))
        assert a.num_incidences == 0 and g == empty_graph(4)
        a, g = gen_rig(4, 3, 1.0, Seed(0))
        assert all(list(a.features_of(v)) == [0, 1, 2] for v in range(4)) and g == complete_graph(4)

    def test_feature_count_distributions(self):
        rng = Seed(21).rng()
        wv, vw = [], []
        for _ in range(10_000):
            a, _ = gen_rig(50, 1000, 0.01, rng)
            wv.append(len(a.features_of(0)))
            vw.append(len(a.vertices_of(0)))
        within_3sigma(wv, 10.0, 1000 * 0.01 * 0.99)
        within_3sigma(vw, 0.5, 50 * 0.01 * 0.99)

    def test_consistency_and_degree_bound(self):
        for i in range(200):
            a, g = gen_rig(60, 300, 0.02, Seed(5, i))
            assert g == intersection_graph(a)
            assert np.all(g.degrees() <= aux_degree_stats(a))

    def test_deterministic(self):
        assert gen_rig(80, 5000, 0.003, Seed(9, 4))[1] == gen_rig(80, 5000, 0.003, Seed(9, 4))[1]


class TestUniformRig:
    def test_extremes(self):
        assert gen_uniform_rig(3, 5, 0, Seed(0))[1] == empty_graph(3)
        assert gen_uniform_rig(3, 5, 5, Seed(0))[1] == complete_graph(3)

    def test_edge_probability(self):
        rng = Seed(31).rng()
        hits = [gen_uniform_rig(2, 4, 2, rng)[1].num_edges for _ in range(100_000)]
        p = 1 - math.comb(2, 2) / math.comb(4, 2)
        assert p == pytest.approx(5 / 6)
        within_3sigma(hits, p, p * (1 - p))

    def test_rejects_oversized_budget(self):
        with pytest.raises(ValueError):
            gen_uniform_rig(3, 2, 3, Seed(0))


class TestGstar:
    def test_constant_counts(self):
        assert gen_gstar(5, MSpec.constant(0), Seed(0))[1] == empty_graph(5)
        assert gen_gstar(5, MSpec.constant(1), Seed(0))[1].num_edges == 1

    def test_single_edge_probability(self):
        rng = Seed(41).rng()
        ones = [gen_gstar(4, MSpec.constant(2), rng)[1].num_edges == 1 for _ in range(100_000)]
        within_3sigma(ones, 1 / 6, (1 / 6) * (5 / 6))

    @pytest.mark.parametrize("spec", [MSpec.binomial(40, 0.3), MSpec.poisson(7.5)])
    def test_draw_count_moments(self, spec):
        rng = Seed(42).rng()
        lengths = np.array([len(gen_gstar(10, spec, rng)[0]) for _ in range(20_000)], dtype=float)
        within_3sigma(lengths, spec.mean, spec.variance)
        # sample variance within a generous band (its own sd is about var*sqrt(2/N) for light tails)
        assert abs(lengths.var() - spec.variance) <= 4 * spec.variance * math.sqrt(2 / lengths.size) + 0.05

    def test_pmf_sums_to_one(self):
        for spec in (MSpec.binomial(12, 0.4), MSpec.poisson(2.0), MSpec.constant(3)):
            assert sum(spec.pmf(t) for t in range(80)) == pytest.approx(1.0, abs=1e-12)


class TestAuxDegree:
    def test_examples(self):
        assert list(aux_degree_stats(FeatureAssignment(3, 2, [[], [], []]))) == [0, 0, 0]
        assert aux_degree_stats(FeatureAssignment(3, 1, [[0], [0], [0]]))[0] == 2
        a = FeatureAssignment(3, 2, [[0, 1], [0, 1], [1]])
        assert aux_degree_stats(a)[0] == 3
