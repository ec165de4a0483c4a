import itertools

import numpy as np
import pytest

from tosda import (
    InvalidParameterError,
    LagMultiset,
    SensorArray,
    build_generator,
    build_to_sda,
    build_ula,
    cross_sum,
    index_lag_map,
    second_order,
    to_eca,
    toca,
)
from tosda.coarray import brute_force_lag_multiset, flat_index


def brute_pairs(a, b, op):
    return {op(x, y) for x in a for y in b}


class TestCrossSum:
    def test_singletons(self):
        assert cross_sum({0}, {5}) == {5}

    def test_small(self):
        assert cross_sum({0, 1}, {0, 1}) == {0, 1, 2}

    def test_generator_sum_is_gapless(self):
        # second-order sums of the (1, 3) generator fill 0..12 exactly
        g = set(build_generator("cna", 1, 3).positions)
        assert cross_sum(g, g) == set(range(13))

    def test_triple(self):
        assert cross_sum({0, 1}, {0, 1}, {0, 1}) == {0, 1, 2, 3}

    def test_empty_rejected(self):
        with pytest.raises(InvalidParameterError):
            cross_sum(set(), {1})

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        a = set(rng.integers(0, 30, size=5).tolist())
        b = set(rng.integers(0, 30, size=4).tolist())
        assert cross_sum(a, b) == brute_pairs(a, b, lambda x, y: x + y)


class TestLagMultiset:
    def test_total(self):
        w = LagMultiset({0: 2, 3: 1})
        assert w.total == 3
        assert w[0] == 2 and w[7] == 0

    def test_addition_merges_counts(self):
        w = LagMultiset({0: 1, 1: 2}) + LagMultiset({1: 3, 5: 1})
        assert w.entries == {0: 1, 1: 5, 5: 1}

    def test_rejects_zero_count(self):
        with pytest.raises(InvalidParameterError):
            LagMultiset({0: 0})


class TestSecondOrder:
    def test_ula_dca_attains_lower_bound(self):
        rep = second_order(build_ula(3), "DCA")
        assert rep.phi_u == (-2, -1, 0, 1, 2)
        assert rep.size_u == 5

    def test_generator_sca_gapless(self):
        rep = second_order(SensorArray("g", (0, 1, 3, 5, 6)), "SCA")
        assert rep.phi_u == tuple(range(13))
        assert rep.holes == ()

    def test_holey_dca(self):
        rep = second_order(SensorArray("a", (0, 1, 4)), "DCA")
        assert rep.phi_u == (-4, -3, -1, 0, 1, 3, 4)
        assert rep.holes == (-2, 2)
        assert rep.one_sided_z == 1

    def test_weights_total(self):
        arr = SensorArray("a", (0, 2, 3, 9))
        for kind in ("dca", "sca"):
            assert second_order(arr, kind).weights.total == 16

    def test_bad_kind(self):
        with pytest.raises(InvalidParameterError):
            second_order(build_ula(2), "tca")


class TestToca:
    def test_ula2_case1(self):
        w = toca(build_ula(2), 1)
        assert w.entries == {0: 1, 1: 3, 2: 3, 3: 1}

    def test_case4_mirrors_case1(self):
        arr = SensorArray("a", (0, 2, 5))
        w1, w4 = toca(arr, 1), toca(arr, 4)
        assert w4.entries == {-lag: count for lag, count in w1.entries.items()}

    def test_case3_mirrors_case2(self):
        arr = SensorArray("a", (0, 1, 4, 9))
        w2, w3 = toca(arr, 2), toca(arr, 3)
        assert w3.entries == {-lag: count for lag, count in w2.entries.items()}

    def test_single_sensor(self):
        assert toca(SensorArray("a", (0,)), 2).entries == {0: 1}

    def test_bad_case(self):
        with pytest.raises(InvalidParameterError):
            toca(build_ula(2), 5)


class TestToEca:
    def test_ula3_golden(self):
        rep = to_eca(build_ula(3))
        assert rep.phi_u == tuple(range(-6, 7))
        assert rep.size_u == 13
        assert rep.one_sided_z == 6
        assert rep.holes == ()
        assert rep.symmetric

    def test_single_sensor(self):
        rep = to_eca(SensorArray("a", (0,)))
        assert rep.phi_u == (0,)
        assert rep.one_sided_z == 0

    def test_to_sda_cna8_consecutive_segment(self):
        arr, _ = build_to_sda("cna", 8)
        rep = to_eca(arr)
        assert rep.one_sided_z == 93
        # lags continue beyond the consecutive segment, with gaps
        assert rep.phi_u[-1] == 3 * 81
        assert len(rep.holes) > 0

    @pytest.mark.parametrize("n", range(1, 8))
    def test_total_multiplicity(self, n):
        assert to_eca(build_ula(n)).weights.total == 4 * n**3

    @pytest.mark.parametrize("seed", range(8))
    def test_symmetry_of_weights(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        rest = rng.choice(np.arange(1, 25), size=n - 1, replace=False)
        arr = SensorArray("r", tuple(sorted([0, *rest.tolist()])))
        w = to_eca(arr).weights
        for lag, count in w.entries.items():
            assert w[-lag] == count

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_pure_python_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(2, 6))
        rest = rng.choice(np.arange(1, 30), size=n - 1, replace=False)
        positions = tuple(sorted([0, *rest.tolist()]))
        arr = SensorArray("r", positions)
        assert to_eca(arr).weights == brute_force_lag_multiset(positions)

    def test_report_json_shape(self):
        rep = to_eca(build_ula(2))
        blob = rep.to_json_dict()
        assert set(blob) == {"phi_u", "weights", "Z", "holes", "symmetric"}
        assert blob["Z"] == 3
        assert blob["weights"]["0"] == rep.weights[0]


class TestIndexLagMap:
    def test_trivial_entries(self):
        lags = index_lag_map(build_ula(2))
        assert lags[flat_index(2, 1, 1, 1, 1)] == 0
        assert lags[flat_index(2, 1, 2, 2, 2)] == 3
        assert lags[flat_index(2, 2, 2, 2, 1)] == 2  # 1 + 1 - 0

    def test_size(self):
        arr = build_ula(3)
        assert index_lag_map(arr).shape == (4 * 27,)

    def test_histogram_reproduces_weights(self):
        arr = build_ula(3)
        lags = index_lag_map(arr)
        values, counts = np.unique(lags, return_counts=True)
        assert LagMultiset(dict(zip(values.tolist(), counts.tolist()))) == to_eca(arr).weights

    def test_explicit_loop_oracle(self):
        arr = SensorArray("a", (0, 1, 4))
        n = arr.size
        p = arr.positions
        lags = index_lag_map(arr)
        signs = {1: (1, 1, 1), 2: (1, 1, -1), 3: (-1, -1, 1), 4: (-1, -1, -1)}
        for j, (s1, s2, s3) in signs.items():
            for l1, l2, l3 in itertools.product(range(1, n + 1), repeat=3):
                want = s1 * p[l1 - 1] + s2 * p[l2 - 1] + s3 * p[l3 - 1]
                assert lags[flat_index(n, j, l1, l2, l3)] == want
