import math

import numpy as np
import pytest

from app.core.errors import IndexRangeError
from app.core.harmonics import (
    ShIndex,
    acn,
    acn_indices,
    acn_inverse,
    channel_count,
    circular_harmonic,
    equator_table,
    gauss_grid,
    n_factor,
    sh_matrix,
    sph_harmonic,
)
from tests.utils import Y00


class TestCircularHarmonics:
    def test_branches(self):
        assert circular_harmonic(0, 1.234) == 1.0
        assert circular_harmonic(2, 0.0) == pytest.approx(math.sqrt(2), abs=1e-15)
        assert circular_harmonic(-1, math.pi / 2) == pytest.approx(math.sqrt(2), abs=1e-15)
        assert abs(circular_harmonic(3, math.pi / 6)) < 1e-15

    def test_orthonormality(self):
        alpha = 2 * np.pi * np.arange(1024) / 1024
        for m in range(-8, 9):
            for mp in range(-8, 9):
                value = np.mean(circular_harmonic(m, alpha) * circular_harmonic(mp, alpha))
                assert value == pytest.approx(1.0 if m == mp else 0.0, abs=1e-12)

    def test_unwrapped_azimuth(self):
        assert circular_harmonic(3, 0.4 + 6 * math.pi) == pytest.approx(circular_harmonic(3, 0.4), abs=1e-12)


class TestNFactor:
    def test_examples(self):
        assert n_factor(0, 0, math.pi / 2) == pytest.approx(0.28209479, abs=1e-8)
        assert n_factor(1, 0, math.pi / 2) == 0.0
        assert n_factor(1, 1, math.pi / 2) == pytest.approx(math.sqrt(3 / (8 * math.pi)), rel=1e-12)

    def test_symmetric_in_m(self):
        beta = np.linspace(0, np.pi, 19)
        for n in range(7):
            for m in range(1, n + 1):
                np.testing.assert_array_equal(n_factor(n, m, beta), n_factor(n, -m, beta))

    def test_invalid_index(self):
        with pytest.raises(IndexRangeError):
            n_factor(1, 2, 0.3)

    def test_high_order_does_not_overflow(self):
        assert np.isfinite(n_factor(40, 30, 1.0))


class TestSphericalHarmonics:
    def test_examples(self):
        assert sph_harmonic(0, 0, 0.7, 2.1) == pytest.approx(0.28209479, abs=1e-8)
        assert sph_harmonic(1, 1, math.pi / 2, 0.0) == pytest.approx(0.48860251, abs=1e-8)
        assert sph_harmonic(2, -1, math.pi / 2, 1.3) == 0.0

    def test_equator_parity(self):
        alpha = np.linspace(0, 2 * np.pi, 13)
        for n in range(9):
            for m in range(-n, n + 1):
                if (n + abs(m)) % 2:
                    assert np.all(sph_harmonic(n, m, math.pi / 2, alpha) == 0.0)

    def test_orthonormality_to_order_6(self):
        colat, azi, weights = gauss_grid(6)
        basis = sh_matrix(6, colat, azi)
        gram = basis.T @ (weights[:, np.newaxis] * basis)
        assert np.max(np.abs(gram - np.eye(channel_count(6)))) < 1e-10

    def test_gauss_grid_weights(self):
        _, _, weights = gauss_grid(5)
        assert weights.sum() == pytest.approx(4 * math.pi, rel=1e-12)

    def test_sh_matrix_columns_follow_acn(self):
        basis = sh_matrix(3, [0.4], [1.1])
        for idx in acn_indices(3):
            assert basis[0, acn(idx.n, idx.m)] == pytest.approx(sph_harmonic(idx.n, idx.m, 0.4, 1.1), abs=1e-15)


class TestAcn:
    @pytest.mark.parametrize("n,m,c", [(0, 0, 0), (1, -1, 1), (3, 2, 14)])
    def test_channel_numbers(self, n, m, c):
        assert acn(n, m) == c

    @pytest.mark.parametrize("c,n,m", [(0, 0, 0), (6, 2, 0), (15, 3, 3)])
    def test_inverse(self, c, n, m):
        assert acn_inverse(c) == ShIndex(n, m)

    def test_bijection(self):
        for c in range(65 * 65):
            idx = acn_inverse(c)
            assert acn(idx.n, idx.m) == c

    def test_invalid(self):
        with pytest.raises(IndexRangeError):
            acn(2, 3)
        with pytest.raises(IndexRangeError):
            ShIndex(1, -2)
        with pytest.raises(IndexRangeError):
            acn_inverse(-1)


class TestEquatorTable:
    def test_order_zero(self):
        table = equator_table(0)
        assert table.values.shape == (1,)
        assert table.value(0, 0) == pytest.approx(Y00, abs=1e-15)

    def test_parity_zeros_exact(self):
        table = equator_table(2)
        assert table.value(2, 1) == 0.0
        assert table.value(2, -1) == 0.0

    def test_matches_recomputation(self):
        table = equator_table(4)
        for idx in acn_indices(4):
            # an azimuth where C_m is nonzero
            alpha = 0.0 if idx.m >= 0 else math.pi / (2 * abs(idx.m))
            expected = sph_harmonic(idx.n, idx.m, math.pi / 2, alpha) / circular_harmonic(idx.m, alpha)
            assert table.value(idx.n, idx.m) == pytest.approx(expected, abs=1e-14)

    def test_depends_on_abs_m(self):
        table = equator_table(8)
        for n in range(9):
            for m in range(1, n + 1):
                assert table.value(n, m) == table.value(n, -m)

    def test_read_only(self):
        with pytest.raises(ValueError):
            equator_table(3).values[0] = 1.0

    def test_cap(self):
        with pytest.raises(IndexRangeError):
            equator_table(65)
        with pytest.raises(IndexRangeError):
            equator_table(3).value(4, 0)
