import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multinet.netcore import LayerGraph, MultiNet
from multinet.tensor import (
    Tensor3,
    contract1,
    contract2,
    contract12,
    from_multinet,
    frobenius_norm,
    frontal_slice,
    khatri_rao,
    mode_fold,
    mode_product,
    mode_unfold,
    outer3,
    read_tensor,
    write_tensor,
)
from oracles import loop_contract1, loop_contract2, loop_contract12, loop_norm, loop_outer, random_layer


def _multinet(mats):
    labels = tuple(str(i) for i in range(len(mats[0])))
    return MultiNet(tuple(LayerGraph(labels, a, name=f"L{k}") for k, a in enumerate(mats)))


class TestConstruction:
    def test_single_layer(self, rng):
        a = random_layer(rng, 4)
        t = from_multinet(_multinet([a]))
        assert t.shape == (4, 4, 1)
        np.testing.assert_array_equal(frontal_slice(t, 0), a)

    def test_direct_indexing(self):
        l1 = np.array([[0.0, 1.0], [0.0, 0.0]])
        l2 = np.array([[0.0, 7.0], [3.0, 0.0]])
        t = from_multinet(_multinet([l1, l2]))
        assert t[0, 1, 1] == 7.0
        assert t[1, 0, 1] == 3.0

    def test_random_round_trip(self, rng):
        mats = [random_layer(rng, 5) for _ in range(3)]
        t = from_multinet(_multinet(mats))
        for k in range(3):
            np.testing.assert_array_equal(frontal_slice(t, k), mats[k])

    def test_layout_is_first_index_fastest(self, rng):
        t = Tensor3(rng.random((3, 4, 2)))
        assert t.data.flags.f_contiguous
        assert not t.data.flags.writeable

    def test_slice_bounds(self):
        ones = Tensor3(np.ones((2, 2, 2)))
        np.testing.assert_array_equal(frontal_slice(ones, 0), np.ones((2, 2)))
        np.testing.assert_array_equal(frontal_slice(Tensor3.zeros((2, 2, 3)), 2), np.zeros((2, 2)))
        with pytest.raises(IndexError):
            frontal_slice(ones, 2)


class TestNorms:
    def test_values(self, rng):
        assert frobenius_norm(Tensor3(np.ones((2, 2, 2)))) == pytest.approx(2.8284271247461903, abs=1e-15)
        assert frobenius_norm(Tensor3.zeros((3, 3, 2))) == 0.0
        x = rng.random((4, 4, 2))
        assert frobenius_norm(x) == pytest.approx(loop_norm(x), rel=1e-12)

    def test_slice_decomposition(self, rng):
        x = Tensor3(rng.normal(size=(5, 5, 3)))
        total = sum(np.linalg.norm(frontal_slice(x, k)) ** 2 for k in range(3))
        assert frobenius_norm(x) ** 2 == pytest.approx(total, rel=1e-12)


class TestOuter:
    def test_values(self):
        t = outer3([1, 2], [1, 0], [3, 1])
        assert t[0, 0, 0] == 3 and t[1, 0, 0] == 6
        np.testing.assert_array_equal(t[0, 1, :], [0, 0])
        assert not np.any(outer3([0, 0], [1, 2], [3, 4]).data)

    def test_norm_factorizes(self, rng):
        for _ in range(10):
            u, v, w = rng.normal(size=3), rng.normal(size=3), rng.normal(size=3)
            t = outer3(u, v, w)
            np.testing.assert_allclose(t.data, loop_outer(u, v, w), rtol=0, atol=1e-15)
            expect = np.linalg.norm(u) * np.linalg.norm(v) * np.linalg.norm(w)
            assert frobenius_norm(t) == pytest.approx(expect, rel=1e-12)


class TestContractions:
    def test_all_ones(self):
        t = Tensor3(np.ones((2, 2, 2)))
        one = np.ones(2)
        np.testing.assert_array_equal(contract2(t, one, one), [4, 4])
        np.testing.assert_array_equal(contract1(t, one, one), [4, 4])
        np.testing.assert_array_equal(contract12(t, one, one), [4, 4])

    def test_basis_selection(self, rng):
        x = Tensor3(rng.random((4, 4, 3)))
        a = rng.random(4)
        for k in range(3):
            e = np.eye(3)[k]
            np.testing.assert_allclose(contract2(x, a, e), frontal_slice(x, k) @ a, rtol=1e-14)
            np.testing.assert_allclose(contract1(x, a, e), frontal_slice(x, k).T @ a, rtol=1e-14)
        np.testing.assert_array_equal(contract12(x, np.eye(4)[2], np.eye(4)[1]), x[2, 1, :])

    @pytest.mark.parametrize("seed", range(5))
    def test_loop_oracle(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(4, 4, 3))
        h, a, t = rng.normal(size=4), rng.normal(size=4), rng.normal(size=3)
        np.testing.assert_allclose(contract2(x, a, t), loop_contract2(x, a, t), rtol=0, atol=1e-12)
        np.testing.assert_allclose(contract1(x, h, t), loop_contract1(x, h, t), rtol=0, atol=1e-12)
        np.testing.assert_allclose(contract12(x, h, a), loop_contract12(x, h, a), rtol=0, atol=1e-12)

    def test_dimension_mismatch(self):
        x = Tensor3(np.ones((2, 3, 4)))
        with pytest.raises(ValueError):
            contract2(x, np.ones(2), np.ones(4))
        with pytest.raises(ValueError):
            contract1(x, np.ones(2), np.ones(3))
        with pytest.raises(ValueError):
            contract12(x, np.ones(3), np.ones(3))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_bilinear(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(3, 4, 2))
        a1, a2 = rng.normal(size=(2, 4))
        t1, t2 = rng.normal(size=(2, 2))
        c1, c2 = rng.normal(size=2)
        lhs = contract2(x, c1 * a1 + c2 * a2, t1)
        rhs = c1 * contract2(x, a1, t1) + c2 * contract2(x, a2, t1)
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)
        lhs = contract2(x, a1, c1 * t1 + c2 * t2)
        rhs = c1 * contract2(x, a1, t1) + c2 * contract2(x, a1, t2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_rank_one_identity(self, rng):
        u, v, w = rng.normal(size=5), rng.normal(size=4), rng.normal(size=3)
        a, s = rng.normal(size=4), rng.normal(size=3)
        np.testing.assert_allclose(contract2(outer3(u, v, w), a, s), u * (v @ a) * (w @ s), atol=1e-10)


class TestUnfold:
    def test_single_slice(self, rng):
        x = Tensor3(rng.random((2, 2, 1)))
        np.testing.assert_array_equal(mode_unfold(x, 1), frontal_slice(x, 0))

    def test_rank_one_unfoldings(self, rng):
        u, v, w = rng.normal(size=3), rng.normal(size=4), rng.normal(size=2)
        t = loop_outer(u, v, w)
        np.testing.assert_allclose(mode_unfold(t, 1), np.outer(u, np.kron(w, v)), atol=1e-15)
        np.testing.assert_allclose(mode_unfold(t, 2), np.outer(v, np.kron(w, u)), atol=1e-15)
        np.testing.assert_allclose(mode_unfold(t, 3), np.outer(w, np.kron(v, u)), atol=1e-15)

    def test_column_order(self):
        x = np.arange(24, dtype=float).reshape((2, 3, 4))
        # mode-1 column j + J*k holds x[:, j, k]
        unf = mode_unfold(x, 1)
        for j in range(3):
            for k in range(4):
                np.testing.assert_array_equal(unf[:, j + 3 * k], x[:, j, k])

    @pytest.mark.parametrize("mode", [1, 2, 3])
    def test_round_trip_and_norm(self, rng, mode):
        x = Tensor3(rng.normal(size=(3, 4, 2)))
        unf = mode_unfold(x, mode)
        np.testing.assert_array_equal(mode_fold(unf, mode, x.shape).data, x.data)
        assert np.linalg.norm(unf) == pytest.approx(frobenius_norm(x), rel=1e-14)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            mode_unfold(np.zeros((2, 2, 2)), 0)

    def test_mode_product_matches_unfolding_identity(self, rng):
        x = rng.normal(size=(3, 4, 2))
        m = rng.normal(size=(5, 4))
        y = mode_product(x, m, 2)
        assert y.shape == (3, 5, 2)
        np.testing.assert_allclose(mode_unfold(y, 2), m @ mode_unfold(x, 2), atol=1e-13)

    def test_khatri_rao_matches_kron_columns(self, rng):
        a, b = rng.normal(size=(3, 2)), rng.normal(size=(4, 2))
        kr = khatri_rao(a, b)
        for r in range(2):
            np.testing.assert_allclose(kr[:, r], np.kron(a[:, r], b[:, r]))


class TestSerialization:
    def test_round_trip_exact(self, tmp_path, rng):
        x = rng.normal(size=(4, 3, 2))
        x[x < 0] = 0.0
        x[0, 0, 0] = 1 / 3
        p = tmp_path / "t.txt"
        write_tensor(Tensor3(x), p)
        lines = p.read_text().splitlines()
        assert lines[0] == "4 3 2"
        assert len(lines) - 1 == np.count_nonzero(x)
        np.testing.assert_array_equal(read_tensor(p).data, x)

    def test_zero_tensor(self, tmp_path):
        p = tmp_path / "z.txt"
        write_tensor(Tensor3.zeros((2, 2, 1)), p)
        assert read_tensor(p).shape == (2, 2, 1)
