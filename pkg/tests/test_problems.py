import numpy as np
import pytest
from numpy.testing import assert_allclose

from proxpoint import (
    SplitMix64,
    basis_pursuit_instance,
    bilinear_game_instance,
    check_monotone,
    linear_resolvent,
    load_instance,
    resolvent_linear,
    rotation_worst_case,
    save_instance,
    strongly_monotone_toy,
    toy_saddle,
    tv_instance,
)
from proxpoint.problems import rotation_instance, strongly_monotone_instance


class TestSplitMix64:
    def test_reference_words(self):
        # Canonical splitmix64 stream for seed 0; pins the generator so
        # instances can be re-derived outside Python.
        words = SplitMix64(0).integers(3)
        assert [int(w) for w in words] == [0xE220A8397B1DCDAF,
                                           0x6E789E6AA1B965F4,
                                           0x06C45D188009454F]

    def test_deterministic(self):
        a = SplitMix64(7).normals(64)
        b = SplitMix64(7).normals(64)
        assert_allclose(a, b, rtol=0)

    def test_integers_below_in_range(self):
        draws = SplitMix64(2).integers_below(7, 1000)
        assert draws.min() >= 0 and draws.max() <= 6

    def test_batch_split_invariance(self):
        whole = SplitMix64(3).integers(10)
        rng = SplitMix64(3)
        parts = np.concatenate([rng.integers(4), rng.integers(6)])
        assert np.array_equal(whole, parts)

    def test_normals_roughly_standard(self):
        x = SplitMix64(11).normals(200_000)
        assert abs(x.mean()) < 0.01
        assert abs(x.std() - 1.0) < 0.01

    def test_uniforms_in_unit_interval(self):
        u = SplitMix64(5).uniforms(10_000)
        assert np.all((0.0 <= u) & (u < 1.0))


class TestOperators:
    def test_rotation_n2(self):
        assert_allclose(rotation_worst_case(2, 1.0).entries,
                        [[0.0, 1.0], [-1.0, 0.0]])

    def test_rotation_n5_resolvent(self):
        op = rotation_worst_case(5, 1.0)
        assert_allclose(op.entries, [[0.0, 0.5], [-0.5, 0.0]])
        assert_allclose(resolvent_linear(op, 1.0, [1.0, 0.0]), [0.8, 0.4],
                        rtol=1e-14)

    def test_rotation_symmetric_part_vanishes(self):
        for n in (2, 17, 100):
            op = rotation_worst_case(n, 1.0)
            assert np.all(op.symmetric_part() == 0.0)
            assert check_monotone(op, 0.0)

    def test_toy_full_scale_entries(self):
        op = strongly_monotone_toy(100, 1.0, 0.02)
        s = 1.0 / np.sqrt(99.0)
        assert_allclose(op.entries, [[0.02, s], [-s, 0.02]])
        assert check_monotone(op, 0.02)

    def test_toy_matches_saddle_subdifferential(self):
        op = strongly_monotone_toy(100, 1.0, 0.02)
        linear, shift = toy_saddle(100, 1.0, 0.02).stacked_operator()
        assert_allclose(linear.entries, op.entries)
        assert np.all(shift == 0.0)

    def test_large_mu_dominates(self):
        op = strongly_monotone_toy(10, 1.0, 1e6)
        x = resolvent_linear(op, 1.0, [1.0, 0.0])
        assert_allclose(x, np.array([1.0, 0.0]) / (1.0 + 1e6),
                        rtol=1e-6, atol=1e-9)


class TestBasisPursuit:
    def test_feasible_by_construction(self):
        inst = basis_pursuit_instance(100, 20, 3)
        assert np.all(inst["b"] - inst["A"] @ inst["u_true"] == 0.0)

    def test_sparsity_rule(self):
        inst = basis_pursuit_instance(100, 20, 5)
        assert np.count_nonzero(inst["u_true"]) <= 10

    def test_deterministic(self):
        a = basis_pursuit_instance(50, 10, 9)
        b = basis_pursuit_instance(50, 10, 9)
        assert np.array_equal(a["A"], b["A"])
        assert np.array_equal(a["u_true"], b["u_true"])

    def test_dimension_check(self):
        with pytest.raises(ValueError):
            basis_pursuit_instance(10, 10, 0)


class TestBilinearGame:
    def test_deterministic(self):
        a = bilinear_game_instance(30, 12, 2)
        b = bilinear_game_instance(30, 12, 2)
        assert np.array_equal(a["K"], b["K"])
        assert np.array_equal(a["a"], b["a"])
        assert np.array_equal(a["b"], b["b"])

    def test_shapes_and_nondegeneracy(self):
        inst = bilinear_game_instance(50, 25, 1)
        assert inst["K"].shape == (25, 50)
        assert np.linalg.norm(inst["K"]) > 0.0


class TestTV:
    def test_piecewise_constant_structure(self):
        inst = tv_instance(100, 5, 1)
        jumps = inst["D"] @ inst["x_true"]
        assert np.count_nonzero(np.abs(jumps) > 1e-12) <= 4

    def test_noise_free_consistency(self):
        inst = tv_instance(60, 4, 2, noise_scale=0.0)
        assert_allclose(inst["b"], inst["H"] @ inst["x_true"], rtol=0, atol=0)

    def test_deterministic(self):
        a = tv_instance(40, 5, 7)
        b = tv_instance(40, 5, 7)
        assert np.array_equal(a["H"], b["H"])
        assert np.array_equal(a["b"], b["b"])

    def test_full_scale_shapes(self):
        inst = tv_instance(100, 5, 1)
        assert inst["H"].shape == (5, 100)
        assert inst["D"].shape == (99, 100)


class TestSerialization:
    @pytest.mark.parametrize("make", [
        lambda: rotation_instance(100, 1.0),
        lambda: strongly_monotone_instance(100, 1.0, 0.02),
        lambda: basis_pursuit_instance(20, 5, 4),
        lambda: bilinear_game_instance(8, 3, 4),
        lambda: tv_instance(12, 3, 4),
    ])
    def test_round_trip(self, make, tmp_path):
        inst = make()
        path = tmp_path / "instance.csv"
        save_instance(inst, path)
        loaded = load_instance(path)
        assert loaded.kind == inst.kind
        assert loaded.seed == inst.seed
        assert loaded.params == inst.params
        assert set(loaded.data) == set(inst.data)
        for name, arr in inst.data.items():
            assert np.array_equal(np.asarray(loaded.data[name], dtype=float),
                                  np.asarray(arr, dtype=float))
