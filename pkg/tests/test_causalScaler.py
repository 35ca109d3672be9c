"""
因果统计量、尺度裁剪与 patch 归一化
Author: ICO
Date: 2024-04-03"""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from causalScaler import (
    ScalerConfig,
    clip_scales,
    compute_causal_statistics,
    denormalize,
    normalize_global,
    normalize_patches,
    scale_targets,
    variate_scale,
)
from error import CalculationError, ConfigError, ShapeError


class TestCausalStatistics:
    def test_running_mean_and_scale(self):
        means, scales = compute_causal_statistics(np.array([1.0, 2.0, 3.0]), np.ones(3), 0.1)
        assert_allclose(means, [1.0, 1.5, 2.0])
        assert_allclose(scales, [0.31623, 0.77460, 1.04881], atol=1e-5)

    def test_constant_series(self):
        means, scales = compute_causal_statistics(np.full(3, 5.0), np.ones(3), 0.1)
        assert_allclose(means, [5.0, 5.0, 5.0])
        assert_allclose(scales, np.sqrt(0.1) * np.ones(3))

    def test_padding_is_ignored(self):
        means, _ = compute_causal_statistics(np.array([9.0, 1.0, 2.0]), np.array([0.0, 1.0, 1.0]), 0.1)
        assert_allclose(means, [0.0, 1.0, 1.5])

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        data = rng.normal(size=(3, 20))
        weights = (rng.random((3, 20)) > 0.2).astype(float)
        means, scales = compute_causal_statistics(data, weights, 0.1)
        for v in range(3):
            for t in range(20):
                seen = data[v, : t + 1][weights[v, : t + 1] > 0]
                mean = seen.mean() if seen.size else 0.0
                var = seen.var(ddof=1) if seen.size > 1 else 0.0
                assert means[v, t] == pytest.approx(mean, abs=1e-12)
                assert scales[v, t] == pytest.approx(np.sqrt(var + 0.1), abs=1e-10)

    @staticmethod
    def prefix_statistics(data: np.ndarray, weights: np.ndarray, minimum_scale: float):
        """O(L²) 的逐前缀两遍统计"""
        length = data.shape[-1]
        seen = np.tril(np.ones((length, length))) * weights[None, :]
        count = seen.sum(axis=1)
        means = seen @ data / np.maximum(count, 1.0)
        spread = (seen * (data[None, :] - means[:, None]) ** 2).sum(axis=1)
        return means, np.sqrt(spread / np.maximum(count - 1.0, 1.0) + minimum_scale)

    @staticmethod
    def random_weights(rng, length: int, kind: str) -> np.ndarray:
        match kind:
            case "dense":
                return np.ones(length)
            case "sparse":
                return (rng.random(length) < rng.uniform(0.05, 0.95)).astype(float)
            case "left_padded":
                weights = np.ones(length)
                weights[: rng.integers(0, length)] = 0.0
                return weights
            case "empty":
                return np.zeros(length)
            case "single":
                weights = np.zeros(length)
                weights[rng.integers(0, length)] = 1.0
                return weights
        # end match

    @pytest.mark.slow
    @pytest.mark.parametrize("block", range(10))
    def test_thousand_random_pairs_match_prefix_oracle(self, block):
        kinds = ("dense", "sparse", "left_padded", "empty", "single")
        rng = np.random.default_rng(block)
        for i in range(100):
            length = int(rng.integers(1, 513))
            data = rng.uniform(-100.0, 100.0) + rng.uniform(0.01, 10.0) * rng.normal(size=length)
            weights = self.random_weights(rng, length, kinds[i % len(kinds)])
            means, scales = compute_causal_statistics(data, weights, 0.1)
            expected_means, expected_scales = self.prefix_statistics(data, weights, 0.1)
            assert_allclose(means, expected_means, rtol=0.0, atol=1e-9)
            assert_allclose(scales, expected_scales, rtol=0.0, atol=1e-9)

    def test_causality(self):
        data = np.array([1.0, 4.0, 2.0, 8.0, 5.0])
        changed = data.copy()
        changed[3:] = [-100.0, 100.0]
        before = compute_causal_statistics(data, np.ones(5), 0.1)
        after = compute_causal_statistics(changed, np.ones(5), 0.1)
        for a, b in zip(before, after):
            assert_array_equal(a[:3], b[:3])

    def test_non_binary_weights(self):
        with pytest.raises(CalculationError, match="0 or 1"):
            compute_causal_statistics(np.ones(3), np.array([1.0, 0.5, 1.0]), 0.1)

    def test_empty_series(self):
        with pytest.raises(ShapeError, match="empty"):
            compute_causal_statistics(np.zeros((2, 0)), np.zeros((2, 0)), 0.1)


# end class
class TestClipping:
    def test_inside_bounds(self):
        assert_allclose(clip_scales(np.array([0.31623]), np.array(2.0), 10.0), [0.31623])

    def test_zero_kappa_collapses_to_variate_scale(self):
        assert_allclose(clip_scales(np.array([0.3, 5.0, 40.0]), np.array(2.0), 0.0), [2.0, 2.0, 2.0])

    def test_upper_clamp(self):
        assert_allclose(clip_scales(np.array([1e30]), np.array(1.0), 10.0), [1e10])

    def test_infinite_kappa_disables_clipping(self):
        assert_array_equal(clip_scales(np.array([1e-30, 1e30]), np.array(1.0), np.inf), [1e-30, 1e30])

    def test_negative_kappa(self):
        with pytest.raises(CalculationError, match="kappa"):
            clip_scales(np.array([1.0]), np.array(1.0), -1.0)

    def test_variate_scale_kinds(self):
        data = np.array([[1.0, 2.0, 3.0, 4.0]])
        std = variate_scale(data, np.ones_like(data), 0.1)
        var = variate_scale(data, np.ones_like(data), 0.1, "variance")
        assert_allclose(std ** 2, var)
        assert_allclose(var, [np.var([1, 2, 3, 4], ddof=1) + 0.1])


# end class
class TestNormalize:
    def test_hand_evaluated_patches(self):
        cfg = ScalerConfig(minimum_scale=0.1, kappa=10.0, patch_size=2)
        normalized, stats = normalize_patches(np.array([1.0, 2.0, 3.0, 4.0]), np.ones(4), cfg)
        assert_allclose(normalized, [-0.6455, 0.6455, 0.3762, 1.1285], atol=1e-4)
        assert_allclose(stats.patch_loc, [1.5, 2.5])
        assert_allclose(stats.patch_scale, [0.7746, 1.3292], atol=1e-4)

    def test_constant_series_normalizes_to_zero(self):
        cfg = ScalerConfig(patch_size=4)
        normalized, stats = normalize_patches(np.full((2, 8), 7.0), np.ones((2, 8)), cfg)
        assert_array_equal(normalized, np.zeros((2, 8)))
        assert_allclose(stats.scales, np.sqrt(0.1))

    def test_final_patch_round_trip(self):
        cfg = ScalerConfig(patch_size=2)
        data = np.array([3.0, -1.0, 4.0, 1.5, -5.0, 9.0])
        normalized, stats = normalize_patches(data, np.ones(6), cfg)
        assert_allclose(denormalize(normalized[-2:], stats.context_end()), data[-2:], atol=1e-12)

    def test_scale_invariance_without_floor(self):
        cfg = ScalerConfig(minimum_scale=0.0, kappa=np.inf, patch_size=4)
        data = np.random.default_rng(1).normal(size=(2, 16))
        a, _ = normalize_patches(data, np.ones_like(data), cfg)
        b, _ = normalize_patches(37.5 * data, np.ones_like(data), cfg)
        assert_allclose(a, b, atol=1e-12)

    def test_later_patches_do_not_change_earlier_output(self):
        cfg = ScalerConfig(kappa=np.inf, patch_size=4)
        data = np.random.default_rng(2).normal(size=(1, 12))
        changed = data.copy()
        changed[:, 8:] *= 100.0
        a, _ = normalize_patches(data, np.ones_like(data), cfg)
        b, _ = normalize_patches(changed, np.ones_like(data), cfg)
        assert_array_equal(a[:, :8], b[:, :8])

    def test_length_not_divisible(self):
        with pytest.raises(ShapeError, match="patch size"):
            normalize_patches(np.ones(5), np.ones(5), ScalerConfig(patch_size=2))

    def test_targets_use_previous_patch_statistics(self):
        cfg = ScalerConfig(minimum_scale=0.1, kappa=10.0, patch_size=2)
        data = np.array([1.0, 2.0, 3.0, 4.0])
        _, stats = normalize_patches(data, np.ones(4), cfg)
        targets = scale_targets(data, stats)
        assert targets.shape == (2,)
        assert_allclose(targets, (data[2:] - 1.5) / np.sqrt(0.6))

    def test_global_statistics_are_shared(self):
        cfg = ScalerConfig(patch_size=2)
        data = np.array([[1.0, 2.0, 3.0, 4.0]])
        normalized, stats = normalize_global(data, np.ones_like(data), cfg)
        assert_allclose(stats.means, 2.5)
        assert_allclose(normalized.sum(), 0.0, atol=1e-12)


# end class
class TestDenormalize:
    def test_affine(self):
        assert_allclose(denormalize(np.array([[1.5]]), (np.array([2.0]), np.array([3.0]))), [[6.5]])

    def test_zero_values_give_location(self):
        out = denormalize(np.zeros((2, 3)), (np.array([1.0, -4.0]), np.array([2.0, 2.0])))
        assert_array_equal(out, [[1.0, 1.0, 1.0], [-4.0, -4.0, -4.0]])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            denormalize(np.zeros((2, 3)), (np.zeros(3), np.ones(3)))


# end class
class TestScalerConfig:
    def test_negative_kappa_rejected(self):
        with pytest.raises(ConfigError, match="kappa"):
            ScalerConfig(kappa=-1.0).validate()


# end class
