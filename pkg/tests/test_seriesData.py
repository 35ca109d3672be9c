"""
序列、频率、合成数据与批次预处理
Author: ICO
Date: 2024-04-05"""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from defaultCONFIG import Frequency, Term
from error import ConfigError, DataFormatError
from mathTools import autocorrelation
from numKit import Rng
from seriesData import (
    MultivariateSeries,
    ShuffleConfig,
    SynthConfig,
    build_id_mask,
    generate_synthetic,
    padded_length,
    parse_frequency,
    preprocess_batch,
    sample_training_windows,
    stationary_ar_coefficients,
)


class TestFrequency:
    def test_multiplier(self):
        frequency = parse_frequency("5T")
        assert frequency.base is Frequency.MINUTELY
        assert frequency.multiplier == 5
        assert frequency.step_seconds == 300
        assert frequency.code == "5T"

    def test_horizons_and_season(self):
        frequency = parse_frequency("H")
        assert frequency.horizon(Term.SHORT) == 48
        assert frequency.horizon(Term.LONG) == 720
        assert frequency.season_length == 24

    def test_unknown_code(self):
        with pytest.raises(DataFormatError, match="freq"):
            parse_frequency("X")


# end class
class TestMultivariateSeries:
    def test_missing_values_get_zero_weight(self):
        series = MultivariateSeries("a", "H", [1.0, np.nan, 3.0])
        assert series.values.shape == (1, 3)
        assert_array_equal(series.weights, [[1.0, 0.0, 1.0]])

    def test_window(self):
        series = MultivariateSeries("a", "D", np.arange(20.0).reshape(2, 10))
        window = series.window(3, 7)
        assert window.length == 4
        assert_array_equal(window.values[1], [13.0, 14.0, 15.0, 16.0])

    def test_weight_shape_checked(self):
        with pytest.raises(DataFormatError, match="weights"):
            MultivariateSeries("a", "H", np.zeros((2, 4)), np.ones((2, 3)))


# end class
class TestSynthetic:
    def test_same_seed_is_bit_identical(self):
        cfg = SynthConfig(num_series=3, length=100, seed=5)
        first, second = generate_synthetic(cfg), generate_synthetic(cfg)
        assert all(a.same_as(b) for a, b in zip(first, second))

    def test_rescale_range(self):
        for series in generate_synthetic(SynthConfig(num_series=4, length=200, rescale_range=(0.0, 1.0))):
            assert series.values.min() >= 0.0
            assert series.values.max() <= 1.0

    def test_sinusoid_autocorrelation(self):
        cfg = SynthConfig(
            num_series=2, num_variates=2, length=480, trend=False, arma=False, period=24, noise_scale=0.0, clip_quantile=None
        )
        for series in generate_synthetic(cfg):
            for row in series.values:
                assert autocorrelation(row, 24) > 0.99

    def test_no_component(self):
        with pytest.raises(ConfigError, match="components"):
            generate_synthetic(SynthConfig(trend=False, arma=False, seasonality=False))

    def test_stationary_ar(self):
        rng = Rng(0)
        for order in (1, 2, 3):
            phi = stationary_ar_coefficients(order, rng)
            roots = np.roots(np.concatenate((-phi[::-1], [1.0])))
            assert np.all(np.abs(roots) > 1.0)

    @pytest.mark.parametrize("kind", ["gaussian", "student_t", "lognormal"])
    def test_residual_distributions(self, kind):
        dataset = generate_synthetic(SynthConfig(num_series=1, length=64, residual_dist=kind))
        assert np.all(np.isfinite(dataset[0].values))


# end class
class TestPreprocess:
    def test_identity_path(self):
        series = [MultivariateSeries("a", "H", np.arange(8.0).reshape(1, 8))]
        batch = preprocess_batch(series, 4, shuffle=ShuffleConfig(probability=0.0))
        assert_array_equal(batch.values[0], series[0].values)
        assert_array_equal(batch.weights[0], np.ones((1, 8)))

    def test_left_padding(self):
        series = [MultivariateSeries("a", "H", np.ones((1, 10)))]
        batch = preprocess_batch(series, 4)
        assert batch.shape == (1, 1, 12)
        assert_array_equal(batch.weights[0, 0, :2], [0.0, 0.0])
        assert_array_equal(batch.weights[0, 0, 2:], np.ones(10))
        assert padded_length(10, 4) == 12

    def test_random_offset_shifts_window_start(self):
        values = np.tile(np.arange(10.0), (2, 1))
        series = [MultivariateSeries("a", "H", values)]
        kept_lengths = set()
        for seed in range(20):
            batch = preprocess_batch(series, 4, rng=Rng(seed))
            kept = int(batch.weights[0, 0].sum())
            kept_lengths.add(kept)
            assert 7 <= kept <= 10
            assert batch.shape[-1] == padded_length(kept, 4)
            # 丢掉的是开头，末尾保持不变
            assert_array_equal(batch.values[0, :, -kept:], values[:, -kept:])
            assert_array_equal(batch.weights[0, :, : batch.shape[-1] - kept], 0.0)
        assert len(kept_lengths) > 1

    def test_offset_keeps_last_step(self):
        series = [MultivariateSeries("a", "H", np.array([[5.0]]))]
        for seed in range(5):
            batch = preprocess_batch(series, 4, rng=Rng(seed))
            assert batch.weights.sum() == 1
            assert batch.values[0, 0, -1] == 5.0

    def test_packed_id_mask(self):
        series = [MultivariateSeries(name, "H", np.ones((2, 8))) for name in ("a", "b")]
        batch = preprocess_batch(series, 4)
        expected = np.kron(np.eye(2, dtype=bool), np.ones((2, 2), dtype=bool))
        assert_array_equal(batch.id_mask[0], expected)
        assert batch.sources[0] == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_padding_variates_form_their_own_groups(self):
        series = [MultivariateSeries(name, "H", np.ones((2, 8))) for name in ("a", "b", "c")]
        batch = preprocess_batch(series, 4, max_variates=4)
        assert batch.shape == (2, 4, 8)
        assert_array_equal(batch.id_mask[1, 2:, 2:], np.eye(2, dtype=bool))
        assert batch.sources[1][2:] == [None, None]
        assert_array_equal(batch.weights[1, 2:], np.zeros((2, 8)))

    def test_mixed_lengths_share_length(self):
        series = [MultivariateSeries("a", "H", np.ones((1, 5))), MultivariateSeries("b", "H", np.ones((1, 12)))]
        batch = preprocess_batch(series, 4)
        assert batch.shape == (1, 2, 12)
        assert batch.weights[0, 0].sum() == 5

    def test_shuffle_keeps_every_variate(self):
        series = [MultivariateSeries(name, "H", np.full((3, 4), i)) for i, name in enumerate("abc")]
        for mode in ("adjacent", "random", "normal"):
            batch = preprocess_batch(series, 4, rng=Rng(1), shuffle=ShuffleConfig(mode, 1.0), random_offset=False)
            slots = sorted(s for item in batch.sources for s in item if s is not None)
            assert slots == [(i, v) for i in range(3) for v in range(3)]

    def test_empty_batch(self):
        with pytest.raises(DataFormatError, match="empty"):
            preprocess_batch([], 4)

    def test_build_id_mask(self):
        assert_array_equal(build_id_mask([0, 0, 1]), [[True, True, False], [True, True, False], [False, False, True]])

    def test_training_windows(self):
        series = [MultivariateSeries("a", "H", np.arange(50.0)), MultivariateSeries("b", "H", np.arange(5.0))]
        windows = sample_training_windows(series, 16, Rng(0))
        assert windows[0].length == 16
        assert windows[1].length == 5
        start = int(windows[0].values[0, 0])
        assert_array_equal(windows[0].values[0], np.arange(start, start + 16.0))


# end class
