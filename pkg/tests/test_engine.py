"""
学习率、优化器、检查点、训练与预测
Author: ICO
Date: 2024-04-07"""

from dataclasses import replace

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose, assert_array_equal

import engine.forecaster
from backbone import ModelConfig, forward, init_params
from causalScaler import ScalerConfig, scale_targets
from dataExchange import read_archive, write_archive
from dataExchange.tensorArchive import archive_paths
from engine import (
    AdamWState,
    Checkpoint,
    TrainConfig,
    adamw_step,
    batch_loss,
    clip_grad_norm,
    forecast,
    heldout_loss,
    heldout_nll,
    load_checkpoint,
    normalize,
    point_forecast,
    quantiles,
    save_checkpoint,
    train,
    wsd_lr,
)
from error import CalculationError, CheckpointError, ConfigError, NumericalFailure
from numKit import Rng, Tensor, backward
from seriesData import MultivariateSeries, SynthConfig, generate_synthetic, preprocess_batch, sample_training_windows
from smm import LossConfig, compute_params, log_prob, mixture_mean, robust_loss


def quick_config(**overrides) -> TrainConfig:
    values = dict(learning_rate=1e-2, warmup_steps=1, stable_steps=2, decay_steps=1, batch_size=2, log_every=0)
    values.update(overrides)
    return TrainConfig(**values)


# end def
@pytest.fixture
def checkpoint(toy_config):
    return Checkpoint(toy_config, init_params(toy_config, Rng(0)))


# end def
class TestSchedule:
    @pytest.mark.parametrize("step, expected", [(0, 0.0), (5, 0.5), (15, 1.0), (30, 1.0), (39, 0.1)])
    def test_warmup_stable_decay(self, step, expected):
        cfg = TrainConfig(learning_rate=1.0, warmup_steps=10, stable_steps=20, decay_steps=10)
        assert wsd_lr(step, cfg) == pytest.approx(expected)

    def test_step_out_of_range(self):
        cfg = TrainConfig(warmup_steps=1, stable_steps=1, decay_steps=1)
        with pytest.raises(ConfigError, match="step"):
            wsd_lr(3, cfg)

    def test_phases_must_add_up(self):
        with pytest.raises(ConfigError, match="total_steps"):
            TrainConfig(warmup_steps=1, stable_steps=1, decay_steps=1, total_steps=5).validate()


# end class
class TestOptimizer:
    @staticmethod
    def cfg(weight_decay: float) -> TrainConfig:
        return TrainConfig(betas=(0.9, 0.999), weight_decay=weight_decay, adam_epsilon=1e-8)

    def test_first_step_moves_by_lr(self):
        params = {"w": np.array([1.0])}
        new, state = adamw_step(params, {"w": np.array([0.5])}, AdamWState.zeros(params), 0.1, self.cfg(0.0))
        assert_allclose(new["w"], [0.9], atol=1e-7)
        assert state.step == 1
        assert_array_equal(params["w"], [1.0])

    def test_missing_gradient_leaves_parameter(self):
        params = {"w": np.array([1.0])}
        new, _ = adamw_step(params, {"w": None}, AdamWState.zeros(params), 0.1, self.cfg(0.0))
        assert_array_equal(new["w"], [1.0])

    def test_decoupled_weight_decay(self):
        params = {"w": np.array([1.0])}
        new, _ = adamw_step(params, {"w": np.zeros(1)}, AdamWState.zeros(params), 0.1, self.cfg(0.5))
        assert_allclose(new["w"], [0.95])

    def test_non_finite_gradient_names_parameter(self):
        params = {"w": np.array([1.0])}
        with pytest.raises(CalculationError, match="'w'"):
            adamw_step(params, {"w": np.array([np.nan])}, AdamWState.zeros(params), 0.1, self.cfg(0.0))

    def test_clip_grad_norm(self):
        grads = {"a": np.array([3.0]), "b": np.array([4.0]), "c": None}
        clipped, norm = clip_grad_norm(grads, 1.0)
        assert norm == pytest.approx(5.0)
        assert_allclose(clipped["a"], [0.6])
        assert_allclose(clipped["b"], [0.8])
        assert clipped["c"] is None
        unchanged, _ = clip_grad_norm(grads, None)
        assert unchanged is grads


# end class
class TestCheckpoint:
    def test_round_trip_gives_identical_forecasts(self, checkpoint, tmp_path):
        save_checkpoint(checkpoint, tmp_path)
        loaded = load_checkpoint(tmp_path)
        for name, value in checkpoint.params.items():
            assert_array_equal(loaded.params[name], value)
        assert loaded.model_config == checkpoint.model_config
        context = np.random.default_rng(0).normal(size=(2, 24))
        a = forecast(checkpoint, context, None, 4, 3, Rng(0))
        b = forecast(loaded, context, None, 4, 3, Rng(0))
        assert_array_equal(a, b)

    def test_truncated_blob(self, checkpoint, tmp_path):
        save_checkpoint(checkpoint, tmp_path)
        _, blob = archive_paths(tmp_path)
        blob.write_bytes(blob.read_bytes()[:-16])
        with pytest.raises(CheckpointError, match="truncated"):
            load_checkpoint(tmp_path)

    def test_unknown_parameter(self, checkpoint, tmp_path):
        save_checkpoint(checkpoint, tmp_path)
        meta, arrays = read_archive(tmp_path)
        arrays["extra.weight"] = np.zeros(3)
        write_archive(tmp_path, arrays, meta)
        with pytest.raises(CheckpointError, match="unknown parameter"):
            load_checkpoint(tmp_path)

    def test_non_finite_parameter(self, checkpoint):
        params = dict(checkpoint.params)
        params["final_norm"] = np.full_like(params["final_norm"], np.nan)
        with pytest.raises(CheckpointError, match="non-finite"):
            save_checkpoint(Checkpoint(checkpoint.model_config, params), "unused")

    def test_missing_parameter(self, checkpoint):
        params = dict(checkpoint.params)
        params.pop("final_norm")
        with pytest.raises(CheckpointError, match="missing parameter"):
            Checkpoint(checkpoint.model_config, params).check()


# end class
class TestTraining:
    def test_batch_loss_is_finite(self, toy_config, small_dataset):
        windows = sample_training_windows(small_dataset, 28, Rng(0))
        batch = preprocess_batch(windows, toy_config.patch_size)
        leaves = {k: Tensor(v, requires_grad=True) for k, v in init_params(toy_config, Rng(0)).items()}
        terms = batch_loss(
            leaves, batch.values, batch.weights, batch.id_mask, toy_config, ScalerConfig(patch_size=4), LossConfig()
        )
        assert np.isfinite(terms.total.item())
        backward(terms.total)
        assert np.all(np.isfinite(leaves["patch_embed.weight"].grad))

    def test_same_seed_same_losses(self, toy_config, small_dataset):
        first = train(toy_config, small_dataset, quick_config(seed=3))
        second = train(toy_config, small_dataset, quick_config(seed=3))
        pd.testing.assert_frame_equal(first.losses, second.losses)
        assert list(first.losses.columns) == ["step", "lr", "loss", "nll", "robust", "grad_norm"]
        assert len(first.losses) == 4

    def test_single_student_t_ablation(self, toy_config, small_dataset):
        result = train(toy_config, small_dataset, quick_config(single_student_t=True))
        assert result.checkpoint.model_config.num_components == 1
        assert result.checkpoint.params["head.pi.weight"].shape[0] == 1

    def test_outputs_written(self, toy_config, small_dataset, tmp_path):
        result = train(toy_config, small_dataset, quick_config(checkpoint_every=2), out_dir=tmp_path)
        assert result.checkpoint_path == tmp_path
        assert (tmp_path / "losses.csv").exists()
        assert load_checkpoint(tmp_path).step == 4

    def test_numerical_failure(self, toy_config, small_dataset, monkeypatch):
        def broken(*args, **kwargs):
            raise CalculationError("non-finite intermediate value")

        monkeypatch.setattr("engine.trainer.batch_loss", broken)
        with pytest.raises(NumericalFailure) as info:
            train(toy_config, small_dataset, quick_config())
        assert info.value.step == 0
        assert info.value.last_checkpoint is None

    def test_heldout_loss(self, checkpoint, small_dataset):
        assert np.isfinite(heldout_loss(checkpoint, small_dataset).total.item())
        assert np.isfinite(heldout_nll(checkpoint, small_dataset))

    def test_heldout_nll_follows_data_units(self, checkpoint, small_dataset):
        # 数据整体放大 c 倍，每个目标的密度缩小 c 倍
        scaled = [MultivariateSeries(s.id, s.freq, 10.0 * s.values, s.weights) for s in small_dataset]
        no_floor = replace(checkpoint, scaler_config=ScalerConfig(minimum_scale=0.0, kappa=np.inf, patch_size=4))
        gap = heldout_nll(no_floor, scaled) - heldout_nll(no_floor, small_dataset)
        assert gap == pytest.approx(np.log(10.0), abs=1e-9)

    @staticmethod
    def last_patch_terms(params, values: np.ndarray, cfg, scaler_cfg: ScalerConfig, loss_cfg: LossConfig):
        """只看前缀，计算最后一个 patch 每个时间步的 NLL 与鲁棒损失"""
        size = cfg.patch_size
        normalized, stats = normalize(values, np.ones_like(values), scaler_cfg, False)
        targets = scale_targets(values, stats)[..., -size:]
        features = forward(params, normalized, np.ones((len(values), len(values)), dtype=bool), cfg)
        mixture = compute_params(features[..., -2 * size : -size, :], params)
        nll = -log_prob(mixture, targets).numpy()
        robust = robust_loss(targets, mixture_mean(mixture), loss_cfg.alpha, loss_cfg.delta).numpy()
        return nll, robust

    def test_parallel_loss_matches_patch_by_patch(self, toy_config):
        size, length = toy_config.patch_size, 32
        params = {k: Tensor(v) for k, v in init_params(toy_config, Rng(4)).items()}
        values = np.random.default_rng(6).normal(0.5, 2.0, size=(2, length)).cumsum(axis=-1)
        # 裁剪所用的 s 取自整段输入，关掉裁剪后前缀与整段的统计量才一致
        scaler_cfg = ScalerConfig(kappa=np.inf, patch_size=size)
        loss_cfg = LossConfig(lambda_nll=0.57).validate()
        parallel = batch_loss(
            params, values[None], np.ones((1, 2, length)), np.ones((1, 2, 2), dtype=bool), toy_config, scaler_cfg, loss_cfg
        )
        pieces = [
            self.last_patch_terms(params, values[:, : (p + 1) * size], toy_config, scaler_cfg, loss_cfg)
            for p in range(1, length // size)
        ]
        nll = np.concatenate([piece[0] for piece in pieces], axis=-1)
        robust = np.concatenate([piece[1] for piece in pieces], axis=-1)
        assert nll.shape == (2, length - size)
        assert parallel.nll.item() == pytest.approx(nll.mean(), abs=1e-9)
        assert parallel.robust.item() == pytest.approx(robust.mean(), abs=1e-9)
        assert parallel.total.item() == pytest.approx(0.57 * nll.mean() + 0.43 * robust.mean(), abs=1e-9)

    @pytest.mark.slow
    def test_loss_decreases_on_constant_series(self, toy_config, constant_dataset):
        cfg = TrainConfig(
            learning_rate=1e-2, warmup_steps=5, stable_steps=35, decay_steps=10, batch_size=4, log_every=0, seed=1
        )
        losses = train(toy_config, constant_dataset, cfg).losses["loss"].to_numpy()
        assert np.all(np.isfinite(losses))
        assert losses[-10:].mean() < losses[:10].mean()


# end class
@pytest.mark.slow
class TestAblation:
    def test_global_scaling_raises_heldout_nll(self):
        """默认玩具模型、默认合成数据、同样的种子与步数，只换归一化方式"""
        model_cfg = ModelConfig()
        dataset = generate_synthetic(SynthConfig(seed=0))
        heldout = generate_synthetic(SynthConfig(seed=1))
        control = train(model_cfg, dataset, TrainConfig(log_every=0, seed=0)).checkpoint
        ablation = train(model_cfg, dataset, TrainConfig(log_every=0, seed=0, global_scaling=True)).checkpoint
        assert ablation.global_scaling and not control.global_scaling
        for name, value in control.params.items():
            assert ablation.params[name].shape == value.shape
        assert heldout_nll(ablation, heldout) > heldout_nll(control, heldout)


# end class
class TestForecast:
    def test_output_shape(self, checkpoint):
        samples = forecast(checkpoint, np.random.default_rng(1).normal(size=(2, 20)), None, 10, 5, Rng(0))
        assert samples.shape == (5, 2, 10)
        assert np.all(np.isfinite(samples))

    def test_identical_streams_give_identical_samples(self, checkpoint):
        context = np.random.default_rng(2).normal(size=(1, 16))
        samples = forecast(checkpoint, context, None, 6, 2, [Rng(3), Rng(3)])
        assert_array_equal(samples[0], samples[1])

    def test_stream_count_must_match(self, checkpoint):
        with pytest.raises(ConfigError, match="num_samples"):
            forecast(checkpoint, np.ones((1, 8)), None, 4, 3, [Rng(0)])

    @pytest.mark.parametrize("horizon, calls", [(4, 1), (5, 2)])
    def test_decode_steps(self, checkpoint, monkeypatch, horizon, calls):
        counted = []
        original = engine.forecaster.forward

        def counting(*args, **kwargs):
            counted.append(1)
            return original(*args, **kwargs)

        monkeypatch.setattr(engine.forecaster, "forward", counting)
        forecast(checkpoint, np.ones((1, 8)), None, horizon, 2, Rng(0))
        assert len(counted) == calls

    def test_unroll_limit(self, checkpoint):
        with pytest.raises(ConfigError, match="horizon"):
            forecast(checkpoint, np.ones((1, 8)), None, 100, 2, Rng(0), max_unroll_patches=2)

    def test_missing_context_values(self, checkpoint):
        context = np.random.default_rng(3).normal(size=(2, 12))
        context[0, 3] = np.nan
        assert np.all(np.isfinite(forecast(checkpoint, context, None, 4, 2, Rng(0))))


# end class
class TestQuantiles:
    def test_median_of_four(self):
        samples = np.array([1.0, 2.0, 3.0, 4.0]).reshape(4, 1, 1)
        assert quantiles(samples, [0.5])[0, 0, 0] == pytest.approx(2.5)
        assert point_forecast(samples)[0, 0] == pytest.approx(2.5)

    def test_symmetric_samples(self):
        half = np.random.default_rng(0).normal(size=(50, 2, 3))
        out = quantiles(np.concatenate([half, -half]), [0.1, 0.9])
        assert_allclose(out[0], -out[1], atol=1e-12)

    def test_constant_samples(self):
        assert_array_equal(quantiles(np.full((8, 1, 2), 3.0), [0.1, 0.5, 0.9]), np.full((3, 1, 2), 3.0))

    def test_invalid_levels(self):
        with pytest.raises(ConfigError, match="levels"):
            quantiles(np.ones((2, 1, 1)), [])
        with pytest.raises(ConfigError, match="levels"):
            quantiles(np.ones((2, 1, 1)), [1.0])


# end class
