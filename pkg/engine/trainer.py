"""
下一个 patch 预测的训练循环
Author: ICO
Date: 2024-03-26"""

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from backbone import ModelConfig, forward, init_params
from causalScaler import ScalerConfig, normalize_global, normalize_patches, scale_targets
from dataExchange import write_table
from error import CalculationError, ConfigError, DataFormatError, NumericalFailure
from numKit import Rng, Tensor, backward
from seriesData import MultivariateSeries, preprocess_batch, sample_training_windows
from smm import LossConfig, LossTerms, composite_loss_terms, compute_params, log_prob

from .checkpoint import Checkpoint, save_checkpoint
from .optimizer import AdamWState, adamw_step, clip_grad_norm
from .schedule import wsd_lr
from .trainConfig import TrainConfig

LOSS_COLUMNS = ("step", "lr", "loss", "nll", "robust", "grad_norm")


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    losses: pd.DataFrame
    checkpoint_path: Path | None = None


# end class
def normalize(values: np.ndarray, weights: np.ndarray, scaler_cfg: ScalerConfig, global_scaling: bool, scale_override=None):
    """因果归一化，global_scaling 时换成整条序列的统计量"""
    if global_scaling:
        return normalize_global(values, weights, scaler_cfg)
    return normalize_patches(values, weights, scaler_cfg, scale_override)


# end def
def batch_loss(
    params: dict[str, Tensor],
    values: np.ndarray,
    weights: np.ndarray,
    id_mask: np.ndarray,
    model_cfg: ModelConfig,
    scaler_cfg: ScalerConfig,
    loss_cfg: LossConfig,
    global_scaling: bool = False,
) -> LossTerms:
    """以真值为输入、所有 patch 并行计算的组合损失

    第 p 个 token 的特征预测第 p+1 个 patch；目标用第 p 个 patch 末尾的统计量换算，
    第一个 patch 与填充位置不计入损失。

    Parameters
    ----------
    `values` : np.ndarray
        B×M×L，权重为 0 的位置为 0
    `weights` : np.ndarray
        B×M×L
    `id_mask` : np.ndarray
        B×M×M

    Returns
    -------
    LossTerms
    """
    size = model_cfg.patch_size
    values = np.where(weights > 0, values, 0.0)
    normalized, stats = normalize(values, weights, scaler_cfg, global_scaling)
    targets = scale_targets(values, stats)
    features = forward(params, normalized, id_mask, model_cfg)
    length = values.shape[-1]
    mixture = compute_params(features[..., : length - size, :], params)
    return composite_loss_terms(mixture, targets, weights[..., size:], loss_cfg)


# end def
def _usable_series(dataset: list[MultivariateSeries], patch_size: int) -> list[MultivariateSeries]:
    usable = [s for s in dataset if s.length >= 2 * patch_size and s.weights[:, patch_size:].sum() > 0]
    if len(usable) < len(dataset):
        logger.warning(f"{len(dataset) - len(usable)} series shorter than two patches are not used for training")
    if not usable:
        raise DataFormatError("no series is long enough to train on (need at least two patches)")
    return usable


# end def
def train(
    model_cfg: ModelConfig,
    dataset: list[MultivariateSeries],
    train_cfg: TrainConfig,
    scaler_cfg: ScalerConfig | None = None,
    loss_cfg: LossConfig | None = None,
    out_dir: str | Path | None = None,
) -> TrainResult:
    """训练主干与混合分布头

    每一步：抽样序列并随机截窗 → 预处理打包 → 归一化 → 前向 → 组合损失 →
    反向传播 → 梯度裁剪 → AdamW (学习率按 WSD)。给定种子时完全确定。

    Parameters
    ----------
    `model_cfg` : ModelConfig
    `dataset` : list[MultivariateSeries]
    `train_cfg` : TrainConfig
    `scaler_cfg` : ScalerConfig | None, 可选
        默认值：None (默认配置)，patch_size 与模型保持一致
    `loss_cfg` : LossConfig | None, 可选
    `out_dir` : str | Path | None, 可选
        设置后写出检查点与 losses.csv，默认值：None

    Returns
    -------
    TrainResult

    Raises
    ------
    NumericalFailure
        损失为 NaN，或计算中出现非有限值；携带最后一次保存的检查点路径
    """
    if not dataset:
        raise DataFormatError("training dataset is empty")
    train_cfg.validate()
    model_cfg = train_cfg.effective_model_config(model_cfg).validate()
    loss_cfg = train_cfg.effective_loss_config(loss_cfg or LossConfig()).validate()
    scaler_cfg = replace(scaler_cfg or ScalerConfig(), patch_size=model_cfg.patch_size).validate()
    size = model_cfg.patch_size
    if model_cfg.max_context < 3 * size:
        raise ConfigError("max_context", f"training needs room for at least three patches, got {model_cfg.max_context}")
    usable = _usable_series(dataset, size)
    out_dir = Path(out_dir) if out_dir is not None else None

    init_rng, data_rng = Rng(train_cfg.seed).spawn(2)
    params = init_params(model_cfg, init_rng)
    state = AdamWState.zeros(params)
    shuffle = train_cfg.shuffle
    # 留出一个 patch 给随机偏移
    window = max(model_cfg.max_context - size, size)
    records = []
    last_checkpoint = None

    def snapshot(step: int) -> Checkpoint:
        return Checkpoint(
            model_cfg,
            params,
            state,
            step,
            data_rng.get_state(),
            scaler_cfg,
            train_cfg.global_scaling,
            train_cfg.to_dict(),
        )

    logger.info(f"training {train_cfg.total_steps} steps on {len(usable)} series (seed {train_cfg.seed})")
    for step in range(train_cfg.total_steps):
        lr = wsd_lr(step, train_cfg)
        picks = data_rng.integers(0, len(usable), size=train_cfg.batch_size)
        windows = sample_training_windows([usable[int(i)] for i in picks], window, data_rng)
        batch = preprocess_batch(windows, size, train_cfg.max_variates, data_rng, shuffle)
        leaves = {name: Tensor(value, requires_grad=True) for name, value in params.items()}
        try:
            terms = batch_loss(
                leaves, batch.values, batch.weights, batch.id_mask, model_cfg, scaler_cfg, loss_cfg, train_cfg.global_scaling
            )
            loss = terms.total.item()
            if not np.isfinite(loss):
                raise CalculationError(f"loss is {loss}")
            backward(terms.total)
            grads, grad_norm = clip_grad_norm({n: leaf.grad for n, leaf in leaves.items()}, train_cfg.grad_clip)
        except CalculationError as exc:
            raise NumericalFailure(f"training aborted at step {step}: {exc}", last_checkpoint, step) from exc
        params, state = adamw_step(params, grads, state, lr, train_cfg)
        records.append((step, lr, loss, terms.nll.item(), terms.robust.item(), grad_norm))

        if train_cfg.log_every and (step % train_cfg.log_every == 0 or step == train_cfg.total_steps - 1):
            logger.info(f"step {step:>6d}  lr {lr:.3e}  loss {loss:.5f}  nll {records[-1][3]:.5f}")
        else:
            logger.debug(f"step {step} loss {loss:.6f}")
        if out_dir is not None and train_cfg.checkpoint_every and (step + 1) % train_cfg.checkpoint_every == 0:
            save_checkpoint(snapshot(step + 1), out_dir)
            last_checkpoint = out_dir

    checkpoint = snapshot(train_cfg.total_steps)
    losses = pd.DataFrame.from_records(records, columns=list(LOSS_COLUMNS))
    if out_dir is not None:
        save_checkpoint(checkpoint, out_dir)
        write_table(losses, out_dir / "losses.csv")
        last_checkpoint = out_dir
    return TrainResult(checkpoint, losses, last_checkpoint)


# end def
def _heldout_batch(checkpoint: Checkpoint, dataset: list[MultivariateSeries]):
    cfg = checkpoint.model_config
    usable = _usable_series(dataset, cfg.patch_size)
    window = max(cfg.max_context - cfg.patch_size, cfg.patch_size)
    cropped = [s.window(max(0, s.length - window), s.length) for s in usable]
    return preprocess_batch(cropped, cfg.patch_size, rng=None)


# end def
def heldout_loss(checkpoint: Checkpoint, dataset: list[MultivariateSeries], loss_cfg: LossConfig | None = None) -> LossTerms:
    """在留出数据上计算损失 (不做随机偏移与混排)"""
    batch = _heldout_batch(checkpoint, dataset)
    return batch_loss(
        checkpoint.tensors(),
        batch.values,
        batch.weights,
        batch.id_mask,
        checkpoint.model_config,
        checkpoint.scaler_config,
        (loss_cfg or LossConfig()).validate(),
        checkpoint.global_scaling,
    )


# end def
def heldout_nll(checkpoint: Checkpoint, dataset: list[MultivariateSeries]) -> float:
    """留出数据在原始数值空间的平均负对数似然

    归一化空间的 NLL 加上每个目标所用尺度的 log，
    因果归一化与全局归一化训练出的检查点因此可以直接比较。
    """
    cfg = checkpoint.model_config
    size = cfg.patch_size
    batch = _heldout_batch(checkpoint, dataset)
    values = np.where(batch.weights > 0, batch.values, 0.0)
    normalized, stats = normalize(values, batch.weights, checkpoint.scaler_config, checkpoint.global_scaling)
    targets = scale_targets(values, stats)
    params = checkpoint.tensors()
    features = forward(params, normalized, batch.id_mask, cfg)
    mixture = compute_params(features[..., : values.shape[-1] - size, :], params)
    scale = np.repeat(stats.patch_scale[..., :-1], size, axis=-1)
    mask = (batch.weights[..., size:] > 0) & (scale > 0)
    if not mask.any():
        raise CalculationError("every held-out target is masked")
    nll = -log_prob(mixture, np.where(mask, targets, 0.0)).numpy()
    return float((nll[mask] + np.log(scale[mask])).mean())


# end def
