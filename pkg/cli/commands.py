"""
各子命令的实现
Author: ICO
Date: 2024-04-02"""

import argparse
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from backbone import ModelConfig, attention_flops, block_kinds, forward, init_params
from dataExchange import level_column, load_dataset, save_dataset, write_table
from defaultCONFIG import AttentionMode
from engine import batch_loss, load_checkpoint, train
from error import CalculationError, ConfigError
from numKit import MacCounter, Rng, Tensor, check_parameters
from obsBench import (
    EvalConfig,
    FileForecaster,
    ModelForecaster,
    SeasonalNaiveForecaster,
    build_tasks,
    run_benchmark,
    write_report,
)
from seriesData import generate_synthetic, preprocess_batch

from .runConfig import RunConfig


def _load_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig.load(getattr(args, "config", None)).with_seed(getattr(args, "seed", None))


# end def
def _parse_levels(text: str) -> tuple[float, ...]:
    try:
        levels = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError("quantiles", f"cannot parse '{text}'") from None
    if not levels:
        raise ConfigError("quantiles", "at least one level is required")
    return levels


# end def
def cmd_generate_data(args: argparse.Namespace) -> int:
    config = _load_config(args).validate()
    dataset = generate_synthetic(config.synth)
    out_dir = Path(args.out)
    save_dataset(dataset, out_dir / "dataset.jsonl")
    config.write_effective(out_dir)
    print(f"{len(dataset)} series written to {out_dir / 'dataset.jsonl'}")
    return 0


# end def
def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if args.steps is not None:
        # 保持三段比例，总步数改为 steps
        total = config.train.warmup_steps + config.train.stable_steps + config.train.decay_steps
        warmup = config.train.warmup_steps * args.steps // total
        decay = config.train.decay_steps * args.steps // total
        config.train = replace(
            config.train, warmup_steps=warmup, decay_steps=decay, stable_steps=args.steps - warmup - decay, total_steps=args.steps
        )
    config.train = config.train.apply_ablation(args.ablation)
    config.validate()
    dataset = load_dataset(args.data, impute=args.impute)
    out_dir = Path(args.out)
    config.write_effective(out_dir)
    result = train(config.model, dataset, config.train, config.scaler, config.loss, out_dir)
    final = result.losses.iloc[-1]
    print(f"trained {len(result.losses)} steps, final loss {final['loss']:.6f}, checkpoint in {out_dir}")
    return 0


# end def
def _forecast_rows(series, context_end: int, result, levels) -> list[dict]:
    rows = []
    for variate in range(series.num_variates):
        for step in range(result.point.shape[1]):
            row = {"series": series.id, "variate": variate, "context_end": context_end, "step": step}
            row["point"] = float(result.point[variate, step])
            for i, level in enumerate(levels):
                row[level_column(level)] = float(result.quantiles[i, variate, step])
            rows.append(row)
    return rows


# end def
def cmd_forecast(args: argparse.Namespace) -> int:
    config = _load_config(args)
    levels = _parse_levels(args.quantiles)
    config.eval = replace(config.eval, levels=tuple(sorted(levels)))
    config.validate()
    if args.windows == "tail" and (args.horizon is None or args.horizon < 1):
        raise ConfigError("horizon", f"must be >= 1, got {args.horizon}")
    if args.samples < 1:
        raise ConfigError("samples", f"must be >= 1, got {args.samples}")
    checkpoint = load_checkpoint(args.checkpoint)
    dataset = load_dataset(args.data, impute=args.impute)
    forecaster = ModelForecaster(checkpoint, args.samples, config.eval.context_length, config.eval.seed)
    levels = config.eval.levels

    # (序列下标, 上下文终点) -> 所需的最大预测长度
    requests: dict[tuple[int, int], int] = {}
    if args.windows == "eval":
        for task in build_tasks(dataset, config.eval):
            for window in task.windows:
                key = (task.series_index, window.context_end)
                requests[key] = max(requests.get(key, 0), task.horizon)
    else:
        requests = {(i, series.length): args.horizon for i, series in enumerate(dataset)}
    rows = []
    for (index, context_end), horizon in sorted(requests.items()):
        series = dataset[index]
        result = forecaster.predict(series, context_end, horizon, series.frequency.season_length, levels)
        rows.extend(_forecast_rows(series, context_end, result, levels))
    out_dir = Path(args.out)
    write_table(pd.DataFrame(rows), out_dir / "forecasts.csv")
    config.write_effective(out_dir)
    print(f"{len(requests)} forecasts written to {out_dir / 'forecasts.csv'}")
    return 0


# end def
def _unique_name(name: str, taken: set[str]) -> str:
    candidate, index = name, 1
    while candidate in taken:
        index += 1
        candidate = f"{name}-{index}"
    taken.add(candidate)
    return candidate


# end def
def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    updates = {"jobs": args.jobs}
    if args.samples is not None:
        updates["num_samples"] = args.samples
    config.eval = replace(config.eval, **updates)
    config.validate()
    dataset = load_dataset(args.data, impute=args.impute)
    taken = {SeasonalNaiveForecaster.name}
    forecasters = [SeasonalNaiveForecaster()]
    for path in args.checkpoint or []:
        name = _unique_name(Path(path).name or "model", taken)
        forecasters.append(
            ModelForecaster(load_checkpoint(path), config.eval.num_samples, config.eval.context_length, config.eval.seed, name)
        )
    for path in args.forecasts or []:
        forecasters.append(FileForecaster(path, _unique_name(Path(path).parent.name or Path(path).stem, taken)))
    report = run_benchmark(dataset, forecasters, config.eval)
    out_dir = Path(args.out)
    write_report(report, out_dir)
    config.write_effective(out_dir)
    if report.summary["main_split_empty"]:
        print("main split is empty: every series was routed to the low-variability split")
    for name, values in report.summary["models"].items():
        main = values["main"]
        rank = values.get("rank")
        mase = "n/a" if main["mase"] is None else f"{main['mase']:.4f}"
        crps = "n/a" if main["crps"] is None else f"{main['crps']:.4f}"
        rank_text = "n/a" if rank is None else f"{rank:.3f}"
        print(f"{name:<24s} MASE {mase}  CRPS {crps}  rank {rank_text}  flat tasks {values['flat']['num_tasks']}")
    return 0


# end def
def gradcheck_config() -> ModelConfig:
    """梯度检查用的玩具模型：D=32，P=8，4 个块 (含 1 个变量维块)，K=3"""
    return ModelConfig(
        embed_dim=32,
        patch_size=8,
        num_layers=4,
        time_per_variate_ratio=3,
        num_heads=4,
        mlp_dim=64,
        num_components=3,
        max_context=64,
        init_std=0.2,
    )


# end def
def run_gradcheck(cfg: ModelConfig, config: RunConfig, coords: int, seed: int) -> dict[str, float]:
    """在随机输入上对所有参数做中心差分检查"""
    rng = Rng(seed)
    init_rng, data_rng = rng.spawn(2)
    params = init_params(cfg, init_rng)
    values = data_rng.normal(size=(1, 2, 3 * cfg.patch_size))
    weights = np.ones_like(values)
    id_mask = np.ones((1, 2, 2), dtype=bool)
    scaler = replace(config.scaler, patch_size=cfg.patch_size)

    def loss_fn(tensors):
        return batch_loss(tensors, values, weights, id_mask, cfg, scaler, config.loss).total

    return check_parameters(loss_fn, params, max_coords=coords, rng=data_rng)


# end def
def cmd_gradcheck(args: argparse.Namespace) -> int:
    config = _load_config(args)
    cfg = (config.model if args.config else gradcheck_config()).validate()
    errors = run_gradcheck(cfg, config, args.coords, config.train.seed)
    worst_name = max(errors, key=errors.get)
    for name, error in errors.items():
        logger.debug(f"{name:<32s} {error:.3e}")
    print(f"checked {len(errors)} parameters, max relative error {errors[worst_name]:.3e} ({worst_name})")
    if errors[worst_name] > args.tolerance:
        raise CalculationError(f"gradient check failed: {errors[worst_name]:.3e} > {args.tolerance:g}")
    print("PASS")
    return 0


# end def
def measure_attention_macs(cfg: ModelConfig, num_variates: int, num_patches: int, mode: str, seed: int = 0) -> int:
    """运行一次前向，统计注意力分数与加权求和的乘加次数"""
    cfg = replace(cfg, attention_mode=mode, max_context=max(cfg.max_context, num_patches * cfg.patch_size)).validate()
    rng = Rng(seed)
    params = {k: Tensor(v) for k, v in init_params(cfg, rng).items()}
    values = rng.normal(size=(num_variates, num_patches * cfg.patch_size))
    with MacCounter(tag="attention") as counter:
        forward(params, values, np.ones((num_variates, num_variates), dtype=bool), cfg)
    return counter.total // 2


# end def
def cmd_flops(args: argparse.Namespace) -> int:
    layers = args.layers if args.layers is not None else args.ratio + 1
    cfg = ModelConfig(
        embed_dim=args.embed_dim,
        num_layers=layers,
        time_per_variate_ratio=args.ratio,
        num_heads=args.heads,
        patch_size=args.patch_size,
    )
    kinds = ", ".join(kind.value for kind in block_kinds(cfg))
    print(f"M={args.variates} T={args.patches} D={args.embed_dim} N={args.ratio} layers={layers} ({kinds})")
    for mode in (AttentionMode.FACTORIZED.value, AttentionMode.FULL.value):
        line = f"{mode:<11s} {attention_flops(cfg, args.variates, args.patches, mode)}"
        if args.measure:
            line += f"  measured {measure_attention_macs(cfg, args.variates, args.patches, mode)}"
        print(line)
    return 0


# end def
