"""
测试公用夹具
Author: ICO
Date: 2024-04-03"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 仓库根目录即导入根目录
sys.path.insert(0, str(Path(__file__).resolve().parent))

from backbone import ModelConfig  # noqa: E402
from numKit import Rng  # noqa: E402
from seriesData import MultivariateSeries, SynthConfig, generate_synthetic  # noqa: E402


@pytest.fixture
def toy_config() -> ModelConfig:
    """D=16，P=4，3 个块 (2 个时间维 + 1 个变量维)，K=2"""
    return ModelConfig(
        embed_dim=16,
        patch_size=4,
        num_layers=3,
        time_per_variate_ratio=2,
        num_heads=2,
        mlp_dim=32,
        num_components=2,
        max_context=32,
    ).validate()


@pytest.fixture
def rng() -> Rng:
    return Rng(1234)


@pytest.fixture
def small_dataset() -> list[MultivariateSeries]:
    cfg = SynthConfig(num_series=4, num_variates=2, length=120, seed=7)
    return generate_synthetic(cfg)


@pytest.fixture
def constant_dataset() -> list[MultivariateSeries]:
    return [MultivariateSeries(f"flat-{i}", "H", np.full((2, 64), 3.0 + i)) for i in range(4)]
