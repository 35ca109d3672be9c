"""
枚举与默认超参数
Author: ICO
Date: 2024-03-03"""

from enum import Enum


class Frequency(Enum):
    SECONDLY = "S"
    MINUTELY = "T"
    HOURLY = "H"
    DAILY = "D"
    WEEKLY = "W"
    MONTHLY = "M"


class Term(Enum):
    SHORT = "short"
    MEDIUM = "medium"
    LONG = "long"


class AttentionKind(Enum):
    TIMEWISE = "timewise"
    VARIATEWISE = "variatewise"
    FULL = "full"


class AttentionMode(Enum):
    FACTORIZED = "factorized"
    FULL = "full"


class ShuffleMode(Enum):
    ADJACENT = "adjacent"
    RANDOM = "random"
    NORMAL = "normal"
    NONE = "none"


class ResidualDistribution(Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T = "student_t"
    LOGNORMAL = "lognormal"


class Ablation(Enum):
    NONE = "none"
    NO_VARIATE_ATTENTION = "no-variate-attention"
    NO_ROBUST_LOSS = "no-robust-loss"
    NO_SMM = "no-smm"
    NO_CAUSAL_SCALING = "no-causal-scaling"


class HyperParameterCONFIG:
    # 频率 -> 基本步长 (秒)，月按平均公历月计
    FREQUENCY_SECONDS = {
        Frequency.SECONDLY: 1,
        Frequency.MINUTELY: 60,
        Frequency.HOURLY: 3600,
        Frequency.DAILY: 86400,
        Frequency.WEEKLY: 604800,
        Frequency.MONTHLY: 2629746,
    }
    # 频率 -> 短期预测长度
    SHORT_HORIZON = {
        Frequency.MONTHLY: 12,
        Frequency.WEEKLY: 8,
        Frequency.DAILY: 30,
        Frequency.HOURLY: 48,
        Frequency.MINUTELY: 48,
        Frequency.SECONDLY: 60,
    }
    # 频率 -> 季节周期 m
    SEASONALITY = {
        Frequency.SECONDLY: 60,
        Frequency.MINUTELY: 1440,
        Frequency.HOURLY: 24,
        Frequency.DAILY: 7,
        Frequency.WEEKLY: 1,
        Frequency.MONTHLY: 12,
    }
    TERM_FACTORS = {Term.SHORT: 1, Term.MEDIUM: 10, Term.LONG: 15}
    TEST_FRACTION = 0.10
    CRPS_LEVELS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    SHIFTED_GEOMEAN_EPSILON = 1e-5

    # 缩放
    MINIMUM_SCALE = 0.1
    CLIP_FLOOR = 0.1
    KAPPA = 10.0

    # 模型 (按桌面规模缩小)
    EMBED_DIM = 32
    PATCH_SIZE = 8
    NUM_HEADS = 4
    NUM_LAYERS = 4
    TIME_PER_VARIATE_RATIO = 3
    MLP_DIM = 128
    MIXTURE_COMPONENTS = 3
    MAX_CONTEXT = 256
    ROPE_BASE = 10000.0
    RMSNORM_EPS = 1e-6
    MASK_VALUE = -1e30

    # 损失
    LAMBDA_NLL = 0.5755
    ROBUST_ALPHA = 0.0
    ROBUST_DELTA = 0.1010

    # 训练
    LEARNING_RATE = 1e-3
    BETAS = (0.9579, 0.9581)
    WEIGHT_DECAY = 0.0014
    WARMUP_STEPS = 200
    STABLE_STEPS = 1400
    DECAY_STEPS = 400
    BATCH_SIZE = 8
    GRAD_CLIP = 1.0
    ADAM_EPSILON = 1e-8
    MAX_UNROLL_PATCHES = 256

    # 数据
    MAX_VARIATES = 32
    SHUFFLE_PROBABILITY = 0.14
    NUM_SAMPLES = 256
