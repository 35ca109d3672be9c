from .batching import (
    Batch,
    ShuffleConfig,
    build_id_mask,
    left_pad,
    padded_length,
    preprocess_batch,
    sample_training_windows,
)
from .frequency import FrequencySpec, parse_frequency
from .multivariateSeries import MultivariateSeries
from .synthetic import SynthConfig, generate_synthetic, stationary_ar_coefficients
