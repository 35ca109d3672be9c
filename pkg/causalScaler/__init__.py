from .clipping import clip_scales, variate_scale
from .patchScaler import (
    CausalStats,
    ScalerConfig,
    denormalize,
    normalize_global,
    normalize_patches,
    scale_targets,
)
from .welford import compute_causal_statistics
