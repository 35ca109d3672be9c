from .compositeLoss import LossConfig, LossTerms, composite_loss, composite_loss_terms
from .mixtureParams import HEAD_NAMES, MACHINE_EPSILON, MixtureParams, compute_params
from .robustLoss import check_robust_parameters, parse_alpha, robust_loss
from .studentT import component_log_density, log_prob, mixture_cdf, mixture_mean, mixture_variance, sample
