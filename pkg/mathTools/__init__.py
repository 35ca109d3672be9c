from .Inspection import binary_check, equivalence_check, finite_check
from .statistics import autocorrelation, empirical_quantiles, weighted_std
