"""Spacings, censored-data and quantile estimators of Tsallis entropy, and
goodness-of-fit tests built on the Tsallis divergence."""

from .censoring import (
    CensoringScheme,
    PC2Sample,
    exp_mle_pc2,
    generate_pc2,
    parse_scheme,
    tsallis_divergence_pc2,
    tsallis_pc2,
)
from .distributions import DistributionModel, Family, renyi_from_tsallis
from .divergence import (
    FittedFamily,
    baratpour_rad_T,
    kl_mn_statistic,
    tsallis_divergence,
)
from .errors import (
    DegenerateIncrement,
    InvalidParameter,
    NonexistentEntropy,
    TiedSpacings,
)
from .inference import (
    critical_value,
    exponentiality_test,
    normality_test,
    pc2_exponentiality_test,
    simulate_null,
)
from .quantile import KernelSpec, bandwidth_nrr, kde, tsallis_quantile
from .sample import Sample
from .spacings import (
    shannon_vasicek,
    tsallis_e,
    tsallis_h,
    tsallis_v,
    tsallis_w,
    window_default,
)

__version__ = "0.1.0"
