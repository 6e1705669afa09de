"""Tracy-Widom approximations for extreme eigenvalues of white Wishart matrices."""
from ._backend import NAME as BACKEND
from .experiments import (
    CdfReport,
    RateReport,
    SimConfig,
    convergence_study,
    empirical_cdf,
    percentile_relative_error,
    table_report,
)
from .rng import RngStream
from .sampler import (
    ExtremePair,
    Tridiagonal,
    extreme_eigenvalue,
    sample_bidiagonal,
    sample_chi,
    sample_extremes,
    simulate_extremes,
    sturm_count,
)
from .scaling import (
    LinearScale,
    LogScale,
    Shape,
    SpikeTestResult,
    cdf_largest,
    cdf_smallest,
    constants_largest,
    constants_largest_new,
    constants_largest_old,
    constants_smallest,
    pvalue_largest,
    pvalue_smallest,
    spiked_sequence,
)
from .specfun import airy_ai, airy_ai_prime, det_dense, gauss_legendre_rule
from .tw import (
    GridConfig,
    TwGrid,
    build_grid,
    default_grid,
    f1_cdf,
    f1_fredholm,
    f1_pdf,
    f1_quantile,
    g1_cdf,
    load_grid,
    save_grid,
)

__version__ = "0.1.0"
