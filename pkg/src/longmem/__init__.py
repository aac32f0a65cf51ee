"""Long-memory scaling and cross-correlation analysis for rate panels.

Pipeline: load a dated panel, align it, turn each series into a profile
of mean-centered absolute changes, measure detrended fluctuations across
window sizes, and read scaling exponents, pairwise co-movement
coefficients, thresholded correlation networks and their community
structure off the results.  A synthetic-noise generator with a known
target exponent backs all of it as the test oracle.
"""

from .dcca import (
    CrossFluctuation,
    DccaMatrix,
    RhoCurve,
    cross_fluctuation,
    pairwise_matrix,
    rho_dcca,
    rho_from_profiles,
    rho_vs_scale,
)
from .errors import (
    AlignmentError,
    DegenerateSeriesError,
    FitError,
    LongmemError,
    ScaleError,
    SchemaError,
)
from .hurst import (
    CrossoverReport,
    HurstDistribution,
    HurstEstimate,
    classify,
    detect_crossover,
    fit_hurst,
    hurst_distribution,
)
from .network import (
    CommunityPartition,
    CorrelationNetwork,
    average_weighted_degree,
    build_network,
    detect_communities,
    partition_table,
    split_periods,
    to_dot,
    to_graphml,
)
from .scaling import (
    DEFAULT_SCALE_CAP,
    DetrendMethod,
    FluctuationFunction,
    ScaleGrid,
    default_grid,
    detrended_segments,
    dfa,
    dma,
    fluctuation,
    local_trend,
    moving_average,
    segment_bounds,
)
from .series import (
    IncrementSeries,
    Profile,
    RatePanel,
    TimeSeries,
    align,
    increments,
    load_panel,
    panel_to_csv,
    profile,
    profile_from_values,
    series_profile,
)
from .synthetic import (
    BlockSpec,
    FgnSpec,
    autocovariance,
    generate_blocks,
    generate_fgn,
    trading_dates,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # series
    "TimeSeries", "RatePanel", "IncrementSeries", "Profile",
    "load_panel", "panel_to_csv", "align", "increments",
    "profile", "profile_from_values", "series_profile",
    # scaling
    "DetrendMethod", "ScaleGrid", "FluctuationFunction",
    "DEFAULT_SCALE_CAP", "dfa", "dma", "default_grid", "segment_bounds",
    "moving_average", "detrended_segments", "local_trend", "fluctuation",
    # hurst
    "HurstEstimate", "CrossoverReport", "HurstDistribution",
    "classify", "fit_hurst", "detect_crossover", "hurst_distribution",
    # dcca
    "CrossFluctuation", "DccaMatrix", "RhoCurve",
    "cross_fluctuation", "rho_from_profiles", "rho_dcca",
    "pairwise_matrix", "rho_vs_scale",
    # network
    "CorrelationNetwork", "CommunityPartition",
    "build_network", "detect_communities", "average_weighted_degree",
    "split_periods", "to_graphml", "to_dot", "partition_table",
    # synthetic
    "FgnSpec", "BlockSpec", "autocovariance", "trading_dates",
    "generate_fgn", "generate_blocks",
    # errors
    "LongmemError", "SchemaError", "AlignmentError", "ScaleError",
    "FitError", "DegenerateSeriesError",
]
