"""Reflected generalized beta inverse Weibull lifetime distribution toolkit."""

from .distribution import (
    Params,
    Seed,
    SubModel,
    cdf,
    hazard,
    log_pdf,
    median,
    pdf,
    quantile,
    sample,
    survival,
)
from .inference import (
    Dataset,
    FitConfig,
    FitResult,
    GofReport,
    TTTCurve,
    TTTKind,
    aic,
    fit,
    ks_test,
    log_likelihood,
    lr_test,
    observed_information,
    score,
    ttt_empirical,
    ttt_fitted,
)
from .series import (
    OrderStatForm,
    SeriesControl,
    SeriesPolicy,
    SeriesValue,
    StressStrengthPair,
    kurtosis,
    mean,
    order_stat_moment,
    order_stat_pdf,
    raw_moment,
    reliability,
    renyi_entropy,
    shannon_entropy,
    skewness,
    variance,
)

__version__ = "0.1.0"

__all__ = [
    "Params",
    "Seed",
    "SubModel",
    "cdf",
    "pdf",
    "log_pdf",
    "survival",
    "hazard",
    "quantile",
    "median",
    "sample",
    "Dataset",
    "FitConfig",
    "FitResult",
    "GofReport",
    "TTTCurve",
    "TTTKind",
    "log_likelihood",
    "score",
    "observed_information",
    "fit",
    "aic",
    "ks_test",
    "lr_test",
    "ttt_empirical",
    "ttt_fitted",
    "SeriesControl",
    "SeriesPolicy",
    "SeriesValue",
    "StressStrengthPair",
    "OrderStatForm",
    "raw_moment",
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "renyi_entropy",
    "shannon_entropy",
    "order_stat_pdf",
    "order_stat_moment",
    "reliability",
    "__version__",
]
