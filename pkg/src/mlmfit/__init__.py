"""Fit the Modified Lomax (MLM) distribution and competing heavy-tailed models to
network degree distributions."""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    FAMILIES, Exponential, LogNormal, Lomax, MlmParams, Pareto, Poisson, PowerLaw,
    PowerLawCutoff, degree_pmf, interval_pmf, mlm_cdf, mlm_pdf, mlm_quantile, mlm_sample,
)
from .estimation import FitResult, Sample, confidence_intervals, fit_mlm, fit_model  # noqa: E402
from .gof import bootstrap_pvalue, compare_models  # noqa: E402
from .graph_io import DegreeHistogram, degree_histogram, load_histogram, save_histogram  # noqa: E402
