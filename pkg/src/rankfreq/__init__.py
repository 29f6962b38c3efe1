"""Corpus rank-frequency analysis toolkit.

Builds character/word frequency tables from UTF-8 text, detects and fits
the Zipfian and exponential-like regimes of the rank-frequency curve,
solves a latent-probability corpus model, tests goodness of fit, and
compares four predictors of the hapax-legomena structure.
"""

from rankfreq.corpus import (
    CorpusError,
    JumpRanks,
    RankFrequency,
    TokenCounts,
    hapax_boundary,
    jump_ranks,
    mix,
    range_mass,
    rank,
    read_text_utf8,
    tokenize,
)
from rankfreq.fitting import (
    ExpFit,
    FitError,
    PowerLawFit,
    detect_zipf_range,
    fit_exponential,
    loglog_linfit,
    mle_exponent,
    nls_fit,
    zipf_deviation,
)
from rankfreq.goodness import KsResult, kolmogorov_cdf, ks_test, ks_test_zipf
from rankfreq.hapax import (
    HapaxError,
    HapaxTable,
    RgfParams,
    WaringParams,
    compare_predictors,
    lotka_counts,
    predict_gz,
    predict_gz_beta,
    predict_rgf,
    predict_waring,
    rgf_fit,
    waring_fit,
)
from rankfreq.model import (
    GAMMA_E,
    ModelCurve,
    ModelError,
    ModelParams,
    generalized_zipf,
    generate_corpus,
    mean_residual,
    model_curve,
    occurrence_pmf,
    rank_of_phi,
    seed_mu,
    solve_mu,
)
from rankfreq.report import AnalysisReport, analyze, canonical_json, curve_csv

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "CorpusError",
    "ExpFit",
    "FitError",
    "GAMMA_E",
    "HapaxError",
    "HapaxTable",
    "JumpRanks",
    "KsResult",
    "ModelCurve",
    "ModelError",
    "ModelParams",
    "PowerLawFit",
    "RankFrequency",
    "RgfParams",
    "TokenCounts",
    "WaringParams",
    "analyze",
    "canonical_json",
    "compare_predictors",
    "curve_csv",
    "detect_zipf_range",
    "fit_exponential",
    "generalized_zipf",
    "generate_corpus",
    "hapax_boundary",
    "jump_ranks",
    "kolmogorov_cdf",
    "ks_test",
    "ks_test_zipf",
    "loglog_linfit",
    "lotka_counts",
    "mean_residual",
    "mix",
    "mle_exponent",
    "model_curve",
    "nls_fit",
    "occurrence_pmf",
    "predict_gz",
    "predict_gz_beta",
    "predict_rgf",
    "predict_waring",
    "range_mass",
    "rank_of_phi",
    "rank",
    "read_text_utf8",
    "rgf_fit",
    "seed_mu",
    "solve_mu",
    "tokenize",
    "waring_fit",
    "zipf_deviation",
]
