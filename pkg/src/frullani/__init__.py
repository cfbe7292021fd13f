"""Frullani scale-mixture distributions: daughters of any lifetime parent,
real-line and multivariate relatives, and censored-data fitting."""

from . import closed_forms  # noqa: F401  (registers closed-form fast paths)
from .closed_forms import (F1Exponential, F1Gamma, F1LogLogistic, F1LogNormal, F1Pareto,
                           F1Weibull, F2LogLogistic)
from .core import (MixingDensity, ScaleMixture, canonical_scales, frullani_identity_check,
                   slash_cdf)
from .data import DataError, Observation, SurvivalDataset, load_dataset
from .inference import (FAMILIES, FitResult, ModelSpec, compare_models, fit,
                        flat_direction_derivative, infer_errors, neg_log_lik, score_test)
from .multivariate import BivariateMixture, F1MultivariateNormal, biv_identity_check
from .numerics import RandomStream
from .parents import PARENTS, make_parent
from .real_line import (F1Cauchy, F1Gaussian, SkewF1Gaussian, TwoPieceF1Gaussian,
                        UniformLocationNormal, kurtosis_to_ratio)

__version__ = "0.1.0"

__all__ = [
    "BivariateMixture", "DataError", "F1Cauchy", "F1Exponential", "F1Gamma", "F1Gaussian",
    "F1LogLogistic", "F1LogNormal", "F1MultivariateNormal", "F1Pareto", "F1Weibull",
    "F2LogLogistic", "FAMILIES", "FitResult", "MixingDensity", "ModelSpec", "Observation",
    "PARENTS", "RandomStream", "ScaleMixture", "SkewF1Gaussian", "SurvivalDataset",
    "TwoPieceF1Gaussian", "UniformLocationNormal", "biv_identity_check", "canonical_scales",
    "compare_models", "fit", "flat_direction_derivative", "frullani_identity_check",
    "infer_errors", "kurtosis_to_ratio", "load_dataset", "make_parent", "neg_log_lik",
    "score_test", "slash_cdf",
]
