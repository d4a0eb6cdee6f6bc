"""Copula dependence coefficient and baseline dependence measures."""

from .ace import AceConfig, AceFit, ace_fit
from .cdf import (CopulaVector, DegenerateInputError, KernelCdfConfig, copula_transform,
                  ecdf_multivariate, ecdf_univariate, kernel_cdf)
from .data import (DataError, ParseError, RandomStream, SampleMatrix, load_csv, save_csv,
                   split_stream)
from .experiments import (PermutationConfig, PowerGrid, independence_study, null_sim,
                          permutation_pvalue, power_curve)
from .measures import (Chi2Config, MeasureResult, MeasureSettings, RdcConfig, ace_baseline, cdc,
                       chi2_statistic, pearson, rdc)
from .smoothing import SmootherConfig, smooth_conditional_mean
from .synthetic import (ModelSpec, NoiseSpec, gen_2d_suite, gen_predictors, gen_response,
                        model_spec, noise_grid)

__version__ = "0.1.0"
