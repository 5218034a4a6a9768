"""Seedable random streams, special functions and Cholesky factorization."""

from tabsynth.numerics.linalg import cholesky
from tabsynth.numerics.rng import RngStream, rng_standard_normal
from tabsynth.numerics.special import (
    beta_pdf,
    beta_quantile,
    erf,
    erfc,
    ln_beta,
    ln_gamma,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    reg_inc_beta,
)

__all__ = [
    "RngStream",
    "beta_pdf",
    "beta_quantile",
    "cholesky",
    "erf",
    "erfc",
    "ln_beta",
    "ln_gamma",
    "normal_cdf",
    "normal_pdf",
    "normal_quantile",
    "reg_inc_beta",
    "rng_standard_normal",
]
