"""Simulation and exact-moment toolkit for the beta-Laguerre ensemble.

The ensemble is sampled through its bidiagonal chi model, spectra of the
resulting Jacobi matrices are computed in O(N^2) by implicit QL, mean
moments are available as exact rational polynomials, and the limit laws
(Marchenko-Pastur and the high-temperature associated Laguerre law) are
tabulated for comparison.
"""

from .errors import DomainError, NumericalError, ParameterError
from .exact import mean_unscaled_moment, moment_poly, verify_duality
from .laws import (AssocLaguerreLaw, MpLaw, NuLaw, assoc_laguerre_density, clt_variance_mp,
                   jacobi_truncation_moment, mp_density, mp_moment, nu_density, nu_moment)
from .rng import SeedSpec, sample_chi, sample_gamma
from .tridiag import EnsembleParams, JacobiMatrix, eigenvalues, sample_spectrum, spectral_weights

__version__ = "0.1.0"

__all__ = [
    "AssocLaguerreLaw", "DomainError", "EnsembleParams", "JacobiMatrix", "MpLaw", "NuLaw",
    "NumericalError", "ParameterError", "SeedSpec", "assoc_laguerre_density", "clt_variance_mp",
    "eigenvalues", "jacobi_truncation_moment", "mean_unscaled_moment", "moment_poly", "mp_density",
    "mp_moment", "nu_density", "nu_moment", "sample_chi", "sample_gamma", "sample_spectrum",
    "spectral_weights", "verify_duality",
]
