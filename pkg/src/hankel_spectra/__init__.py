"""Spectral laboratory for multi-variable Hankel operators with symbols j^-d (log j)^-gamma."""

from ._backend import BACKEND
from .constants import AsymptoticConstants, asymptotic_constants, c_dgamma, phi_check, phi_d
from .errors import (
    CapacityError, ConfigurationError, ContractError, DomainError, HankelSpectraError, NumericError,
)
from .lab import LabReport, asymptotic_study, model_compare, parity_split_study, quasinorm
from .params import Kind, QuadratureConfig, SymbolSpec
from .reduction import WeightedHankelMatrix, build_simplex_hankel, build_weighted_hankel
from .speceng import FastHankelOperator, SpectrumResult, dense_eig, lanczos_extremal
from .weylcheck import PsdoSpec, weyl_predict, weyl_verify

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AsymptoticConstants", "asymptotic_constants", "c_dgamma", "phi_check", "phi_d",
    "CapacityError", "ConfigurationError", "ContractError", "DomainError", "HankelSpectraError",
    "NumericError", "LabReport", "asymptotic_study", "model_compare", "parity_split_study",
    "quasinorm", "Kind", "QuadratureConfig", "SymbolSpec", "WeightedHankelMatrix",
    "build_simplex_hankel", "build_weighted_hankel", "FastHankelOperator", "SpectrumResult",
    "dense_eig", "lanczos_extremal", "PsdoSpec", "weyl_predict", "weyl_verify",
]
