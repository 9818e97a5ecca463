"""Antiperiodic XXZ chain: Bethe roots, SoV determinant formulas, brute-force oracle."""

from .kernels import BACKEND
from .model import ChainParams, RootSet, energy, lambda_tq
from .bae import SolverConfig, certify, solve_bae
from .detforms import (
    FormFactorRequest,
    cf_minus_minus,
    cf_zz,
    ff_sigma_minus,
    ff_sigma_z,
    scalar_product_offshell,
    scalar_product_onshell_left,
    scalar_product_onshell_right,
)
from .homolimit import (
    homogeneous_cf_mm,
    homogeneous_cf_zz,
    homogeneous_ff_sminus,
    homogeneous_ff_sz,
    homogeneous_scalar_product,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChainParams", "RootSet", "energy", "lambda_tq",
    "SolverConfig", "certify", "solve_bae",
    "FormFactorRequest", "cf_minus_minus", "cf_zz", "ff_sigma_minus", "ff_sigma_z",
    "scalar_product_offshell", "scalar_product_onshell_left", "scalar_product_onshell_right",
    "homogeneous_cf_mm", "homogeneous_cf_zz", "homogeneous_ff_sminus", "homogeneous_ff_sz",
    "homogeneous_scalar_product",
]
