"""Rankin-Selberg L-function laboratory."""

from .afe import SMOOTHING_CONTOUR, SMOOTHING_DYADIC, CentralValue, Smoothing, afe_value, central_value, solve_residue
from .gamma import GammaFactorSpec, log_gamma, stirling_log_gamma
from .scan import DEFAULT_T_GRID, ScanParameters, ScanResult, ScanRow, exponent_scan, scan_lengths, scan_parameters
from .series import (EulerCheck, RankinSelbergSeries, dirichlet_value, euler_product, euler_product_check,
                     partial_sum_S, primes_up_to, satake_parameters)
from .zeta import zeta

__all__ = [
    "CentralValue", "DEFAULT_T_GRID", "EulerCheck", "GammaFactorSpec", "RankinSelbergSeries", "SMOOTHING_CONTOUR",
    "SMOOTHING_DYADIC", "ScanParameters", "ScanResult", "ScanRow", "Smoothing", "afe_value", "central_value",
    "dirichlet_value", "euler_product", "euler_product_check", "exponent_scan", "log_gamma", "partial_sum_S",
    "primes_up_to", "satake_parameters", "scan_lengths", "scan_parameters", "solve_residue", "stirling_log_gamma",
    "zeta",
]
