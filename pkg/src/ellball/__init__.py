"""Rigorous ball-arithmetic evaluation of elliptic and modular functions."""

from .agm import agm, agm1, agm_derivative, agm_series_coeffs, elliptic_e, elliptic_k
from .arith import ComplexBall, RealBall, acb, arb, format_complex, format_real
from .carlson import elliptic_pi, legendre_e_inc, legendre_f, legendre_pi, rc, rd, rf, rg, rj
from .elementary import exp, log, pi, sqrt
from .errors import (
    BranchCutError,
    ConvergenceError,
    DomainError,
    EllballError,
    PoleError,
    UnsupportedDomainError,
)
from .modular import (
    ModularTransform,
    dedekind_eta,
    discriminant,
    eisenstein,
    j_invariant,
    reduce_fundamental,
    theta_constants,
)
from .series import BallSeries
from .theta import jacobi_theta, theta_term_count
from .weierstrass import inverse_wp, lattice_data, wp, wp_sigma, wp_zeta

__all__ = [
    "ComplexBall", "RealBall", "BallSeries", "acb", "arb", "format_real", "format_complex",
    "exp", "log", "sqrt", "pi",
    "ModularTransform", "reduce_fundamental", "dedekind_eta", "j_invariant", "discriminant",
    "eisenstein", "theta_constants", "jacobi_theta", "theta_term_count",
    "wp", "wp_zeta", "wp_sigma", "lattice_data", "inverse_wp",
    "agm", "agm1", "agm_derivative", "agm_series_coeffs", "elliptic_k", "elliptic_e",
    "rf", "rc", "rd", "rj", "rg", "legendre_f", "legendre_e_inc", "legendre_pi", "elliptic_pi",
    "EllballError", "DomainError", "BranchCutError", "PoleError", "UnsupportedDomainError",
    "ConvergenceError",
]
