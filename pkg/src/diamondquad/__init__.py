"""Diamond-to-square reduction of 2D integrals for diagonally periodic integrands.

If f(x, y) = f(x +- L, y +- L), the integral of f over |x| + |y| <= L is half
its integral over [-L, L]^2. This package provides the quadrature to check
that numerically, a sampling test of the hypothesis, a brute-force check of
the geometric tiling behind it, and a worked Bessel-function example.
"""
from .errors import ArgumentError, DegenerateDomain, NonConvergence, NonFiniteIntegrand
from .expr import EvalDomainError, ParseError, as_integrand, evaluate, free_variables, parse
from .quad import (
    Diamond, IntegralResult, QuadratureOptions, Rectangle, Rule1D, Triangle,
    gauss_legendre_rule, integrate_1d, integrate_diamond_direct, integrate_diamond_rotated,
    integrate_rectangle, integrate_triangle,
)
from .specfun import BesselSeriesConfig, ConvergenceError, bessel_i0
from .symmetry import (
    apply_translation, check_invariance, reduce_diamond_to_square, verify_identity, verify_tiling,
)

__version__ = "0.1.0"
