"""The exponential-of-trigonometric example, evaluated four ways.

    I(A, B, C, D) = int_{-pi}^{pi} int_{-pi}^{pi}
        exp(A cos(u+v) + B sin(u+v) + C cos(u-v) + D sin(u-v)) du dv
                  = 4 pi^2 I0(sqrt(A^2 + B^2)) I0(sqrt(C^2 + D^2))

Routes:

* ``direct``: tensor quadrature of the integrand on [-pi, pi]^2.
* ``diamond``: with x = (u+v)/2, y = (u-v)/2 the square becomes the diamond
  |x| + |y| <= pi and du dv = 2 dx dy; integrated by triangle decomposition.
* ``reduced``: the diamond integrand is invariant under the diagonal
  pi-shifts, so the diamond integral is half the square integral, which
  factorizes into two 1D integrals.
* ``closed_form``: the Bessel product above.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .quad import (
    DEFAULT_OPTIONS, IntegralResult, QuadratureOptions, Rectangle,
    integrate_1d, integrate_diamond_direct, integrate_rectangle,
)
from .specfun import bessel_i0

__all__ = [
    "ExampleParams", "AmplitudePhase", "ExampleEvaluation", "RouteError", "REFERENCE_PARAMS",
    "canonical_amplitude_phase", "direct_integrand", "diamond_integrand",
    "integral_direct", "integral_diamond", "integral_reduced", "integral_closed_form",
    "evaluate_all",
]

ROUTES = ("direct", "diamond", "reduced", "closed_form")


@dataclass(frozen=True)
class ExampleParams:
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    D: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.A, self.B, self.C, self.D)):
            raise ValueError("example coefficients must be finite")


REFERENCE_PARAMS = ExampleParams(1.0, 0.5, -0.8, 0.2)


@dataclass(frozen=True)
class AmplitudePhase:
    R: float
    delta: float


def canonical_amplitude_phase(a: float, b: float) -> AmplitudePhase:
    """Write a cos t + b sin t as R cos(t - delta), delta in (-pi, pi].

    delta is 0 when R is 0.
    """
    R = math.hypot(a, b)
    if R == 0.0:
        return AmplitudePhase(0.0, 0.0)
    delta = math.atan2(b, a)
    if delta == -math.pi:  # atan2(-0.0, negative); keep the (-pi, pi] convention
        delta = math.pi
    return AmplitudePhase(R, delta)


def direct_integrand(p: ExampleParams):
    def g(u, v):
        s, d = u + v, u - v
        return np.exp(p.A * np.cos(s) + p.B * np.sin(s) + p.C * np.cos(d) + p.D * np.sin(d))
    return g


def _mode(ap: AmplitudePhase):
    def h(t):
        return np.exp(ap.R * np.cos(2.0 * t - ap.delta))
    return h


def diamond_integrand(p: ExampleParams):
    """exp(R1 cos(2x - d1)) * exp(R2 cos(2y - d2)); pi-periodic in each variable."""
    hx = _mode(canonical_amplitude_phase(p.A, p.B))
    hy = _mode(canonical_amplitude_phase(p.C, p.D))

    def g(x, y):
        return hx(x) * hy(y)
    return g


def integral_direct(p: ExampleParams, opts: QuadratureOptions = DEFAULT_OPTIONS) -> IntegralResult:
    res = integrate_rectangle(direct_integrand(p), Rectangle.square(math.pi), opts)
    return res.scaled(1.0, "direct")


def integral_diamond(p: ExampleParams, opts: QuadratureOptions = DEFAULT_OPTIONS) -> IntegralResult:
    res = integrate_diamond_direct(diamond_integrand(p), math.pi, opts)
    return res.scaled(2.0, "diamond")


def integral_reduced(p: ExampleParams, opts: QuadratureOptions = DEFAULT_OPTIONS) -> IntegralResult:
    rx = integrate_1d(_mode(canonical_amplitude_phase(p.A, p.B)), -math.pi, math.pi, opts)
    ry = integrate_1d(_mode(canonical_amplitude_phase(p.C, p.D)), -math.pi, math.pi, opts)
    value = rx.value * ry.value
    # first-order propagation of the two 1D estimates
    err = abs(rx.value) * ry.error_estimate + abs(ry.value) * rx.error_estimate
    return IntegralResult(value, err, rx.evaluations + ry.evaluations, "reduced")


def integral_closed_form(p: ExampleParams) -> IntegralResult:
    """4 pi^2 I0(sqrt(A^2+B^2)) I0(sqrt(C^2+D^2)).

    ``evaluations`` is the number of I0 evaluations (2).
    """
    value = 4.0 * math.pi ** 2 * bessel_i0(math.hypot(p.A, p.B)) * bessel_i0(math.hypot(p.C, p.D))
    return IntegralResult(value, 0.0, 2, "closed_form")


class RouteError(RuntimeError):
    def __init__(self, route: str, cause: Exception):
        self.route = route
        self.cause = cause
        super().__init__(f"route {route!r} failed: {cause}")


@dataclass(frozen=True)
class ExampleEvaluation:
    params: ExampleParams
    direct: IntegralResult
    diamond: IntegralResult
    reduced: IntegralResult
    closed_form: IntegralResult
    max_pairwise_rel_dev: float

    def routes(self) -> dict[str, IntegralResult]:
        return {name: getattr(self, name) for name in ROUTES}


def evaluate_all(p: ExampleParams, opts: QuadratureOptions = DEFAULT_OPTIONS) -> ExampleEvaluation:
    """Run all four routes; deviations are |a - b| / |closed form| over the 6 pairs."""
    runners = {
        "direct": lambda: integral_direct(p, opts),
        "diamond": lambda: integral_diamond(p, opts),
        "reduced": lambda: integral_reduced(p, opts),
        "closed_form": lambda: integral_closed_form(p),
    }
    results = {}
    for name in ROUTES:
        try:
            results[name] = runners[name]()
        except Exception as exc:
            raise RouteError(name, exc) from exc
    ref = abs(results["closed_form"].value)
    dev = max(abs(results[a].value - results[b].value) / ref
              for a, b in itertools.combinations(ROUTES, 2))
    return ExampleEvaluation(p, **results, max_pairwise_rel_dev=dev)
