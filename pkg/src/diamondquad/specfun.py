"""Modified Bessel function of the first kind, order zero."""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["BesselSeriesConfig", "ConvergenceError", "bessel_i0", "SUPPORTED_RANGE"]

# |z| for which the default config is guaranteed to converge
SUPPORTED_RANGE = 100.0


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BesselSeriesConfig:
    max_terms: int = 200
    term_tolerance: float = 1e-17

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.term_tolerance > 0:
            raise ValueError("term_tolerance must be > 0")


DEFAULT_CONFIG = BesselSeriesConfig()


def bessel_i0(z: float, config: BesselSeriesConfig = DEFAULT_CONFIG) -> float:
    """I0(z) from its power series sum_k (z^2/4)^k / (k!)^2.

    All terms are positive, so the partial sums increase monotonically and
    there is no cancellation. Terms follow t_{k+1} = t_k * (z^2/4) / (k+1)^2.
    Summation stops once the next term drops below
    ``term_tolerance * partial_sum``; running out of ``max_terms`` first
    raises ConvergenceError. Converges with the default config for
    ``|z| <= 100``.
    """
    z = float(z)
    if not math.isfinite(z):
        raise ConvergenceError(f"bessel_i0 argument must be finite, got {z!r}")
    q = 0.25 * z * z
    term = 1.0
    total = 1.0
    for k in range(1, config.max_terms):
        term *= q / (k * k)
        if term < config.term_tolerance * total:
            return total
        total += term
        if not math.isfinite(total):
            raise ConvergenceError(f"bessel_i0 series overflowed at |z|={abs(z)}")
    # the last term added may already be below tolerance of the final sum
    if term * q / (config.max_terms ** 2) < config.term_tolerance * total:
        return total
    raise ConvergenceError(
        f"bessel_i0 series did not converge in {config.max_terms} terms for |z|={abs(z)}"
    )
