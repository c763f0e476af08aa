"""Evaluation counts of the three diamond methods across tolerances.

Usage: python scripts/cost_sweep.py

Integrand: the diamond-form example integrand at (1, 0.5, -0.8, 0.2) on L = pi.
Prints one row per tolerance; NonConvergence rows show the best available count.
"""
import math

from diamondquad.errors import NonConvergence
from diamondquad.example import REFERENCE_PARAMS, diamond_integrand, integral_closed_form
from diamondquad.quad import QuadratureOptions, integrate_diamond_direct, integrate_diamond_rotated
from diamondquad.symmetry import reduce_diamond_to_square

METHODS = {
    "direct": integrate_diamond_direct,
    "rotated": integrate_diamond_rotated,
    "reduced": reduce_diamond_to_square,
}


def main():
    f = diamond_integrand(REFERENCE_PARAMS)
    exact = integral_closed_form(REFERENCE_PARAMS).value / 2
    print(f"{'tol':>8} " + " ".join(f"{m:>10} {'relerr':>9}" for m in METHODS))
    for tol in (1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14):
        opts = QuadratureOptions(base_order=8).with_tol(tol)
        cells = []
        for fn in METHODS.values():
            try:
                res = fn(f, math.pi, opts)
            except NonConvergence as exc:
                res = exc.result
            cells.append(f"{res.evaluations:>10} {abs(res.value - exact) / exact:>9.1e}")
        print(f"{tol:>8.0e} " + " ".join(cells))


if __name__ == "__main__":
    main()
