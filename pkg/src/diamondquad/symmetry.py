"""Diagonal translation invariance and the diamond-to-square reduction.

For f with f(x, y) = f(x +- L, y +- L) (all four sign combinations), the
integral over the diamond |x| + |y| <= L is half the integral over the
square [-L, L]^2. The four quadrant triangles of the diamond, numbered 1..4 counterclockwise
from the first quadrant, are moved by the matching diagonal shifts onto the four corners of the square outside the
diamond; :func:`verify_tiling` checks that covering by brute force.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, NonConvergence
from .quad import (
    DEFAULT_OPTIONS, Diamond, IntegralResult, QuadratureOptions, Rectangle,
    integrate_diamond_direct, integrate_rectangle,
)

__all__ = [
    "TRANSLATION_SIGNS", "apply_translation", "apply_inverse_translation",
    "InvarianceReport", "check_invariance", "reduce_diamond_to_square",
    "IdentityReport", "verify_identity", "TilingReport", "verify_tiling",
    "covering_translations", "quadrant_of",
]

# shift i maps (x, y) to (x + sx * L, y + sy * L); triangle i is the diamond's part in quadrant i
TRANSLATION_SIGNS = {
    1: (-1.0, -1.0),
    2: (+1.0, -1.0),
    3: (+1.0, +1.0),
    4: (-1.0, +1.0),
}
# quadrant sign pattern of triangle i: (sign of x, sign of y)
_QUADRANT_SIGNS = {
    1: (+1.0, +1.0),
    2: (-1.0, +1.0),
    3: (-1.0, -1.0),
    4: (+1.0, -1.0),
}


def _check_index(i: int) -> None:
    if i not in TRANSLATION_SIGNS:
        raise ArgumentError(f"translation index must be 1..4, got {i!r}")


def apply_translation(i: int, point, L: float):
    """Apply shift ``i`` to ``point`` (a pair, or a pair of arrays)."""
    _check_index(i)
    sx, sy = TRANSLATION_SIGNS[i]
    x, y = point
    return (x + sx * L, y + sy * L)


def apply_inverse_translation(i: int, point, L: float):
    _check_index(i)
    sx, sy = TRANSLATION_SIGNS[i]
    x, y = point
    return (x - sx * L, y - sy * L)


# --------------------------------------------------------------------------
# Invariance

@dataclass(frozen=True)
class InvarianceReport:
    """Sampled residuals of the two generating shifts (+L, +L) and (+L, -L).

    The other two hypothesis shifts are the inverses of these; the residual of
    an inverse shift at p equals the residual of the forward shift at the
    shifted point, so sampling it adds nothing. ``passed`` means no violation
    was found on the sample set, not that f is invariant everywhere.
    """

    generator_deviations: tuple[float, float]
    samples_used: int
    tolerance: float
    seed: int
    passed: bool

    @property
    def verdict(self) -> str:
        return "no violation found" if self.passed else "invariance violated"


def _sample_points(L: float, samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    m = math.isqrt(samples - 1) + 1  # ceil(sqrt(samples))
    h = 2.0 * L / m
    g = -L + (np.arange(m) + 0.5) * h
    gx, gy = np.meshgrid(g, g, indexing="ij")
    rng = np.random.default_rng(seed)
    r = rng.uniform(-L, L, size=(samples, 2))
    return np.concatenate([gx.ravel(), r[:, 0]]), np.concatenate([gy.ravel(), r[:, 1]])


def _values(f, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(f(x, y), dtype=float), x.shape)


def check_invariance(f, L: float, samples: int = 256, tolerance: float = 1e-12,
                     seed: int = 0) -> InvarianceReport:
    """Sample f(x, y) against f(x+L, y+L) and f(x+L, y-L).

    Points: a ceil(sqrt(samples))^2 cell-centred grid over (-L, L)^2 plus
    ``samples`` uniform points from a generator seeded with ``seed``.
    Deviations are measured relative to ``1 + |f(x, y)|``.
    """
    Diamond(L)
    if samples < 1:
        raise ArgumentError("samples must be >= 1")
    if not tolerance > 0:
        raise ArgumentError("tolerance must be > 0")
    x, y = _sample_points(L, samples, seed)
    base = _values(f, x, y)
    scale = 1.0 + np.abs(base)
    devs = []
    for i in (3, 2):  # (+L, +L), (+L, -L)
        sx, sy = apply_translation(i, (x, y), L)
        devs.append(float(np.max(np.abs(base - _values(f, sx, sy)) / scale)))
    d = (devs[0], devs[1])
    return InvarianceReport(d, int(x.size), tolerance, seed,
                            d[0] <= tolerance and d[1] <= tolerance)


# --------------------------------------------------------------------------
# Reduction

def reduce_diamond_to_square(f, L: float,
                             opts: QuadratureOptions = DEFAULT_OPTIONS) -> IntegralResult:
    """Half the square integral, which equals the diamond integral for invariant f.

    Invariance is not checked here; callers that cannot certify it should run
    :func:`check_invariance` first.
    """
    Diamond(L)
    try:
        res = integrate_rectangle(f, Rectangle.square(L), opts)
    except NonConvergence as exc:
        raise NonConvergence(str(exc), exc.result.scaled(0.5, "reduced")) from None
    return res.scaled(0.5, "reduced")


@dataclass(frozen=True)
class IdentityReport:
    lhs: IntegralResult  # diamond by triangle decomposition
    rhs: IntegralResult  # half the square integral
    abs_diff: float
    threshold: float
    passed: bool


def verify_identity(f, L: float, opts: QuadratureOptions = DEFAULT_OPTIONS) -> IdentityReport:
    """Compare the diamond integral with half the square integral.

    Passes when the gap is within ``max(10 * (err_lhs + err_rhs), 1e-10 * (1 + |rhs|))``.
    """
    lhs = integrate_diamond_direct(f, L, opts)
    rhs = reduce_diamond_to_square(f, L, opts)
    diff = abs(lhs.value - rhs.value)
    threshold = max(10.0 * (lhs.error_estimate + rhs.error_estimate),
                    1e-10 * (1.0 + abs(rhs.value)))
    return IdentityReport(lhs, rhs, diff, threshold, diff <= threshold)


# --------------------------------------------------------------------------
# Tiling

@dataclass(frozen=True)
class TilingReport:
    grid_resolution: int
    margin: float
    L: float
    checked_outside: int
    checked_inside: int
    skipped: int
    violations: list = field(default_factory=list)  # (x, y, cover count)

    @property
    def passed(self) -> bool:
        return not self.violations


def quadrant_of(x, y, L: float) -> np.ndarray:
    """Index i of the quadrant triangle strictly containing (x, y), else 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape, dtype=int)
    inside = np.abs(x) + np.abs(y) < L
    for i, (qx, qy) in _QUADRANT_SIGNS.items():
        out[inside & (qx * x > 0) & (qy * y > 0)] = i
    return out


def _cover_counts(x: np.ndarray, y: np.ndarray, L: float):
    counts = np.zeros(x.shape, dtype=int)
    for i in TRANSLATION_SIGNS:
        px, py = apply_inverse_translation(i, (x, y), L)
        counts += quadrant_of(px, py, L) == i
    return counts


def covering_translations(point, L: float) -> list[int]:
    """Indices i for which undoing shift i puts ``point`` strictly inside triangle i."""
    Diamond(L)
    out = []
    for i in TRANSLATION_SIGNS:
        px, py = apply_inverse_translation(i, point, L)
        if int(quadrant_of(px, py, L)) == i:
            out.append(i)
    return out


def verify_tiling(L: float, grid_resolution: int = 256, margin: float = 1e-6) -> TilingReport:
    """Brute-force check that T_1(C_1), ..., T_4(C_4) cover the square minus the diamond once.

    Cell-centred grid points within ``margin`` of any boundary involved
    (the square's edge, the diamond's edge, the coordinate axes) are skipped.
    Points outside the diamond must be covered exactly once, points inside
    not at all.
    """
    if not (isinstance(L, (int, float)) and math.isfinite(L) and L > 0):
        raise ArgumentError(f"L must be positive, got {L!r}")
    if not isinstance(grid_resolution, (int, np.integer)) or grid_resolution < 8:
        raise ArgumentError("grid_resolution must be an integer >= 8")
    if not (0 < margin < L / 10):
        raise ArgumentError(f"margin must be in (0, L/10), got {margin!r}")
    h = 2.0 * L / grid_resolution
    g = -L + (np.arange(grid_resolution) + 0.5) * h
    x, y = (a.ravel() for a in np.meshgrid(g, g, indexing="ij"))
    ax, ay = np.abs(x), np.abs(y)
    near = ((np.abs(ax + ay - L) < margin) | (ax < margin) | (ay < margin)
            | (ax > L - margin) | (ay > L - margin))
    outside = ~near & (ax + ay > L)
    inside = ~near & (ax + ay < L)
    counts = _cover_counts(x, y, L)
    bad = (outside & (counts != 1)) | (inside & (counts != 0))
    violations = [(float(a), float(b), int(c)) for a, b, c in zip(x[bad], y[bad], counts[bad])]
    return TilingReport(int(grid_resolution), float(margin), float(L), int(outside.sum()),
                        int(inside.sum()), int(near.sum()), violations)
