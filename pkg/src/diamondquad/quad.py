"""Gauss-Legendre quadrature on intervals, rectangles, triangles and diamonds.

Every integrator estimates its error with an embedded pair: the n-point rule
against the 2n-point rule on the same panel. Adaptive refinement proceeds
level by level (bisection in 1D, quadtree on rectangles, uniform doubling of
the Duffy square on triangles). All panels of a level are evaluated in one
batch and accepted contributions are summed in left-to-right panel order, so
results are bitwise reproducible.

Integrands are vectorized callables ``f(x)`` / ``f(x, y)`` taking numpy
arrays. ``IntegralResult.evaluations`` counts every point at which the
integrand was evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ArgumentError, DegenerateDomain, NonConvergence, NonFiniteIntegrand

__all__ = [
    "Rule1D", "Rectangle", "Triangle", "Diamond", "QuadratureOptions", "IntegralResult",
    "gauss_legendre_rule", "integrate_1d", "integrate_rectangle", "integrate_triangle",
    "integrate_diamond_direct", "integrate_diamond_rotated", "diamond_triangles",
]

MAX_RULE_ORDER = 128
# points per integrand call; bounds peak memory on large levels
_CHUNK_POINTS = 1 << 20


@dataclass(frozen=True)
class Rule1D:
    order: int
    nodes: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class Rectangle:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        vals = (self.x_lo, self.x_hi, self.y_lo, self.y_hi)
        if not all(math.isfinite(v) for v in vals):
            raise ArgumentError("rectangle bounds must be finite")
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise DegenerateDomain(f"empty rectangle {vals}")

    @classmethod
    def square(cls, L: float) -> "Rectangle":
        return cls(-L, L, -L, L)

    @property
    def area(self) -> float:
        return (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)


@dataclass(frozen=True)
class Triangle:
    v0: tuple[float, float]
    v1: tuple[float, float]
    v2: tuple[float, float]

    def __post_init__(self):
        if self.twice_signed_area == 0:
            raise DegenerateDomain(f"degenerate triangle {self.v0}, {self.v1}, {self.v2}")

    @property
    def twice_signed_area(self) -> float:
        (x0, y0), (x1, y1), (x2, y2) = self.v0, self.v1, self.v2
        return (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)

    @property
    def area(self) -> float:
        return 0.5 * abs(self.twice_signed_area)


@dataclass(frozen=True)
class Diamond:
    """The closed region |x| + |y| <= L."""

    L: float

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise ArgumentError(f"diamond half-diagonal must be positive, got {self.L!r}")

    @property
    def area(self) -> float:
        return 2.0 * self.L * self.L


@dataclass(frozen=True)
class QuadratureOptions:
    base_order: int = 32
    adaptive: bool = True
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_depth: int = 30
    # cap on the number of panels evaluated in one call
    max_panels: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ArgumentError("tolerances must be positive")
        if self.base_order < 1 or 2 * self.base_order > MAX_RULE_ORDER:
            raise ArgumentError(
                f"base_order must be in [1, {MAX_RULE_ORDER // 2}] (the error pair uses 2n)"
            )
        if self.adaptive and self.base_order < 2:
            raise ArgumentError("adaptive integration needs base_order >= 2")
        if self.max_depth < 0 or self.max_panels < 1:
            raise ArgumentError("max_depth must be >= 0 and max_panels >= 1")

    def with_tol(self, tol: float) -> "QuadratureOptions":
        return replace(self, abs_tol=tol, rel_tol=tol)


DEFAULT_OPTIONS = QuadratureOptions()


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evaluations: int
    method: str

    def scaled(self, factor: float, method: str | None = None) -> "IntegralResult":
        return IntegralResult(
            factor * self.value, abs(factor) * self.error_estimate,
            self.evaluations, method or self.method,
        )


# --------------------------------------------------------------------------
# Rules

def _legendre_and_derivative(n: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p_prev = np.ones_like(t)
    p = t.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * t * p - (k - 1) * p_prev) / k
    dp = n * (t * p - p_prev) / (t * t - 1.0)
    return p, dp


@lru_cache(maxsize=None)
def _rule(n: int) -> Rule1D:
    if n == 1:
        return Rule1D(1, np.array([0.0]), np.array([2.0]))
    m = (n + 1) // 2
    i = np.arange(1, m + 1)
    t = np.cos(np.pi * (i - 0.25) / (n + 0.5))  # descending positive roots
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, t)
        dt = p / dp
        t = t - dt
        if np.max(np.abs(dt)) <= 1e-15:
            break
    if n % 2:
        t[-1] = 0.0  # middle root of odd-order rules
    _, dp = _legendre_and_derivative(n, t)
    w = 2.0 / ((1.0 - t * t) * dp * dp)
    # mirror so nodes are exactly antisymmetric and weights exactly symmetric
    nodes = np.concatenate([-t, t[::-1][n % 2:]]) + 0.0
    weights = np.concatenate([w, w[::-1][n % 2:]])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return Rule1D(n, nodes, weights)


def gauss_legendre_rule(n: int) -> Rule1D:
    """n-point Gauss-Legendre rule on [-1, 1], nodes ascending.

    Nodes are Newton-refined roots of P_n started from
    ``cos(pi (i - 1/4) / (n + 1/2))``; weights are
    ``2 / ((1 - t^2) P_n'(t)^2)``.
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_RULE_ORDER:
        raise ArgumentError(f"rule order must be an integer in [1, {MAX_RULE_ORDER}], got {n!r}")
    return _rule(int(n))


# --------------------------------------------------------------------------
# Helpers

def _call(f: Callable, *coords: np.ndarray) -> np.ndarray:
    """Evaluate f on flat coordinate arrays in bounded chunks."""
    size = coords[0].size
    out = np.empty(size)
    for start in range(0, size, _CHUNK_POINTS):
        sl = slice(start, start + _CHUNK_POINTS)
        chunk = [c[sl] for c in coords]
        vals = np.asarray(f(*chunk), dtype=float)
        out[sl] = np.broadcast_to(vals, chunk[0].shape)
    if not np.all(np.isfinite(out)):
        raise NonFiniteIntegrand("integrand returned a non-finite value")
    return out


def _tolerance(opts: QuadratureOptions, reference: float) -> float:
    return max(opts.abs_tol, opts.rel_tol * abs(reference))


def _ordered_sum(values) -> float:
    return float(np.sum(np.asarray(values, dtype=float)))


# --------------------------------------------------------------------------
# 1D

def _panels_1d(f, lo: np.ndarray, hi: np.ndarray, n: int):
    """G_n and G_2n on each panel [lo_k, hi_k]; returns (g_n, g_2n, evaluations)."""
    out = []
    x_all = []
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    rules = (_rule(n), _rule(2 * n))
    for r in rules:
        x_all.append((mid[:, None] + half[:, None] * r.nodes[None, :]).ravel())
    vals = _call(f, np.concatenate(x_all))
    split = lo.size * n
    for r, v in zip(rules, (vals[:split], vals[split:])):
        out.append(half * (v.reshape(lo.size, r.order) @ r.weights))
    return out[0], out[1], vals.size


def integrate_1d(f: Callable, lo: float, hi: float,
                 opts: QuadratureOptions = DEFAULT_OPTIONS) -> IntegralResult:
    """Integrate ``f`` over [lo, hi].

    Adaptive mode bisects panels until each satisfies
    ``|G_n - G_2n| <= max(abs_tol, rel_tol * |running value|) * width / (hi - lo)``;
    accepted panels contribute their G_2n value.
    """
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ArgumentError(f"need finite lo < hi, got [{lo}, {hi}]")
    n = opts.base_order
    if not opts.adaptive:
        g1, g2, evals = _panels_1d(f, np.array([lo]), np.array([hi]), n)
        return IntegralResult(float(g1[0]), float(abs(g1[0] - g2[0])), evals, "gauss_legendre")

    total_width = hi - lo
    acc_lo, acc_val, acc_err = [], [], []
    lo_k, hi_k = np.array([float(lo)]), np.array([float(hi)])
    evaluations = 0
    panels_used = 0
    depth = 0
    while True:
        g1, g2, evals = _panels_1d(f, lo_k, hi_k, n)
        evaluations += evals
        panels_used += lo_k.size
        err = np.abs(g1 - g2)
        running = _ordered_sum(acc_val) + _ordered_sum(g2)
        ok = err <= _tolerance(opts, running) * (hi_k - lo_k) / total_width
        acc_lo.extend(lo_k[ok]); acc_val.extend(g2[ok]); acc_err.extend(err[ok])
        if ok.all():
            break
        bad = ~ok
        if depth >= opts.max_depth or panels_used + 2 * bad.sum() > opts.max_panels:
            acc_lo.extend(lo_k[bad]); acc_val.extend(g2[bad]); acc_err.extend(err[bad])
            result = _finish_1d(acc_lo, acc_val, acc_err, evaluations)
            raise NonConvergence(
                f"1D adaptive quadrature stopped at depth {depth} "
                f"with estimated error {result.error_estimate:.3g}", result)
        mids = 0.5 * (lo_k[bad] + hi_k[bad])
        lo_k = np.column_stack([lo_k[bad], mids]).ravel()
        hi_k = np.column_stack([mids, hi_k[bad]]).ravel()
        depth += 1
    return _finish_1d(acc_lo, acc_val, acc_err, evaluations)


def _finish_1d(acc_lo, acc_val, acc_err, evaluations) -> IntegralResult:
    order = np.argsort(np.asarray(acc_lo), kind="stable")
    vals = np.asarray(acc_val)[order]
    errs = np.asarray(acc_err)[order]
    return IntegralResult(_ordered_sum(vals), _ordered_sum(errs), evaluations,
                          "adaptive_gauss_legendre")


# --------------------------------------------------------------------------
# Rectangles

def _tensor_nodes(rule: Rule1D):
    tx, ty = np.meshgrid(rule.nodes, rule.nodes, indexing="ij")
    w = np.outer(rule.weights, rule.weights)
    return tx.ravel(), ty.ravel(), w.ravel()


def _panels_2d(f, boxes: np.ndarray, n: int):
    """G_n and G_2n tensor rules on boxes (k, 4) = x_lo, x_hi, y_lo, y_hi."""
    hx = 0.5 * (boxes[:, 1] - boxes[:, 0])
    mx = 0.5 * (boxes[:, 1] + boxes[:, 0])
    hy = 0.5 * (boxes[:, 3] - boxes[:, 2])
    my = 0.5 * (boxes[:, 3] + boxes[:, 2])
    pts_x, pts_y, parts = [], [], []
    for r in (_rule(n), _rule(2 * n)):
        tx, ty, w = _tensor_nodes(r)
        pts_x.append((mx[:, None] + hx[:, None] * tx[None, :]).ravel())
        pts_y.append((my[:, None] + hy[:, None] * ty[None, :]).ravel())
        parts.append((tx.size, w))
    vals = _call(f, np.concatenate(pts_x), np.concatenate(pts_y))
    out, start = [], 0
    k = boxes.shape[0]
    for size, w in parts:
        v = vals[start:start + k * size].reshape(k, size)
        out.append(hx * hy * (v @ w))
        start += k * size
    return out[0], out[1], vals.size


def integrate_rectangle(f: Callable, r: Rectangle,
                        opts: QuadratureOptions = DEFAULT_OPTIONS) -> IntegralResult:
    """Tensor-product Gauss-Legendre over an axis-aligned rectangle.

    Adaptive mode splits failing panels into four quadrants, with the same
    per-panel acceptance test as :func:`integrate_1d` scaled by panel area.
    """
    n = opts.base_order
    box = np.array([[r.x_lo, r.x_hi, r.y_lo, r.y_hi]], dtype=float)
    if not opts.adaptive:
        g1, g2, evals = _panels_2d(f, box, n)
        return IntegralResult(float(g1[0]), float(abs(g1[0] - g2[0])), evals, "tensor_gauss_legendre")

    total_area = r.area
    acc_key, acc_val, acc_err = [], [], []
    evaluations = 0
    panels_used = 0
    depth = 0
    while True:
        g1, g2, evals = _panels_2d(f, box, n)
        evaluations += evals
        panels_used += box.shape[0]
        err = np.abs(g1 - g2)
        areas = (box[:, 1] - box[:, 0]) * (box[:, 3] - box[:, 2])
        running = _ordered_sum(acc_val) + _ordered_sum(g2)
        ok = err <= _tolerance(opts, running) * areas / total_area
        acc_key.extend(map(tuple, box[ok][:, [0, 2]])); acc_val.extend(g2[ok]); acc_err.extend(err[ok])
        if ok.all():
            break
        bad = box[~ok]
        if depth >= opts.max_depth or panels_used + 4 * bad.shape[0] > opts.max_panels:
            acc_key.extend(map(tuple, bad[:, [0, 2]])); acc_val.extend(g2[~ok]); acc_err.extend(err[~ok])
            result = _finish_2d(acc_key, acc_val, acc_err, evaluations, "adaptive_tensor_gauss_legendre")
            raise NonConvergence(
                f"rectangle quadrature stopped at depth {depth} "
                f"with estimated error {result.error_estimate:.3g}", result)
        xm = 0.5 * (bad[:, 0] + bad[:, 1])
        ym = 0.5 * (bad[:, 2] + bad[:, 3])
        children = np.stack([
            np.column_stack([bad[:, 0], xm, bad[:, 2], ym]),
            np.column_stack([bad[:, 0], xm, ym, bad[:, 3]]),
            np.column_stack([xm, bad[:, 1], bad[:, 2], ym]),
            np.column_stack([xm, bad[:, 1], ym, bad[:, 3]]),
        ], axis=1)
        box = children.reshape(-1, 4)
        depth += 1
    return _finish_2d(acc_key, acc_val, acc_err, evaluations, "adaptive_tensor_gauss_legendre")


def _finish_2d(keys, vals, errs, evaluations, method) -> IntegralResult:
    # lower-left corners; sort by x then y
    keys = np.asarray(keys, dtype=float).reshape(-1, 2)
    order = np.lexsort((keys[:, 1], keys[:, 0]))
    return IntegralResult(_ordered_sum(np.asarray(vals)[order]),
                          _ordered_sum(np.asarray(errs)[order]), evaluations, method)


# --------------------------------------------------------------------------
# Triangles

def _duffy_pass(f, t: Triangle, m: int, n: int):
    """Integrate over t split into an m x m grid of (s, t) sub-squares.

    Returns (G_n total, G_2n total, summed |G_n - G_2n|, evaluations).
    """
    (x0, y0), (x1, y1), (x2, y2) = t.v0, t.v1, t.v2
    jac_affine = abs(t.twice_signed_area)
    edges = np.arange(m + 1) / m
    lo_s, lo_t = np.meshgrid(edges[:-1], edges[:-1], indexing="ij")
    lo_s, lo_t = lo_s.ravel(), lo_t.ravel()
    h = 1.0 / m
    xs, ys, parts = [], [], []
    for r in (_rule(n), _rule(2 * n)):
        u, v, w = _tensor_nodes(r)
        s = lo_s[:, None] + 0.5 * h * (u[None, :] + 1.0)
        tt = lo_t[:, None] + 0.5 * h * (v[None, :] + 1.0)
        a = s
        b = tt * (1.0 - s)
        xs.append((x0 + a * (x1 - x0) + b * (x2 - x0)).ravel())
        ys.append((y0 + a * (y1 - y0) + b * (y2 - y0)).ravel())
        parts.append((w, (1.0 - s)))
    vals = _call(f, np.concatenate(xs), np.concatenate(ys))
    k = lo_s.size
    sums, start = [], 0
    for w, jac in parts:
        size = w.size
        v = vals[start:start + k * size].reshape(k, size) * jac
        sums.append(jac_affine * 0.25 * h * h * (v @ w))
        start += k * size
    g1, g2 = sums
    return _ordered_sum(g1), _ordered_sum(g2), _ordered_sum(np.abs(g1 - g2)), vals.size


def integrate_triangle(f: Callable, t: Triangle,
                       opts: QuadratureOptions = DEFAULT_OPTIONS) -> IntegralResult:
    """Integrate over a triangle via the Duffy map of the unit square.

    The triangle is the affine image of {a, b >= 0, a + b <= 1}; with
    ``a = s, b = t (1 - s)`` the reference triangle becomes [0, 1]^2 with
    Jacobian ``|J_affine| (1 - s)``. If the summed error estimate misses the
    tolerance, the square is re-split into 2x2, 4x4, ... equal sub-squares.
    """
    n = opts.base_order
    if not opts.adaptive:
        g1, g2, err, evals = _duffy_pass(f, t, 1, n)
        return IntegralResult(g1, err, evals, "duffy_gauss_legendre")
    evaluations = 0
    m, level = 1, 0
    while True:
        g1, g2, err, evals = _duffy_pass(f, t, m, n)
        evaluations += evals
        if err <= _tolerance(opts, g2):
            return IntegralResult(g2, err, evaluations, "adaptive_duffy_gauss_legendre")
        if level >= opts.max_depth or (2 * m) ** 2 > opts.max_panels:
            raise NonConvergence(
                f"triangle quadrature stopped at {m}x{m} sub-squares "
                f"with estimated error {err:.3g}",
                IntegralResult(g2, err, evaluations, "adaptive_duffy_gauss_legendre"))
        m *= 2
        level += 1


# --------------------------------------------------------------------------
# Diamonds

def diamond_triangles(L: float) -> tuple[Triangle, Triangle, Triangle, Triangle]:
    """The quadrant triangles, first quadrant first and counterclockwise, whose union is the diamond |x| + |y| <= L."""
    Diamond(L)
    o = (0.0, 0.0)
    return (
        Triangle(o, (L, 0.0), (0.0, L)),
        Triangle(o, (0.0, L), (-L, 0.0)),
        Triangle(o, (-L, 0.0), (0.0, -L)),
        Triangle(o, (0.0, -L), (L, 0.0)),
    )


def integrate_diamond_direct(f: Callable, L: float,
                             opts: QuadratureOptions = DEFAULT_OPTIONS) -> IntegralResult:
    """Sum of triangle integrals over the four quadrant pieces of the diamond."""
    parts, failure = [], None
    for tri in diamond_triangles(L):
        try:
            parts.append(integrate_triangle(f, tri, opts))
        except NonConvergence as exc:
            parts.append(exc.result)
            failure = failure or exc
    result = IntegralResult(
        sum(p.value for p in parts),
        sum(p.error_estimate for p in parts),
        sum(p.evaluations for p in parts),
        "diamond_direct",
    )
    if failure is not None:
        raise NonConvergence(str(failure), result)
    return result


def integrate_diamond_rotated(f: Callable, L: float,
                              opts: QuadratureOptions = DEFAULT_OPTIONS) -> IntegralResult:
    """Diamond integral in rotated coordinates.

    With ``x = (p + q)/2, y = (p - q)/2`` the diamond |x| + |y| <= L becomes
    the square [-L, L]^2 in (p, q), and dx dy = dp dq / 2.
    """
    Diamond(L)

    def g(p, q):
        return f(0.5 * (p + q), 0.5 * (p - q))

    try:
        res = integrate_rectangle(g, Rectangle.square(L), opts)
    except NonConvergence as exc:
        raise NonConvergence(str(exc), exc.result.scaled(0.5, "diamond_rotated")) from None
    return res.scaled(0.5, "diamond_rotated")
