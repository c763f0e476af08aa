import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diamondquad.errors import ArgumentError, DegenerateDomain, NonConvergence, NonFiniteIntegrand
from diamondquad.quad import (
    QuadratureOptions, Rectangle, Triangle, Diamond, diamond_triangles,
    gauss_legendre_rule, integrate_1d, integrate_diamond_direct, integrate_diamond_rotated,
    integrate_rectangle, integrate_triangle,
)
from diamondquad.specfun import bessel_i0

FIXED = QuadratureOptions(adaptive=False)


# --- rules -------------------------------------------------------------------

def test_rule_one():
    r = gauss_legendre_rule(1)
    assert list(r.nodes) == [0.0] and list(r.weights) == [2.0]


def test_rule_two():
    r = gauss_legendre_rule(2)
    np.testing.assert_allclose(r.nodes, [-math.sqrt(1 / 3), math.sqrt(1 / 3)], rtol=1e-15)
    np.testing.assert_allclose(r.weights, [1.0, 1.0], rtol=1e-15)


def test_rule_three():
    r = gauss_legendre_rule(3)
    np.testing.assert_allclose(r.nodes, [-math.sqrt(0.6), 0.0, math.sqrt(0.6)], rtol=1e-15, atol=0)
    np.testing.assert_allclose(r.weights, [5 / 9, 8 / 9, 5 / 9], rtol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 33, 64, 100, 128])
def test_rule_matches_numpy(n):
    r = gauss_legendre_rule(n)
    t, w = np.polynomial.legendre.leggauss(n)
    np.testing.assert_allclose(r.nodes, t, atol=1e-14)
    # numpy's endpoint weights lose ~1e-11 relative at n=128; see the mpmath check
    np.testing.assert_allclose(r.weights, w, rtol=1e-10)


@pytest.mark.parametrize("n", [64, 128])
def test_rule_endpoint_weights_mpmath(n):
    mp = pytest.importorskip("mpmath")
    r = gauss_legendre_rule(n)
    with mp.workdps(40):
        for i in (0, 1, n // 2):
            root = mp.findroot(lambda z: mp.legendre(n, z), r.nodes[i])
            dp = mp.diff(lambda z: mp.legendre(n, z), root)
            w = 2 / ((1 - root ** 2) * dp ** 2)
            assert abs(r.nodes[i] - float(root)) <= 1e-15
            assert abs(r.weights[i] - float(w)) <= 1e-12 * float(w)


@pytest.mark.parametrize("n", [1, 2, 5, 32, 64, 128])
def test_rule_invariants(n):
    r = gauss_legendre_rule(n)
    assert abs(r.weights.sum() - 2.0) <= 1e-14
    assert np.all(np.abs(r.nodes + r.nodes[::-1]) <= 1e-14)
    assert np.all(r.weights > 0) and np.all(np.abs(r.nodes) < 1)


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32])
def test_rule_exactness(n):
    r = gauss_legendre_rule(n)
    for k in range(2 * n):
        exact = (1 + (-1) ** k) / (k + 1)
        got = float(np.sum(r.weights * r.nodes ** k))
        if exact:
            assert abs(got - exact) <= 1e-12 * exact
        else:
            assert abs(got) <= 1e-15


@pytest.mark.parametrize("n", [0, 129, -1, 2.5])
def test_rule_range(n):
    with pytest.raises(ArgumentError):
        gauss_legendre_rule(n)


# --- 1D ----------------------------------------------------------------------

def test_1d_constant():
    res = integrate_1d(lambda t: np.ones_like(t), 0.0, 3.0)
    assert res.value == pytest.approx(3.0, rel=1e-15)


def test_1d_quadratic():
    res = integrate_1d(lambda t: t * t, -1.0, 1.0)
    assert abs(res.value - 2 / 3) <= 1e-14 * 2 / 3


def test_1d_bessel():
    res = integrate_1d(lambda t: np.exp(np.cos(t)), -math.pi, math.pi)
    ref = 2 * math.pi * bessel_i0(1.0)
    assert abs(res.value - ref) <= 1e-12 * ref


def test_1d_eval_count():
    calls = []

    def f(t):
        calls.append(t.size)
        return np.exp(3 * t)

    res = integrate_1d(f, 0.0, 2.0, QuadratureOptions(base_order=3))
    assert len(calls) > 1
    assert res.evaluations == sum(calls)
    assert res.value == pytest.approx((math.exp(6) - 1) / 3, rel=1e-10)


def test_1d_non_adaptive():
    res = integrate_1d(lambda t: t ** 3 + 1, 0.0, 2.0, QuadratureOptions(base_order=2, adaptive=False))
    assert res.value == pytest.approx(6.0, rel=1e-14)
    assert res.evaluations == 2 + 4
    assert res.method == "gauss_legendre"


def test_1d_nonconvergence_reports_best():
    opts = QuadratureOptions(abs_tol=1e-30, rel_tol=1e-30, max_panels=64)
    with pytest.raises(NonConvergence) as info:
        integrate_1d(lambda t: np.exp(t), 0.0, 1.0, opts)
    assert info.value.result.value == pytest.approx(math.e - 1, rel=1e-14)


def test_1d_max_depth():
    opts = QuadratureOptions(abs_tol=1e-14, rel_tol=1e-14, max_depth=2, base_order=2)
    with pytest.raises(NonConvergence):
        integrate_1d(lambda t: np.sqrt(t), 0.0, 1.0, opts)


def test_1d_bad_interval():
    with pytest.raises(ArgumentError):
        integrate_1d(np.sin, 1.0, 1.0)


def test_non_finite_integrand():
    with pytest.raises(NonFiniteIntegrand):
        integrate_1d(lambda t: 1.0 / t * 0 + np.nan, 0.0, 1.0)


# --- rectangles --------------------------------------------------------------

def test_rect_area():
    res = integrate_rectangle(lambda x, y: 1.0, Rectangle.square(2.0))
    assert res.value == pytest.approx(16.0, rel=1e-15)


def test_rect_x_squared():
    res = integrate_rectangle(lambda x, y: x * x, Rectangle.square(1.0))
    assert abs(res.value - 4 / 3) <= 1e-13 * 4 / 3


def test_rect_bessel_product():
    f = lambda x, y: np.exp(np.cos(2 * x)) * np.exp(np.cos(2 * y))
    res = integrate_rectangle(f, Rectangle.square(math.pi))
    ref = (2 * math.pi * bessel_i0(1.0)) ** 2
    assert abs(res.value - ref) <= 1e-11 * ref


def test_rect_eval_count():
    n = [0]

    def f(x, y):
        n[0] += x.size
        return np.exp(x * y)

    res = integrate_rectangle(f, Rectangle(0.0, 3.0, -1.0, 2.0), QuadratureOptions(base_order=8))
    assert res.evaluations == n[0]


def test_rect_invalid():
    with pytest.raises(DegenerateDomain):
        Rectangle(1.0, 0.0, 0.0, 1.0)


def test_rect_linearity():
    f = lambda x, y: np.cos(x) * np.exp(y)
    g = lambda x, y: x ** 3 - y
    a, b = 2.5, -0.75
    r = Rectangle(-1.0, 2.0, 0.0, 1.5)
    rf, rg = integrate_rectangle(f, r, FIXED), integrate_rectangle(g, r, FIXED)
    rh = integrate_rectangle(lambda x, y: a * f(x, y) + b * g(x, y), r, FIXED)
    bound = abs(a) * rf.error_estimate + abs(b) * rg.error_estimate + rh.error_estimate
    assert abs(rh.value - (a * rf.value + b * rg.value)) <= max(bound, 1e-14 * abs(rh.value))


@pytest.mark.parametrize("L", [0.5, 1.0, math.pi])
def test_rect_additivity(L):
    f = lambda x, y: np.exp(np.sin(x) + 0.5 * y)
    whole = integrate_rectangle(f, Rectangle.square(L), FIXED)
    parts = [integrate_rectangle(f, Rectangle(*xs, *ys), FIXED)
             for xs in ((-L, 0.0), (0.0, L)) for ys in ((-L, 0.0), (0.0, L))]
    bound = whole.error_estimate + sum(p.error_estimate for p in parts)
    assert abs(whole.value - sum(p.value for p in parts)) <= max(bound, 1e-14)


def test_determinism():
    f = lambda x, y: np.exp(np.cos(3 * x) * np.sin(2 * y))
    opts = QuadratureOptions(base_order=6)
    a = integrate_rectangle(f, Rectangle.square(2.0), opts)
    b = integrate_rectangle(f, Rectangle.square(2.0), opts)
    assert a == b
    assert integrate_diamond_direct(f, 2.0, opts) == integrate_diamond_direct(f, 2.0, opts)


def test_rect_nonconvergence():
    opts = QuadratureOptions(abs_tol=1e-30, rel_tol=1e-30, base_order=4, max_panels=100)
    with pytest.raises(NonConvergence) as info:
        integrate_rectangle(lambda x, y: np.exp(x + y), Rectangle.square(1.0), opts)
    assert info.value.result.value == pytest.approx((math.e - 1 / math.e) ** 2, rel=1e-12)


# --- triangles and diamonds --------------------------------------------------

UNIT = Triangle((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))


def test_triangle_area():
    res = integrate_triangle(lambda x, y: 1.0, UNIT)
    assert abs(res.value - 0.5) <= 1e-14


def test_triangle_x():
    res = integrate_triangle(lambda x, y: x, UNIT)
    assert abs(res.value - 1 / 6) <= 1e-13 / 6


def test_triangle_c1():
    L = math.pi
    res = integrate_triangle(lambda x, y: 1.0, Triangle((0.0, 0.0), (L, 0.0), (0.0, L)))
    assert res.value == pytest.approx(L * L / 2, rel=1e-14)


def test_triangle_orientation_independent():
    f = lambda x, y: np.exp(x - 2 * y)
    a = integrate_triangle(f, Triangle((0.0, 0.0), (1.0, 0.2), (0.3, 1.0)))
    b = integrate_triangle(f, Triangle((0.0, 0.0), (0.3, 1.0), (1.0, 0.2)))
    assert a.value == pytest.approx(b.value, rel=1e-13)


def test_triangle_degenerate():
    with pytest.raises(DegenerateDomain):
        Triangle((0.0, 0.0), (1.0, 1.0), (2.0, 2.0))


def test_triangle_subdivides():
    # a peaked integrand needs the square split
    f = lambda x, y: 1.0 / (0.01 + (x - 0.3) ** 2 + (y - 0.3) ** 2)
    res = integrate_triangle(f, UNIT, QuadratureOptions(base_order=4, abs_tol=1e-8, rel_tol=1e-8))
    fine = integrate_triangle(f, UNIT, QuadratureOptions(base_order=32, abs_tol=1e-13, rel_tol=1e-13))
    assert res.evaluations > 4 * 4 + 8 * 8
    assert res.value == pytest.approx(fine.value, rel=1e-7)


def test_diamond_triangles_match_proof():
    L = 2.0
    tris = diamond_triangles(L)
    assert [t.v1 for t in tris] == [(L, 0.0), (0.0, L), (-L, 0.0), (0.0, -L)]
    assert sum(t.area for t in tris) == Diamond(L).area


@pytest.mark.parametrize("method", [integrate_diamond_direct, integrate_diamond_rotated])
def test_diamond_area(method):
    assert method(lambda x, y: 1.0, 1.0).value == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("method", [integrate_diamond_direct, integrate_diamond_rotated])
def test_diamond_x_squared(method):
    # int_{-1}^{1} x^2 * 2 (1 - |x|) dx = 1/3
    assert abs(method(lambda x, y: x * x, 1.0).value - 1 / 3) <= 1e-10 / 3


def test_diamond_bessel_vs_half_square():
    f = lambda x, y: np.exp(np.cos(2 * x) + np.cos(2 * y))
    d = integrate_diamond_direct(f, math.pi)
    s = integrate_rectangle(f, Rectangle.square(math.pi))
    assert abs(d.value - 0.5 * s.value) <= 1e-9 * d.value
    assert d.value == pytest.approx(math.pi ** 2 * 2 * bessel_i0(1.0) ** 2, rel=1e-11)


def test_diamond_rotated_cos():
    f = lambda x, y: np.cos(x) * np.cos(y)
    a = integrate_diamond_direct(f, 1.0)
    b = integrate_diamond_rotated(f, 1.0)
    assert abs(a.value - b.value) <= 1e-10 * abs(a.value)


def test_diamond_bad_L():
    with pytest.raises(ArgumentError):
        integrate_diamond_direct(lambda x, y: 1.0, 0.0)
    with pytest.raises(ArgumentError):
        integrate_diamond_rotated(lambda x, y: 1.0, -1.0)


AGREEMENT_CORPUS = [
    lambda x, y: 1.0 + 0 * x,
    lambda x, y: x * x,
    lambda x, y: np.cos(x) * np.cos(y),
    lambda x, y: np.exp(x + y),
    lambda x, y: x * y + 1,
    lambda x, y: np.sin(x) ** 2,
    lambda x, y: x ** 4 + y ** 2,
    lambda x, y: np.exp(-x * x - y * y),
    lambda x, y: np.cos(3 * x - y) * np.exp(0.3 * y),
    lambda x, y: 1.0 / (2.0 + np.sin(x * y)),
]


@pytest.mark.parametrize("i", range(len(AGREEMENT_CORPUS)))
@pytest.mark.parametrize("L", [1.0, math.pi])
def test_method_agreement(i, L):
    f = AGREEMENT_CORPUS[i]
    a = integrate_diamond_direct(f, L)
    b = integrate_diamond_rotated(f, L)
    assert abs(a.value - b.value) <= max(1e-9, 3 * (a.error_estimate + b.error_estimate))


def test_options_validation():
    with pytest.raises(ArgumentError):
        QuadratureOptions(abs_tol=0.0)
    with pytest.raises(ArgumentError):
        QuadratureOptions(base_order=1)
    with pytest.raises(ArgumentError):
        QuadratureOptions(base_order=65)
    QuadratureOptions(base_order=1, adaptive=False)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 3))
def test_diamond_polynomial_exact(a, b, L):
    # a x^2 + b y^2 + 1 over the diamond: (a + b) L^4 / 3 + 2 L^2
    f = lambda x, y: a * x * x + b * y * y + 1.0
    exact = (a + b) * L ** 4 / 3 + 2 * L * L
    for method in (integrate_diamond_direct, integrate_diamond_rotated):
        assert method(f, L).value == pytest.approx(exact, rel=1e-12, abs=1e-12)
