"""
Tests for q-Pochhammer symbols, lattice q-integrals and D_q
"""
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from src.qcore.context import ModelContext
from src.qcore.errors import ConfigurationError, DifferenceAtZeroError, LatticeError
from src.qcore.qcalculus import (
    format_real,
    qdiff,
    qintegral,
    qintegral_with_bound,
    qnumber,
    qpochhammer,
    qpochhammer_inf,
    qpochhammer_inf_bound,
)


@pytest.fixture
def half_ctx():
    return ModelContext(q="1/2", alpha="0", c="-1", digits=40)


def test_qpochhammer_examples():
    assert qpochhammer(Fraction(1, 3), Fraction(1, 2), 0) == 1
    assert qpochhammer(0, Fraction(1, 2), 7) == 1
    assert qpochhammer(Fraction(1, 2), Fraction(1, 2), 2) == Fraction(3, 8)


def test_qpochhammer_rejects_negative_length():
    with pytest.raises(ConfigurationError):
        qpochhammer(Fraction(1, 2), Fraction(1, 2), -1)


@given(
    a=st.fractions(min_value=-2, max_value=2, max_denominator=30),
    q=st.fractions(min_value=0, max_value=1, max_denominator=30),
    n=st.integers(min_value=0, max_value=10),
)
def test_qpochhammer_recursion(a, q, n):
    assert qpochhammer(a, q, n + 1) == qpochhammer(a, q, n) * (1 - a * q ** n)


def test_qpochhammer_inf_trivial_and_bounds():
    ctx = ModelContext(q="0.9", alpha="5", digits=50)
    with ctx.precision():
        assert qpochhammer_inf(0, "0.5", ctx) == 1
        q4 = ctx.q_mp ** 4
        value = qpochhammer_inf(q4, q4, ctx)
    assert 0 < value < 1
    with pytest.raises(ConfigurationError):
        qpochhammer_inf("0.5", 1, ctx)


def test_qpochhammer_inf_matches_long_product():
    ctx = ModelContext(q="0.5", alpha="0", digits=50)
    a = Fraction(3, 7)
    value = qpochhammer_inf(a, Fraction(1, 2), ctx)
    with ctx.precision():
        brute = qpochhammer(mp.mpf(3) / 7, mp.mpf("0.5"), 2000)
        assert abs(value - brute) < ctx.tolerance(ctx.digits - 5) * abs(brute)
        assert qpochhammer_inf_bound("0.5", ctx) < ctx.tolerance(ctx.digits - 1)


def test_qpochhammer_inf_product_identity():
    ctx = ModelContext(q="0.9", alpha="5", digits=50)
    with ctx.precision():
        a = mp.mpf("0.3")
        q = ctx.q_mp
        left = qpochhammer_inf(a, q, ctx) * qpochhammer_inf(-a, q, ctx)
        right = qpochhammer_inf(a * a, q * q, ctx)
        assert abs(left - right) < ctx.tolerance(ctx.digits - 5)


def test_qintegral_examples(half_ctx):
    ctx = half_ctx
    with ctx.precision():
        tol = ctx.tolerance(ctx.digits - 1)
        assert abs(qintegral(lambda x: 1, ctx) - 2) < tol
        assert qintegral(lambda x: x, ctx) == 0
        assert abs(qintegral(lambda x: x * x, ctx) - mp.mpf(8) / 7) < tol


def test_qintegral_tail_estimate(half_ctx):
    value, tail = qintegral_with_bound(lambda x: x * x, half_ctx)
    assert 0 <= tail < half_ctx.tolerance(half_ctx.digits)
    assert value > 0


def test_qintegral_rejects_non_finite(half_ctx):
    with pytest.raises(LatticeError):
        qintegral(lambda x: mp.inf, half_ctx)


@settings(max_examples=25, deadline=None)
@given(
    f=st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=5),
    g=st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=5),
    lam=st.fractions(min_value=-3, max_value=3, max_denominator=20),
)
def test_qintegral_is_linear(f, g, lam):
    ctx = ModelContext(q="1/2", alpha="0", digits=30)
    with ctx.precision():
        lam_mp = mp.mpf(lam.numerator) / lam.denominator

        def poly(coeffs):
            return lambda x: sum(c * x ** k for k, c in enumerate(coeffs))

        combined = lambda x: poly(f)(x) + lam_mp * poly(g)(x)
        gap = qintegral(combined, ctx) - qintegral(poly(f), ctx) - lam_mp * qintegral(poly(g), ctx)
        assert abs(gap) < 10 * ctx.tol_mp


def test_qdiff_examples():
    ctx = ModelContext(q="0.9", alpha="0", digits=40)
    with ctx.precision():
        q = ctx.q_mp
        tol = ctx.tolerance(ctx.digits)
        assert qdiff(lambda x: 7, "0.3", ctx) == 0
        assert abs(qdiff(lambda x: x * x, 1, ctx) - (q + 1)) < tol
        x = mp.mpf("0.3")
        assert abs(qdiff(lambda t: t ** 5, x, ctx) - qnumber(5, q) * x ** 4) < tol


def test_qdiff_at_zero_needs_rule():
    ctx = ModelContext(q="0.9", alpha="0", digits=40)
    with pytest.raises(DifferenceAtZeroError):
        qdiff(lambda x: x ** 3 + 2 * x, 0, ctx)
    assert qdiff(lambda x: x ** 3 + 2 * x, 0, ctx, derivative_at_zero=2) == 2


@pytest.mark.parametrize("power", [1, 3, 5])
def test_integral_of_difference_telescopes(power):
    # the lattice sum of D_q x^m telescopes to f(1) - f(-1) = 2 for odd m
    ctx = ModelContext(q="1/2", alpha="0", digits=40)
    with ctx.precision():
        value = qintegral(lambda x: qdiff(lambda t: t ** power, x, ctx), ctx)
        assert abs(value - 2) < ctx.tolerance(ctx.digits - 2)


def test_format_real_is_plain_decimal():
    with mp.workdps(30):
        assert format_real(mp.mpf(1) / 8, 10) == "0.125"
        assert "e" not in format_real(mp.mpf(10) ** -40, 5)


def test_format_real_stays_fixed_at_extreme_exponents():
    with mp.workdps(30):
        tiny = format_real(mp.mpf(10) ** -1500, 5)
        assert "e" not in tiny
        assert tiny.startswith("0.000")
        huge = format_real(mp.mpf(3) * mp.mpf(10) ** 1200, 5)
        assert "e" not in huge
        assert len(huge.split(".")[0]) == 1201
        assert format_real(mp.mpf(0), 5) == "0.0"
