"""
Tests for the continuum dP_I limit and the q-P_V specialization
"""
from fractions import Fraction

import mpmath as mp
import pytest

from src.painleve.limits import dp1_limit_residual, qpv_limit_gap, qpv_parameter_product
from src.qcore.context import ModelContext
from src.qcore.errors import ConfigurationError, PoleError


@pytest.fixture
def half_ctx():
    return ModelContext(q="0.9", alpha="2", c="-1/2", digits=50)


@pytest.mark.parametrize("u, v, n", [
    ("0.3", "-0.25", 3),
    ("0.5", "0.2", 4),
    ("0.7", "-0.4", 2),
    ("0.25", "0.35", 5),
    ("0.45", "-0.3", 6),
])
def test_gaps_are_linear_in_kappa(half_ctx, u, v, n):
    for kappa in (Fraction(1, 100), Fraction(1, 1000), Fraction(1, 10 ** 4),
                  Fraction(1, 10 ** 5), Fraction(1, 10 ** 6)):
        gaps = qpv_limit_gap(half_ctx, n, u, (v, v), kappa)
        halved = qpv_limit_gap(half_ctx, n, u, (v, v), kappa / 2)
        for gap, half in zip(gaps, halved):
            assert 1.8 <= float(gap / half) <= 2.2


def test_gaps_vanish_at_unit_u(half_ctx):
    gap_u, _ = qpv_limit_gap(half_ctx, 3, 1, ("0.2", "0.2"), "1e-3")
    assert gap_u < mp.mpf("1e-40")


def test_parameter_product_is_one(half_ctx):
    with half_ctx.precision():
        assert abs(qpv_parameter_product(half_ctx, "1e-4") - 1) < half_ctx.tolerance(45)


def test_qpv_validation(half_ctx):
    with pytest.raises(ConfigurationError):
        qpv_limit_gap(half_ctx, 3, "0.3", ("0.2", "0.2"), "0.5")
    with pytest.raises(ConfigurationError):
        qpv_limit_gap(ModelContext(q="0.9", alpha="2", c="0", digits=30), 3, "0.3", ("0.2", "0.2"), "1e-3")
    kappa = Fraction(1, 1000)
    pole = Fraction(-1, 2) * kappa * Fraction(9, 10) ** 6
    with pytest.raises(PoleError):
        qpv_limit_gap(half_ctx, 3, pole, ("0.2", "0.2"), kappa)


@pytest.mark.slow
@pytest.mark.parametrize("a, alpha", [("0", "0"), ("0", "2"), ("-1", "0")])
def test_continuum_limit_is_approached_monotonically(a, alpha):
    base = ModelContext(q="0.9", alpha=alpha, c="-1", digits=30)
    report = dp1_limit_residual(base, a, 10)
    assert report.metadata["all_monotone"], report.metadata["monotone"]
    assert report.metadata["overall_decrease"]
    assert len(report.residuals) == 30


@pytest.mark.slow
@pytest.mark.parametrize("alpha", ["0", "2"])
def test_continuum_limit_with_positive_a_decreases_overall(alpha):
    # the O(a sqrt(1 - q^4)) and O(1 - q) corrections cancel near q = 0.99 for a = 1,
    # so |r_n| dips there before settling
    base = ModelContext(q="0.9", alpha=alpha, c="-1", digits=30)
    report = dp1_limit_residual(base, "1", 10)
    first, middle, last = report.metadata["max_by_q"]
    assert report.metadata["overall_decrease"]
    assert last < first
    assert middle < first
    assert len(report.residuals) == 30
