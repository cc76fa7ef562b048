"""
Tests for the fixed-point operator T and the bracketing solver
"""
import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from src.fixedpoint.operator import (
    BoundaryPolicy,
    RowPair,
    apply_T,
    f_n,
    fixed_point_defect,
    g_n,
    iterate,
    solve,
)
from src.painleve.recurrence import c0_closed_form
from src.painleve.sequence import CoefficientSequence, Method
from src.qcore.context import ModelContext
from src.qcore.errors import ConfigurationError, DiscriminantError, NonConvergenceError
from tests.conftest import PARAMETER_IDS, PARAMETER_SETS, make_ctx, oracle_table

WINDOW = 6


def test_root_falls_back_to_linear_limit(quartic_ctx):
    ctx = quartic_ctx
    with ctx.precision():
        limit = ctx.q_alpha * (1 - ctx.q_mp ** 6) / mp.mpf("0.7")
        assert abs(f_n(ctx, 3, "0.7", "1e-40") - limit) < ctx.tolerance(45)
        assert abs(f_n(ctx, 3, "0.7", "1e-20") - limit) < ctx.tolerance(18)
        assert f_n(ctx, 0, "0.5", "0.3") == 0
        assert g_n(ctx, 0, "0.5", "0.3") > 0


def test_discriminant_failures(quartic_ctx):
    with pytest.raises(DiscriminantError) as info:
        f_n(quartic_ctx, 3, 0, "1e-40")
    assert info.value.position == "xi_3"
    with pytest.raises(DiscriminantError):
        f_n(quartic_ctx, 3, "-0.5", "1e-40")
    with pytest.raises(DiscriminantError) as info:
        g_n(quartic_ctx, 3, "0.1", "-1")
    assert info.value.n == 3


def test_closed_form_reached_in_one_step():
    ctx = ModelContext(q="0.7", alpha="2", c="0", digits=60)
    closed = c0_closed_form(ctx, 20)
    first = iterate(ctx, 20, 1)
    seq, report = solve(ctx, 20)
    assert report.converged
    assert report.iterations == 2
    with ctx.precision():
        assert max(abs(a - b) for a, b in zip(first.y, closed.y)) < ctx.tolerance(55)
        assert max(abs(a - b) for a, b in zip(seq.y, closed.y)) < mp.mpf("1e-40")


def _rows(values):
    return [mp.mpf(v) / 1000 for v in values]


@settings(deadline=None, max_examples=40)
@given(
    c=st.sampled_from(["-1/2", "-1", "-5/2"]),
    base=st.lists(st.integers(0, 1000), min_size=2 * WINDOW, max_size=2 * WINDOW),
    bump=st.lists(st.integers(0, 500), min_size=2 * WINDOW, max_size=2 * WINDOW),
)
def test_T_reverses_order(c, base, bump):
    ctx = ModelContext(q="0.9", alpha="2", c=c, digits=50)
    with ctx.precision():
        low = RowPair(xi=_rows(base[:WINDOW]), eta=_rows(base[WINDOW:]), window=WINDOW)
        high_values = [a + b for a, b in zip(base, bump)]
        high = RowPair(xi=_rows(high_values[:WINDOW]), eta=_rows(high_values[WINDOW:]), window=WINDOW)
        image_low = apply_T(ctx, low)
        image_high = apply_T(ctx, high)
        slack = ctx.tolerance(40)
        for a, b in zip(image_low.xi + image_low.eta, image_high.xi + image_high.eta):
            assert a >= b - slack


def test_quartic_bracket_converges(quartic_ctx):
    seq, report = solve(quartic_ctx, 20, tol="1e-30")
    assert report.violations == []
    assert report.converged
    assert report.width < mp.mpf("1e-30")
    slack = quartic_ctx.tolerance(45)
    assert all(later <= earlier + slack for earlier, later in zip(report.widths, report.widths[1:]))
    assert seq.method == Method.FIXEDPOINT
    frame = report.to_frame()
    assert list(frame.columns) == ["iteration", "y_1", "width"]
    assert len(frame) == report.iterations


@pytest.mark.slow
@pytest.mark.parametrize("params", PARAMETER_SETS, ids=PARAMETER_IDS)
def test_bracket_sandwich(params):
    ctx = make_ctx(params, digits=60)
    _, report = solve(ctx, 30, max_iter=500, tol="1e-30")
    assert report.violations == []
    with ctx.precision():
        for a, b in zip(report.lower.eta[:16], report.upper.eta[:16]):
            assert a <= b + ctx.tolerance(55)


def test_oracle_is_a_fixed_point():
    table = oracle_table(("0.9", "5", "-1"))
    seq = CoefficientSequence.from_a_sq(table.ctx, table.a_sq, Method.ORACLE)
    assert fixed_point_defect(table.ctx, seq) < mp.mpf("1e-40")


def test_buffer_does_not_change_the_result(quartic_ctx):
    narrow, _ = solve(quartic_ctx, 16)
    wide, _ = solve(quartic_ctx, 16, buffer_extra=10)
    assert narrow.y == wide.y


def test_policies_agree_away_from_the_tail():
    ctx = make_ctx(("0.9", "5", "-1"), digits=60)
    shrink, _ = solve(ctx, 20, tol="1e-40")
    clamp, _ = solve(ctx, 20, tol="1e-40", policy=BoundaryPolicy.CLAMP, buffer_extra=20)
    with ctx.precision():
        assert max(abs(a - b) for a, b in zip(shrink.y, clamp.y)) < mp.mpf("1e-30")


def test_odd_iterates_decrease_towards_the_solution(quartic_ctx):
    first = iterate(quartic_ctx, 12, 1)
    third = iterate(quartic_ctx, 12, 3)
    solution, _ = solve(quartic_ctx, 12)
    for n in range(1, 13):
        assert first.y[n] >= third.y[n] - quartic_ctx.tolerance(40)
        assert third.y[n] >= solution.y[n] - quartic_ctx.tolerance(20)


def test_zero_rows_are_multiprecision_zeros():
    rows = RowPair.zeros(4)
    assert rows.xi == [0] * 4 and rows.eta == [0] * 4
    assert all(isinstance(value, mp.mpf) for value in rows.xi + rows.eta)


def test_operator_validation(quartic_ctx):
    with pytest.raises(ConfigurationError):
        RowPair(xi=[mp.mpf(0)], eta=[mp.mpf(0), mp.mpf(0)], window=2)
    with pytest.raises(ConfigurationError):
        apply_T(quartic_ctx, RowPair.zeros(1))
    with pytest.raises(ConfigurationError):
        iterate(quartic_ctx, 10, 0)
    with pytest.raises(ConfigurationError):
        solve(quartic_ctx, 0)
    with pytest.raises(NonConvergenceError) as info:
        solve(quartic_ctx, 20, max_iter=3, strict=True)
    assert info.value.report.iterations == 3
    assert info.value.sequence.N == 20
