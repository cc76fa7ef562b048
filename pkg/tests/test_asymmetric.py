"""
Tests for the (u, v) row form and the asymptotic gaps
"""
import mpmath as mp
import pytest

from src.fixedpoint.operator import solve
from src.painleve.asymmetric import UVVariant, asymptote_gap, from_uv, to_uv, uv_residual
from src.painleve.recurrence import c0_closed_form
from src.painleve.sequence import CoefficientSequence, Method
from src.qcore.context import ModelContext
from src.qcore.errors import VariantMismatchError
from tests.conftest import make_ctx, oracle_table


def _oracle(params, N=30, digits=100):
    table = oracle_table(params, N, digits)
    return CoefficientSequence.from_a_sq(table.ctx, table.a_sq, Method.ORACLE)


def test_round_trip_general():
    seq = _oracle(("0.5", "2", "-1/3"))
    rows = to_uv(seq, UVVariant.GENERAL)
    assert len(rows.u) == 16
    assert len(rows.v) == len(rows.u) - 1
    back = from_uv(rows)
    with seq.ctx.precision():
        assert max(abs(a - b) for a, b in zip(seq.y, back.y)) < mp.mpf("1e-90")
    assert back.method == Method.ORACLE


def test_quartic_rows_on_oracle():
    seq = _oracle(("0.9", "5", "-1"))
    rows = to_uv(seq, UVVariant.QUARTIC)
    with seq.ctx.precision():
        assert rows.v[0] == -seq.y[1]
    report = uv_residual(seq.ctx, rows)
    assert report.max_abs < mp.mpf("1e-40")
    assert report.lookup(("u", 1)) is not None
    assert report.lookup(("v", 0)) is not None


def test_general_rows_on_oracle():
    seq = _oracle(("0.7", "1", "-1/2"), N=20, digits=80)
    report = uv_residual(seq.ctx, to_uv(seq, UVVariant.GENERAL))
    assert report.max_abs < mp.mpf("1e-40")


def test_variant_mismatch():
    seq = _oracle(("0.5", "2", "-1/3"))
    with pytest.raises(VariantMismatchError):
        to_uv(seq, UVVariant.QUARTIC)
    closed = c0_closed_form(ModelContext(q="0.7", alpha="2", c="0", digits=40), 10)
    with pytest.raises(VariantMismatchError):
        to_uv(closed, UVVariant.GENERAL)


def test_gaps_without_quartic_part():
    ctx = ModelContext(q="0.7", alpha="2", c="0", digits=40)
    seq = c0_closed_form(ctx, 60)
    report = asymptote_gap(ctx, seq)
    with ctx.precision():
        for n in (1, 2, 17, 40):
            expected = mp.power(ctx.q_mp, n + ctx.alpha_mp)
            assert abs(report.lookup(n) - expected) < ctx.tolerance(35)
    assert report.metadata["onset"] == 38


def test_no_onset_on_short_sequence():
    seq = _oracle(("0.9", "5", "-1"), N=30, digits=100)
    assert asymptote_gap(seq.ctx, seq).metadata["onset"] is None


@pytest.mark.slow
@pytest.mark.parametrize("c", ["-1", "-5/2", "-1/3"])
def test_coefficients_settle_on_their_limits(c):
    ctx = make_ctx(("0.9", "5", c), digits=40)
    seq, _ = solve(ctx, 200)
    report = asymptote_gap(ctx, seq)
    assert report.metadata["onset"] is not None
    assert report.metadata["onset"] < 200
