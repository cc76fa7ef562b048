"""
Tests for CoefficientSequence
"""
import mpmath as mp
import pytest

from src.painleve.sequence import CoefficientSequence, Method
from src.qcore.errors import InvalidSequenceError


def _sequence(ctx, method=Method.ORACLE):
    with ctx.precision():
        y = [mp.mpf(0), mp.mpf("0.5"), mp.mpf("0.25"), mp.mpf("0.75")]
    return CoefficientSequence(ctx=ctx, y=y, method=method)


def test_y0_must_vanish(quartic_ctx):
    with pytest.raises(InvalidSequenceError):
        CoefficientSequence(ctx=quartic_ctx, y=[mp.mpf(1), mp.mpf(1)], method=Method.FORWARD)
    with pytest.raises(InvalidSequenceError):
        CoefficientSequence(ctx=quartic_ctx, y=[], method=Method.FORWARD)


def test_positivity_only_for_stable_methods(quartic_ctx):
    y = [mp.mpf(0), mp.mpf("0.5"), mp.mpf("-0.1")]
    with pytest.raises(InvalidSequenceError):
        CoefficientSequence(ctx=quartic_ctx, y=y, method=Method.FIXEDPOINT)
    assert CoefficientSequence(ctx=quartic_ctx, y=y, method=Method.FORWARD).N == 2


def test_a_sq_round_trip(quartic_ctx):
    seq = _sequence(quartic_ctx)
    back = CoefficientSequence.from_a_sq(quartic_ctx, seq.a_sq, Method.ORACLE)
    with quartic_ctx.precision():
        assert seq.a_sq[0] == 0
        assert abs(seq.a_sq[3] - mp.mpf("0.75") * quartic_ctx.q_mp ** 2) < quartic_ctx.tolerance(50)
        for a, b in zip(seq.y, back.y):
            assert abs(a - b) < quartic_ctx.tolerance(50)


def test_truncate_and_perturb(quartic_ctx):
    seq = _sequence(quartic_ctx, Method.FORWARD)
    seq.breakdown_index = 3
    short = seq.truncated(2)
    assert short.N == 2
    assert short.breakdown_index is None
    assert short.entry_digits == [quartic_ctx.digits] * 3

    bumped = seq.perturbed(2, mp.mpf("1e-8"))
    assert bumped.metadata["perturbed_index"] == 2
    assert bumped.y[2] > seq.y[2]
    assert bumped.y[1] == seq.y[1]


def test_frame_layout(quartic_ctx):
    frame = _sequence(quartic_ctx).to_frame()
    assert list(frame.columns) == ["n", "y_n", "a_n_sq", "log10_abs_y_n", "method"]
    assert frame.loc[0, "log10_abs_y_n"] == ""
    assert frame.loc[1, "y_n"] == "0.5"
    assert set(frame["method"]) == {"oracle"}
    assert abs(float(frame.loc[2, "log10_abs_y_n"]) - float(mp.log10(mp.mpf("0.25")))) < 1e-12
