"""
Tests for the numeric singularity-confinement probes
"""
import mpmath as mp
import pytest

from src.painleve.confinement import confined_value, confinement_probe, critical_y_before
from src.painleve.sequence import CoefficientSequence, Method
from src.qcore.context import ModelContext
from src.qcore.errors import ConfigurationError
from tests.conftest import oracle_table


@pytest.mark.parametrize("n, parity", [(6, "even"), (7, "odd")])
@pytest.mark.parametrize("epsilon", ["1e-10", "1e-20"])
def test_quartic_singularity_is_confined(n, parity, epsilon):
    table = oracle_table(("0.9", "5", "-1"))
    seq = CoefficientSequence.from_a_sq(table.ctx, table.a_sq, Method.ORACLE)
    ctx = table.ctx
    trace = confinement_probe(ctx, n, parity, seq.y[n - 1], epsilon)
    assert trace.orders_match()
    with ctx.precision():
        assert trace.relative_error < 1000 * mp.mpf(epsilon)
        # y_{n+4} remembers y_{n-1}
        q, alpha = ctx.q_mp, ctx.alpha_mp
        if parity == "even":
            expected = mp.power(q, alpha + 2) * (1 - q ** n) / (1 - mp.power(q, n + alpha + 3)) * seq.y[n - 1]
        else:
            expected = mp.power(q, 2 - alpha) * (1 - mp.power(q, n + alpha)) / (1 - q ** (n + 3)) * seq.y[n - 1]
        assert abs(trace.predicted_y4 - expected) < ctx.tolerance(80) * abs(expected)


@pytest.mark.parametrize("n, parity", [(6, "even"), (7, "odd")])
def test_worst_case_chain_clears_after_eight_steps(n, parity):
    ctx = ModelContext(q="0.9", alpha="2", c="-1/2", digits=100)
    y_before = critical_y_before(ctx, n)
    with ctx.precision():
        assert abs(confined_value(ctx, n, y_before)) < ctx.tolerance(90)
    trace = confinement_probe(ctx, n, parity, y_before, "1e-10", steps=8)
    assert trace.steps == 8
    assert trace.orders_match()
    with ctx.precision():
        assert trace.relative_error_y8 < 1000 * mp.mpf("1e-10")
        assert mp.mpf("1e-3") < abs(trace.y_values[8]) < 1000


def test_probe_validation(quartic_ctx):
    with pytest.raises(ConfigurationError):
        confinement_probe(quartic_ctx, 7, "even", "0.5", "1e-10")
    with pytest.raises(ConfigurationError):
        confinement_probe(quartic_ctx, 6, "even", "0.5", "1e-3")
    with pytest.raises(ConfigurationError):
        confinement_probe(quartic_ctx, 6, "even", "0.5", "1e-10", steps=5)
    with pytest.raises(ConfigurationError):
        critical_y_before(ModelContext(q="0.7", alpha="0", c="0", digits=30), 4)
