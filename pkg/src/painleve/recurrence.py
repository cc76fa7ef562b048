"""
q-Painleve I recurrence for y_n = a_n^2 q^(1-n)

    q^(n-alpha) (-c y_n y_{n+1} + q^alpha)(-c y_n y_{n-1} + q^alpha) = R_n(y_n)

with R_n(y) = (q^alpha - y)(q^alpha - c y) q^(-alpha) for even n and
(1 - y)(1 - c y) for odd n. The equation is linear in y_{n+1}, which gives the
forward step. c = 0 collapses the left side to q^(n+alpha) and has closed forms.
"""
import logging
from typing import Any, List, Optional, Tuple

import mpmath as mp

from src.metrics.residuals import ResidualReport
from src.painleve.sequence import CoefficientSequence, Method
from src.qcore.context import ModelContext, to_mpf, working_precision
from src.qcore.errors import (
    ConfigurationError,
    CrossCheckError,
    SeriesDivergenceError,
    SingularityError,
)
from src.qcore.qcalculus import qpochhammer_inf
from src.weights.qfreud import moment

logger = logging.getLogger(__name__)

MAX_SERIES_TERMS = 10 ** 6


def rhs(ctx: ModelContext, n: int, y: Any) -> mp.mpf:
    """Parity-dependent right side R_n(y)"""
    c = ctx.c_mp
    if n % 2 == 0:
        q_alpha = ctx.q_alpha
        return (q_alpha - y) * (q_alpha - c * y) / q_alpha
    return (1 - y) * (1 - c * y)


def critical_factor(ctx: ModelContext, y_cur: Any, y_other: Any) -> mp.mpf:
    """-c y_n y_m + q^alpha"""
    return -ctx.c_mp * y_cur * y_other + ctx.q_alpha


def asymptotic_targets(ctx: ModelContext) -> Tuple[mp.mpf, mp.mpf]:
    """Limits of (y_2n, y_2n+1); (q^alpha/c, 1/c) for exploratory c >= 1"""
    if ctx.c >= 1:
        return ctx.q_alpha / ctx.c_mp, 1 / ctx.c_mp
    return ctx.q_alpha, mp.mpf(1)


def _series(ctx: ModelContext, exponent: mp.mpf) -> mp.mpf:
    # sum_k q^(k e) / ((q^2; q^2)_k (c q^2; q^2)_k)
    q = ctx.q_mp
    c = ctx.c_mp
    q2 = q * q
    ratio = mp.power(q, exponent)
    tol = ctx.tol_mp
    total = mp.mpf(0)
    term = mp.mpf(1)
    q2k = mp.mpf(1)
    for k in range(MAX_SERIES_TERMS):
        total += term
        if abs(term) < tol * abs(total):
            return total
        q2k *= q2
        denominator = (1 - q2k) * (1 - c * q2k)
        if denominator == 0:
            raise SeriesDivergenceError(f"series denominator vanishes at k = {k + 1} for c = {ctx.c}", k + 1)
        term = term * ratio / denominator
    raise SeriesDivergenceError(f"series did not decay within {MAX_SERIES_TERMS} terms", MAX_SERIES_TERMS)


@working_precision
def y1_closed(ctx: ModelContext, cross_check: bool = True) -> mp.mpf:
    """y_1 = a_1^2 = m_2/m_0 from q-series, cross-checked against lattice moments"""
    q = ctx.q_mp
    alpha = ctx.alpha_mp
    if ctx.c == -1:
        q4 = q ** 4
        value = qpochhammer_inf(q ** (alpha + 1), q4, ctx) / qpochhammer_inf(q ** (alpha + 3), q4, ctx)
    else:
        value = _series(ctx, alpha + 3) / _series(ctx, alpha + 1)

    if cross_check:
        ratio = moment(ctx, 2) / moment(ctx, 0)
        if abs(value - ratio) > ctx.tolerance(ctx.digits - 10) * abs(ratio):
            raise CrossCheckError(
                f"y_1 series {mp.nstr(value, 20)} disagrees with m_2/m_0 {mp.nstr(ratio, 20)}"
            )
    return value


@working_precision
def forward_step(ctx: ModelContext, n: int, y_prev: Any, y_cur: Any) -> mp.mpf:
    """Solve the recurrence at index n for y_{n+1}"""
    if n < 1:
        raise ConfigurationError(f"forward step needs n >= 1, got {n}")
    if ctx.c == 0:
        raise ConfigurationError("c = 0 has closed-form coefficients; use c0_closed_form")
    y_prev = to_mpf(y_prev)
    y_cur = to_mpf(y_cur)
    threshold = ctx.singular_threshold
    if abs(y_cur) < threshold:
        raise SingularityError(n, "y_n", y_cur)
    factor = critical_factor(ctx, y_cur, y_prev)
    if abs(factor) < threshold:
        raise SingularityError(n, "-c y_n y_{n-1} + q^alpha", factor)
    q_alpha = ctx.q_alpha
    shift = mp.power(ctx.q_mp, ctx.alpha_mp - n)
    return (q_alpha - rhs(ctx, n, y_cur) * shift / factor) / (ctx.c_mp * y_cur)


@working_precision
def c0_closed_form(ctx: ModelContext, N: int, convention: str = "derived") -> CoefficientSequence:
    """Exact c = 0 sequence.

    "derived": y_2m = q^alpha (1 - q^2m), y_2m+1 = 1 - q^(2m+1+alpha).
    "printed": even terms q^alpha - q^(n + 2 alpha) instead; agrees with
    "derived" only at alpha = 0. y_0 = 0 in both.
    """
    if ctx.c != 0:
        raise ConfigurationError(f"closed forms hold for c = 0, context has c = {ctx.c}")
    if convention not in ("derived", "printed"):
        raise ConfigurationError(f"unknown c = 0 convention {convention!r}")
    q = ctx.q_mp
    q_alpha = ctx.q_alpha
    y: List[mp.mpf] = [mp.mpf(0)]
    for n in range(1, N + 1):
        qn = q ** n
        if n % 2 == 1:
            y.append(1 - qn * q_alpha)
        elif convention == "derived":
            y.append(q_alpha * (1 - qn))
        else:
            y.append(q_alpha - qn * q_alpha * q_alpha)
    return CoefficientSequence(ctx=ctx, y=y, method=Method.CLOSED_FORM,
                               metadata={"convention": convention})


@working_precision
def forward_run(ctx: ModelContext, N: int, y1: Optional[Any] = None,
                strict: bool = True) -> CoefficientSequence:
    """Iterate forward_step from y_0 = 0, y_1 = y1_closed.

    Args:
        ctx: Model parameters and working precision
        N: Highest index to compute
        y1: Starting value overriding the closed-form y_1
        strict: With False a SingularityError ends the run early and is recorded
            in singular_index instead of propagating

    Returns:
        CoefficientSequence y_0..y_N, shorter when truncated at a singular step
    """
    if ctx.c == 0:
        return c0_closed_form(ctx, N)
    y = [mp.mpf(0), to_mpf(y1) if y1 is not None else y1_closed(ctx)]
    breakdown = None if y[1] > 0 else 1
    singular = None
    for n in range(1, N):
        try:
            y.append(forward_step(ctx, n, y[n - 1], y[n]))
        except SingularityError as exc:
            if strict:
                raise
            singular = exc.index
            logger.warning("forward run stopped at n=%d: %s", exc.index, exc)
            break
        if breakdown is None and y[-1] <= 0:
            breakdown = n + 1
            logger.warning("forward run lost positivity at n=%d", breakdown)
    return CoefficientSequence(ctx=ctx, y=y[: N + 1], method=Method.FORWARD,
                               breakdown_index=breakdown, singular_index=singular)


@working_precision
def painleve_residual(ctx: ModelContext, seq: CoefficientSequence) -> ResidualReport:
    """(LHS - RHS)/max(1, |RHS|) of the recurrence for 1 <= n <= N-1"""
    if len(seq.y) < 3:
        raise ConfigurationError("painleve residual needs y_0..y_2 at least")
    report = ResidualReport(name="painleve", metadata={"method": seq.method.value})
    shift_base = ctx.q_mp
    for n in range(1, seq.N):
        y_prev, y_cur, y_next = seq.y[n - 1], seq.y[n], seq.y[n + 1]
        lhs = mp.power(shift_base, n - ctx.alpha_mp) * critical_factor(ctx, y_cur, y_next) \
            * critical_factor(ctx, y_cur, y_prev)
        right = rhs(ctx, n, y_cur)
        report.add(n, (lhs - right) / max(1, abs(right)))
    return report


@working_precision
def recurrence_residual(ctx: ModelContext, seq: CoefficientSequence) -> ResidualReport:
    """Relative residual of the unfactored a_n^2 recurrence pair"""
    report = ResidualReport(name="recurrence", metadata={"method": seq.method.value})
    q = ctx.q_mp
    c = ctx.c_mp
    alpha = ctx.alpha_mp
    a_sq = seq.a_sq
    for n in range(1, seq.N):
        if n % 2 == 0:
            middle = mp.power(q, -alpha - n + 1) * a_sq[n]
            right = (1 - q ** n) * mp.power(q, alpha + n - 1)
        else:
            middle = q ** (1 - n) * a_sq[n]
            right = (mp.power(q, -alpha) - q ** n) * mp.power(q, alpha + n - 1)
        cubic = c * mp.power(q, -2 * n - alpha + 3) * a_sq[n + 1] * a_sq[n] * a_sq[n - 1]
        left = a_sq[n] * (c + 1 - c * (a_sq[n + 1] + middle + q * q * a_sq[n - 1] - cubic))
        report.add(n, (left - right) / abs(right))
    return report


@working_precision
def critical_factor_floor(ctx: ModelContext, seq: CoefficientSequence) -> Tuple[mp.mpf, int]:
    """min over n of |-c y_n y_{n-1} + q^alpha| and where it occurs"""
    best = None
    where = 1
    for n in range(1, len(seq.y)):
        value = abs(critical_factor(ctx, seq.y[n], seq.y[n - 1]))
        if best is None or value < best:
            best, where = value, n
    return best, where


def agreement_index(seq: CoefficientSequence, reference: CoefficientSequence,
                    digits: int) -> Optional[int]:
    """First n where the relative disagreement exceeds 10^(-digits), None if never"""
    dps = max(seq.ctx.dps, reference.ctx.dps)
    with mp.workdps(dps):
        tol = mp.power(10, -digits)
        for n, (a, b) in enumerate(zip(seq.y, reference.y)):
            if abs(a - b) > tol * max(abs(b), mp.mpf(10) ** -dps):
                return n
    if len(seq.y) < len(reference.y):
        return len(seq.y)
    return None
