"""
Asymmetric two-row form of the recurrence and asymptotic gaps

With u_m = y_2m q^(-alpha) and v_m = c y_2m+1 the recurrence splits into

    q^2m (1 - u_m v_m)(1 - u_m v_{m-1})       = (1 - u_m)(1 - c u_m)
    q^(2m+1+alpha) (1 - u_m v_m)(1 - u_{m+1} v_m) = (1 - v_m)(1 - v_m / c)

The quartic variant is the c = -1 case written with v_m = -y_2m+1 and right
sides 1 - u_m^2, 1 - v_m^2.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import mpmath as mp

from src.metrics.residuals import ResidualMetrics, ResidualReport
from src.painleve.recurrence import asymptotic_targets
from src.painleve.sequence import CoefficientSequence, Method
from src.qcore.context import ModelContext, working_precision
from src.qcore.errors import VariantMismatchError

logger = logging.getLogger(__name__)

ASYMPTOTE_THRESHOLD = mp.mpf("1e-6")


class UVVariant(str, Enum):
    QUARTIC = "quartic"
    GENERAL = "general"


@dataclass
class UVRows:
    """(u, v) rows; len(v) is len(u) or len(u) - 1"""
    u: List[Any]
    v: List[Any]
    variant: UVVariant
    ctx: ModelContext
    source: Method = Method.ORACLE
    metadata: Dict[str, Any] = field(default_factory=dict)


def _check_variant(ctx: ModelContext, variant: UVVariant) -> None:
    if variant == UVVariant.QUARTIC and ctx.c != -1:
        raise VariantMismatchError(f"quartic (u, v) form needs c = -1, context has c = {ctx.c}")
    if variant == UVVariant.GENERAL and ctx.c == 0:
        raise VariantMismatchError("general (u, v) form divides by c; c = 0 is excluded")


def _v_scale(ctx: ModelContext, variant: UVVariant) -> mp.mpf:
    return -mp.mpf(1) if variant == UVVariant.QUARTIC else ctx.c_mp


def to_uv(seq: CoefficientSequence, variant: UVVariant) -> UVRows:
    ctx = seq.ctx
    _check_variant(ctx, variant)
    with ctx.precision():
        q_alpha = ctx.q_alpha
        scale = _v_scale(ctx, variant)
        u = [seq.y[n] / q_alpha for n in range(0, len(seq.y), 2)]
        v = [scale * seq.y[n] for n in range(1, len(seq.y), 2)]
    return UVRows(u=u, v=v, variant=variant, ctx=ctx, source=seq.method)


def from_uv(rows: UVRows) -> CoefficientSequence:
    ctx = rows.ctx
    with ctx.precision():
        q_alpha = ctx.q_alpha
        scale = _v_scale(ctx, rows.variant)
        y = []
        for m, u in enumerate(rows.u):
            y.append(q_alpha * u)
            if m < len(rows.v):
                y.append(rows.v[m] / scale)
    y[0] = mp.mpf(0)
    return CoefficientSequence(ctx=ctx, y=y, method=rows.source)


@working_precision
def uv_residual(ctx: ModelContext, rows: UVRows) -> ResidualReport:
    """Residuals of both row equations, normalized by max(1, |RHS|)"""
    _check_variant(ctx, rows.variant)
    report = ResidualReport(name="uv", metadata={"variant": rows.variant.value})
    q = ctx.q_mp
    c = ctx.c_mp
    alpha = ctx.alpha_mp
    u, v = rows.u, rows.v
    for m in range(1, len(u)):
        if m >= len(v):
            break
        lhs = q ** (2 * m) * (1 - u[m] * v[m]) * (1 - u[m] * v[m - 1])
        right = (1 - u[m]) * (1 - c * u[m])
        report.add(("u", m), (lhs - right) / max(1, abs(right)))
    for m in range(len(v)):
        if m + 1 >= len(u):
            break
        lhs = mp.power(q, 2 * m + 1 + alpha) * (1 - u[m] * v[m]) * (1 - u[m + 1] * v[m])
        right = (1 - v[m]) * (1 - v[m] / c)
        report.add(("v", m), (lhs - right) / max(1, abs(right)))
    return report


@working_precision
def asymptote_gap(ctx: ModelContext, seq: CoefficientSequence,
                  threshold: Optional[Any] = None) -> ResidualReport:
    """|y_2n - even target| and |y_2n+1 - odd target| for n >= 1.

    metadata["onset"] is the smallest n0 beyond which both parity gaps are
    strictly decreasing and below threshold; None when no such index exists.
    """
    threshold = ASYMPTOTE_THRESHOLD if threshold is None else mp.mpf(threshold)
    even_target, odd_target = asymptotic_targets(ctx)
    report = ResidualReport(name="asymptotics", metadata={
        "even_target": even_target, "odd_target": odd_target, "threshold": threshold,
    })
    gaps = {0: [], 1: []}
    for n in range(1, len(seq.y)):
        gap = abs(seq.y[n] - (even_target if n % 2 == 0 else odd_target))
        report.add(n, gap)
        gaps[n % 2].append((n, gap))

    onset = 1
    for parity, items in gaps.items():
        if not items:
            continue
        values = [g for _, g in items]
        start = ResidualMetrics.monotone_from(values)
        while start < len(values) and values[start] >= threshold:
            start += 1
        if start >= len(values):
            onset = None
            break
        onset = max(onset, items[start][0])
    report.metadata["onset"] = onset
    if onset is None:
        logger.warning("no asymptotic onset below %s within n <= %d", mp.nstr(threshold, 3), seq.N)
    else:
        logger.info("asymptotic regime from n0 = %d", onset)
    return report
