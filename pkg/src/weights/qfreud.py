"""
q-Freud weights: point evaluation, Pearson equation, lattice values and moments

General family:
    w(x) = |x|^alpha (q^2 x^2; q^2)_inf (c q^2 x^2; q^2)_inf / (1 - q^4)^(alpha/4)
Quartic family (the c = -1 specialization):
    w(x) = |x|^alpha (q^4 x^4; q^4)_inf / (1 - q^4)^(alpha/4)
Both satisfy w(x/q) = (1 - x^2)(1 - c x^2) q^(-alpha) w(x) on the lattice.
"""
import functools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Tuple

import mpmath as mp
import numpy as np

from src.metrics.residuals import ResidualReport
from src.qcore.context import ModelContext, to_fraction, to_mpf, working_precision
from src.qcore.errors import ConfigurationError, LatticeError, WeightPoleError
from src.qcore.qcalculus import lattice_nodes, qpochhammer_inf

logger = logging.getLogger(__name__)


class WeightKind(str, Enum):
    QUARTIC = "quartic"
    GENERAL = "general"


@dataclass(frozen=True)
class LatticeWeights:
    """Weight values on the positive lattice nodes q^0..q^(K+extra)"""
    nodes: Tuple[Any, ...]
    values: Tuple[Any, ...]

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array(self.nodes, dtype=object), np.array(self.values, dtype=object)


def _normalizer(ctx: ModelContext) -> mp.mpf:
    q = ctx.q_mp
    return mp.power(1 - q ** 4, ctx.alpha_mp / 4)


@working_precision
def weight(ctx: ModelContext, x: Any, kind: WeightKind = WeightKind.GENERAL) -> mp.mpf:
    """Evaluate the weight at x in [-1, 1]"""
    x = to_mpf(x)
    if abs(x) > 1:
        raise LatticeError(f"the weight is defined on [-1, 1], got x = {mp.nstr(x, 10)}")
    if kind == WeightKind.QUARTIC and ctx.c != -1:
        raise ConfigurationError(f"the quartic weight is the c = -1 case, context has c = {ctx.c}")

    q = ctx.q_mp
    alpha = ctx.alpha_mp
    if x == 0:
        if ctx.alpha > 0:
            return mp.mpf(0)
        if ctx.alpha < 0:
            raise WeightPoleError(f"w(0) is a pole for alpha = {ctx.alpha}")
        prefactor = mp.mpf(1)
    else:
        prefactor = mp.power(abs(x), alpha)

    x2 = x * x
    if kind == WeightKind.QUARTIC:
        products = qpochhammer_inf(q ** 4 * x2 * x2, q ** 4, ctx)
    else:
        products = qpochhammer_inf(q ** 2 * x2, q ** 2, ctx) * \
            qpochhammer_inf(ctx.c_mp * q ** 2 * x2, q ** 2, ctx)
    return prefactor * products / _normalizer(ctx)


def lattice_point(ctx: ModelContext, k: int, sign: int = 1) -> mp.mpf:
    """The lattice node sign * q^k at working precision"""
    with ctx.precision():
        return sign * ctx.q_mp ** k


def lattice_index(ctx: ModelContext, x: Any) -> int:
    """Recover k from x = +-q^k, raising LatticeError off the lattice"""
    with ctx.precision():
        x = to_mpf(x)
        if x == 0 or abs(x) > 1:
            raise LatticeError(f"{mp.nstr(x, 10)} is not a lattice point")
        k = int(mp.nint(mp.log(abs(x)) / mp.log(ctx.q_mp)))
        if abs(abs(x) - ctx.q_mp ** k) > ctx.tolerance(ctx.digits) * abs(x):
            raise LatticeError(f"{mp.nstr(x, 10)} is not of the form +-q^k")
    return k


@working_precision
def pearson_residual(ctx: ModelContext, x: Any) -> mp.mpf:
    """w(x/q) - (1 - x^2)(1 - c x^2) q^(-alpha) w(x) at a lattice point x = +-q^k, k >= 1"""
    k = lattice_index(ctx, x)
    if k < 1:
        raise LatticeError(f"Pearson residual needs k >= 1 so that x/q stays in [-1, 1], got k = {k}")
    x = to_mpf(x)
    x2 = x * x
    lhs = weight(ctx, x / ctx.q_mp)
    rhs = (1 - x2) * (1 - ctx.c_mp * x2) / ctx.q_alpha * weight(ctx, x)
    return lhs - rhs


@working_precision
def pearson_report(ctx: ModelContext, points: int = 20) -> ResidualReport:
    """Relative Pearson residuals at exactly `points` nodes q^1, -q^1, q^2, -q^2, ..."""
    if points < 1:
        raise ConfigurationError(f"Pearson report needs at least one point, got {points}")
    report = ResidualReport(name="pearson", metadata={"points": points})
    for i in range(points):
        k, sign = i // 2 + 1, (1, -1)[i % 2]
        x = lattice_point(ctx, k, sign)
        report.add(sign * k, pearson_residual(ctx, x) / weight(ctx, x))
    logger.info("Pearson residuals at %d points: max %s", points, mp.nstr(report.max_abs, 5))
    return report


@functools.lru_cache(maxsize=16)
def _lattice_weights_cached(ctx: ModelContext, extra: int) -> LatticeWeights:
    with ctx.precision():
        q2 = ctx.q_mp ** 2
        c = ctx.c_mp
        tol = ctx.tol_mp
        nodes = lattice_nodes(ctx, extra=extra)

        # the infinite products at q^k are the tails prod_{j > k} (1 - q^2j)(1 - c q^2j),
        # truncated term by term exactly like qpochhammer_inf
        last = 1
        while q2 ** last >= tol or abs(c) * q2 ** last >= tol:
            last += 1
        tails = [mp.mpf(1)] * len(nodes)
        tail = mp.mpf(1)
        for j in range(last, 0, -1):
            if j < len(nodes):
                tails[j] = tail
            q2j = q2 ** j
            if q2j >= tol:
                tail *= 1 - q2j
            if abs(c) * q2j >= tol:
                tail *= 1 - c * q2j
        tails[0] = tail

        normalizer = _normalizer(ctx)
        values = [mp.power(x, ctx.alpha_mp) * tails[k] / normalizer for k, x in enumerate(nodes)]
    return LatticeWeights(nodes=tuple(nodes), values=tuple(values))


def lattice_weights(ctx: ModelContext, extra: int = 0) -> LatticeWeights:
    """w(q^k) for k = 0..K+extra from the product definition, one tail product per node"""
    return _lattice_weights_cached(ctx, extra)


@working_precision
def moment(ctx: ModelContext, k: int) -> mp.mpf:
    """m_k = q-integral of x^k w(x) by direct lattice summation"""
    if k < 0:
        raise ConfigurationError(f"moment order must be non-negative, got {k}")
    if k % 2 == 1:
        return mp.mpf(0)
    nodes, values = lattice_weights(ctx).as_arrays()
    powers = np.array([x ** (k + 1) for x in nodes], dtype=object)
    return 2 * (1 - ctx.q_mp) * np.dot(powers, values)


def c_for_freud_parameter(q: Any, a: Any, digits: int) -> Fraction:
    """c = -1 + a sqrt(1 - q^4), rounded to a rational with digits + 10 places"""
    with mp.workdps(digits + 20):
        qf = to_mpf(to_fraction(q))
        c = -1 + to_mpf(to_fraction(a)) * mp.sqrt(1 - qf ** 4)
        return to_fraction(mp.nstr(c, digits + 10, min_fixed=-digits - 20, max_fixed=digits + 20))


@working_precision
def freud_limit_gap(ctx: ModelContext, x: Any, a: Optional[Any] = None) -> mp.mpf:
    """|w((1-q^4)^(1/4) x) - |x|^alpha exp(-x^4 - 2 a x^2)|.

    `a` defaults to (c + 1)/sqrt(1 - q^4), the inverse of c_for_freud_parameter.
    """
    x = to_mpf(x)
    scale = mp.root(1 - ctx.q_mp ** 4, 4)
    a = (ctx.c_mp + 1) / (scale * scale) if a is None else to_mpf(to_fraction(a))
    target = mp.power(abs(x), ctx.alpha_mp) * mp.exp(-x ** 4 - 2 * a * x ** 2)
    return abs(weight(ctx, scale * x) - target)
