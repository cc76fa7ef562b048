"""
Continuum and parameter limits of the recurrence

- q -> 1 with x_n = a_n^2 / sqrt(1 - q^4) and c = -1 + a sqrt(1 - q^4):
  x_{n+1} + x_n + x_{n-1} = (2n + alpha - alpha (-1)^n) / (8 x_n) - a
- kappa -> 0 in the asymmetric q-P_V system with
  p = 1, r = c, s = kappa, t = 1/(c kappa), b = c kappa, rho = q^2n, a = kappa,
  w = q^(2n+alpha+1), which reduces to the asymmetric q-P_I rows.
"""
import logging
from typing import Any, Dict, Iterable, Sequence, Tuple

import mpmath as mp

from src.metrics.residuals import ResidualReport
from src.oracle.stieltjes import stieltjes
from src.qcore.context import ModelContext, to_fraction, to_mpf, working_precision
from src.qcore.errors import ConfigurationError, PoleError
from src.weights.qfreud import c_for_freud_parameter

logger = logging.getLogger(__name__)

DEFAULT_Q_FAMILY = ("0.9", "0.99", "0.999")


def dp1_residuals(ctx: ModelContext, a: Any, n_max: int) -> Dict[int, mp.mpf]:
    """r_n of the continuum equation for one q, from oracle coefficients"""
    table = stieltjes(ctx, n_max + 1)
    with ctx.precision():
        q = ctx.q_mp
        alpha = ctx.alpha_mp
        a = to_mpf(to_fraction(a))
        scale = mp.sqrt(1 - q ** 4)
        x = [value / scale for value in table.a_sq]
        residuals = {}
        for n in range(1, n_max + 1):
            sign = 1 if n % 2 == 0 else -1
            residuals[n] = x[n + 1] + x[n] + x[n - 1] - (2 * n + alpha - alpha * sign) / (8 * x[n]) + a
    return residuals


def dp1_limit_residual(base_ctx: ModelContext, a: Any, n_max: int,
                       q_values: Sequence[Any] = DEFAULT_Q_FAMILY) -> ResidualReport:
    """|r_n| over a family of q approaching 1.

    For a != 0 the a-dependent product contributes an O(a sqrt(1 - q^4)) correction
    that can cancel the O(1 - q) one inside the family, so r_n may change sign and
    |r_n| need not fall at every step. metadata["monotone"] records the per-n
    stepwise decrease; metadata["overall_decrease"] compares max_n |r_n| at the
    first and last q.
    """
    report = ResidualReport(name="dp1", metadata={"a": str(a), "q_values": [str(q) for q in q_values]})
    by_n: Dict[int, list] = {n: [] for n in range(1, n_max + 1)}
    for q in q_values:
        ctx = base_ctx.replace(q=to_fraction(q), c=c_for_freud_parameter(q, a, base_ctx.dps))
        logger.info("dP_I limit: q=%s, c=%s, K=%d", q, float(ctx.c), ctx.lattice_cutoff)
        for n, value in dp1_residuals(ctx, a, n_max).items():
            report.add((str(q), n), abs(value))
            by_n[n].append(abs(value))
    monotone = {n: all(later < earlier for earlier, later in zip(values, values[1:]))
                for n, values in by_n.items()}
    report.metadata["monotone"] = monotone
    report.metadata["all_monotone"] = all(monotone.values())
    maxima = [max(by_n[n][i] for n in by_n) for i in range(len(q_values))] if by_n else []
    report.metadata["max_by_q"] = maxima
    report.metadata["overall_decrease"] = len(maxima) > 1 and maxima[-1] < maxima[0]
    return report


def _pole_guard(value: mp.mpf, poles: Iterable[mp.mpf], tol: mp.mpf, label: str) -> None:
    for pole in poles:
        if abs(value - pole) < tol * max(1, abs(pole)):
            raise PoleError(f"{label} = {mp.nstr(value, 10)} coincides with a pole at {mp.nstr(pole, 10)}")


@working_precision
def qpv_limit_gap(ctx: ModelContext, n: int, u: Any, v_pair: Tuple[Any, Any],
                  kappa: Any) -> Tuple[mp.mpf, mp.mpf]:
    """|q-P_V right side - q-P_I right side| for the u and v equations.

    v_pair is (v_{n-1}, v_n); the left sides are shared by both systems, so the
    gaps are differences of right sides and are O(kappa).
    """
    kappa = to_mpf(kappa)
    if not 0 < kappa < mp.mpf("0.1"):
        raise ConfigurationError(f"kappa must lie in (0, 0.1), got {mp.nstr(kappa, 5)}")
    if ctx.c >= 0:
        raise ConfigurationError(f"the q-P_V specialization needs c < 0, got {ctx.c}")
    q = ctx.q_mp
    c = ctx.c_mp
    u = to_mpf(u)
    _, v = (to_mpf(value) for value in v_pair)

    p, r, s, t = mp.mpf(1), c, kappa, 1 / (c * kappa)
    b, a = c * kappa, kappa
    rho = q ** (2 * n)
    w = mp.power(q, 2 * n + ctx.alpha_mp + 1)
    tol = ctx.singular_threshold
    _pole_guard(u, (b * rho, rho / b), tol, "u")
    _pole_guard(v, (a * w, w / a), tol, "v")

    u_side = (u - 1 / p) * (u - 1 / r) * (u - 1 / s) * (u - 1 / t) / ((u - b * rho) * (u - rho / b))
    v_side = (v - p) * (v - r) * (v - s) * (v - t) / ((v - a * w) * (v - w / a))
    u_target = (1 - u) * (1 - c * u) / rho
    v_target = (1 - v) * (1 - v / c) / w
    return abs(u_side - u_target), abs(v_side - v_target)


@working_precision
def qpv_parameter_product(ctx: ModelContext, kappa: Any) -> mp.mpf:
    """p r s t under the specialization (identically 1)"""
    kappa = to_mpf(kappa)
    c = ctx.c_mp
    return mp.mpf(1) * c * kappa * (1 / (c * kappa))
