"""
Structure relations: Fourier coefficients of D_q p_n and the hatted A_n, B_n

D_q p_n = B_n/(1-q) p_{n-1} + A_n/(1-q) p_{n-3} (+ lower order terms for odd n),
with A_n, B_n expressed through the a_j. Comparing the x^(n-1) and x^(n-3)
coefficients gives two identities between the a_j^2 that hold for every c:

    a_n B_n = 1 - q^n
    A_n a_n a_{n-1} a_{n-2} = q^(n-2)(1 - q^2) S_{n-2} - (1 - q^(n-2)) a_{n-1}^2

where S_m = a_1^2 + ... + a_m^2.
"""
import logging
from typing import Any, List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np

from src.metrics.residuals import ResidualReport
from src.oracle.stieltjes import LatticeTable
from src.qcore.context import ModelContext, working_precision
from src.qcore.errors import ConfigurationError

logger = logging.getLogger(__name__)


def _partial_sums(a_sq: Sequence[Any]) -> List[Any]:
    sums = [mp.mpf(0)]
    for value in a_sq[1:]:
        sums.append(sums[-1] + value)
    return sums


def _normalized(lhs: Any, rhs: Any) -> mp.mpf:
    return (lhs - rhs) / max(1, abs(rhs))


@working_precision
def hatted_coefficients(ctx: ModelContext, a_sq: Sequence[Any], n: int,
                        parity: Optional[str] = None) -> Tuple[mp.mpf, mp.mpf]:
    """(A_n, B_n) from a_1^2..a_{n+1}^2; parity overrides the parity of n"""
    if n < 2 or n + 1 >= len(a_sq):
        raise ConfigurationError(f"hatted coefficients need 2 <= n and a_{n + 1}^2, got n = {n}")
    parity = parity or ("even" if n % 2 == 0 else "odd")
    q = ctx.q_mp
    c = ctx.c_mp
    alpha = ctx.alpha_mp
    a = [mp.sqrt(v) for v in a_sq[: n + 2]]
    S = _partial_sums(a_sq[: n + 2])
    scale = mp.power(q, alpha + n - 3)

    A = -c * a[n] * a[n - 1] * a[n - 2] / scale
    if parity == "even":
        B = a[n] / (scale * q * q) * (c + 1 - c * S[n + 1] + c * q * q * S[n - 2])
    else:
        if n >= 3:
            A -= (1 - q ** -alpha) * a[n - 1] / (a[n] * a[n - 2])
        B = -c * a[n] / (scale * q * q) * (S[n + 1] - q * q * S[n - 2]) \
            + (1 - q ** -alpha) / a[n] + (c + 1) * a[n] / (scale * q * q)
    return A, B


def dq_node_values(table: LatticeTable, n: int) -> np.ndarray:
    """D_q p_n at q^0..q^K, using p_n(q^(k+1)) from the next node"""
    q = table.ctx.q_mp
    p = table.values[n]
    x = table.nodes[: table.K + 1]
    return (p[1: table.K + 2] - p[: table.K + 1]) / (x * (q - 1))


@working_precision
def fourier_dq_coeffs(ctx: ModelContext, table: LatticeTable, n: int) -> List[mp.mpf]:
    """a_{j,n} = q-integral of D_q p_n p_j w for j = 0..n-1"""
    if not 0 <= n <= table.N:
        raise ConfigurationError(f"n must lie in [0, {table.N}], got {n}")
    dq = dq_node_values(table, n)
    coeffs = []
    for j in range(n):
        # D_q p_n has parity n - 1
        coeffs.append(table.inner(dq, table.values[j], same_parity=(n - 1 - j) % 2 == 0))
    return coeffs


@working_precision
def structure_residuals(ctx: ModelContext, table: LatticeTable, n: int,
                        parity: Optional[str] = None) -> ResidualReport:
    """Quadrature a_{n-1,n}, a_{n-3,n} against B_n/(1-q), A_n/(1-q).

    For even n the coefficients a_{j,n} with j < n - 3 and n - j odd must vanish;
    they are reported under the "lower" key.
    """
    if not 3 <= n <= table.N - 1:
        raise ConfigurationError(f"structure relation needs 3 <= n <= {table.N - 1}, got {n}")
    report = ResidualReport(name="structure")
    coeffs = fourier_dq_coeffs(ctx, table, n)
    A, B = hatted_coefficients(ctx, table.a_sq, n, parity=parity)
    one_minus_q = 1 - ctx.q_mp
    report.add(("B", n), _normalized(coeffs[n - 1], B / one_minus_q))
    report.add(("A", n), _normalized(coeffs[n - 3], A / one_minus_q))
    if (parity or ("even" if n % 2 == 0 else "odd")) == "even":
        for j in range(n - 5, -1, -2):
            report.add(("lower", n, j), coeffs[j])
    return report


@working_precision
def intermediate_residuals(ctx: ModelContext, table: LatticeTable, n: int) -> ResidualReport:
    """Both sides of the x^(n-1) and x^(n-3) coefficient comparisons at index n"""
    if not 2 <= n <= table.N - 1:
        raise ConfigurationError(f"coefficient comparison needs 2 <= n <= {table.N - 1}, got {n}")
    report = ResidualReport(name="intermediate")
    q = ctx.q_mp
    a_sq = table.a_sq
    S = _partial_sums(a_sq[: n + 2])
    A, B = hatted_coefficients(ctx, a_sq, n)
    a = [mp.sqrt(v) for v in a_sq[: n + 1]]

    report.add(("x^(n-1)", n), _normalized(a[n] * B, 1 - q ** n))
    lhs = A * a[n] * a[n - 1] * a[n - 2]
    rhs = q ** (n - 2) * (1 - q * q) * S[n - 2] - (1 - q ** (n - 2)) * a_sq[n - 1]
    # both sides are O(a^6); compare relative to the product of the a_j^2
    scale = a_sq[n] * a_sq[n - 1] * (a_sq[n - 2] if n > 2 else 1)
    report.add(("x^(n-3)", n), (lhs - rhs) / max(scale, abs(rhs)))
    return report


def scan(func, ctx: ModelContext, table: LatticeTable, n_values) -> ResidualReport:
    """Merge per-n reports of structure_residuals or intermediate_residuals"""
    merged: Optional[ResidualReport] = None
    for n in n_values:
        report = func(ctx, table, n)
        merged = report if merged is None else merged.merge(report)
    return merged if merged is not None else ResidualReport(name=func.__name__)
