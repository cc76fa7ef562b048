"""
Stieltjes oracle: orthonormal polynomials on the truncated q-lattice

Polynomials are stored as their values on the positive nodes q^0..q^K plus one
extra node q^(K+1) that carries zero quadrature weight; the extra node lets
D_q p_n be formed at q^K. Values at -q^k follow from parity.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional

import mpmath as mp
import numpy as np

from src.metrics.residuals import ResidualReport
from src.qcore.context import ModelContext, digits_for_budget, working_precision
from src.qcore.errors import ConfigurationError, InterpolationError, PrecisionExhaustedError
from src.weights.qfreud import lattice_weights

logger = logging.getLogger(__name__)


@dataclass
class LatticeTable:
    """Orthonormal p_0..p_N on the lattice with recurrence data"""
    ctx: ModelContext
    N: int
    nodes: np.ndarray  # q^0..q^(K+1)
    quad_weights: np.ndarray  # (1 - q) q^k w(q^k), k = 0..K
    values: List[np.ndarray] = field(default_factory=list)  # p_n at every node
    a_sq: List[Any] = field(default_factory=list)  # a_sq[0] = 0
    gamma: List[Any] = field(default_factory=list)
    delta: List[Any] = field(default_factory=list)

    @property
    def K(self) -> int:
        return len(self.quad_weights) - 1

    def positive(self, n: int) -> np.ndarray:
        """p_n(q^k) for k = 0..K"""
        return self.values[n][: self.K + 1]

    def negative(self, n: int) -> np.ndarray:
        """p_n(-q^k) for k = 0..K, exact by parity"""
        return self.positive(n) if n % 2 == 0 else -self.positive(n)

    def inner(self, f: np.ndarray, g: np.ndarray, same_parity: bool = True) -> mp.mpf:
        """q-integral of f g w for node arrays f, g of a common parity"""
        if not same_parity:
            return mp.mpf(0)
        return 2 * np.dot(self.quad_weights, f[: self.K + 1] * g[: self.K + 1])

    def a(self, n: int) -> mp.mpf:
        return mp.sqrt(self.a_sq[n]) if n > 0 else mp.mpf(0)


def _orthogonalize(table: LatticeTable, r: np.ndarray, degree: int) -> np.ndarray:
    # remove residual components along same-parity predecessors
    for j in range(degree - 2, -1, -2):
        projection = table.inner(r, table.values[j])
        r = r - projection * table.values[j]
    return r


@working_precision
def stieltjes(ctx: ModelContext, N: int, reorthogonalize: bool = True) -> LatticeTable:
    """Build p_0..p_N by the discretized Stieltjes procedure with b_n = 0.

    Args:
        ctx: Model parameters and working precision
        N: Highest polynomial degree
        reorthogonalize: Project each new p_n against all earlier ones once more

    Returns:
        LatticeTable with node values of p_n, a_n^2 and the normalization data
    """
    if N < 1:
        raise ConfigurationError(f"N must be positive, got {N}")
    if ctx.digits < digits_for_budget(N):
        logger.warning(
            "digits = %d is below the recommended %d for N = %d; expect lost accuracy",
            ctx.digits, digits_for_budget(N), N,
        )

    lw = lattice_weights(ctx, extra=1)
    nodes, w = lw.as_arrays()
    K = len(nodes) - 2
    quad = (1 - ctx.q_mp) * nodes[: K + 1] * w[: K + 1]
    table = LatticeTable(ctx=ctx, N=N, nodes=nodes, quad_weights=quad)

    m0 = 2 * sum(quad)
    gamma0 = 1 / mp.sqrt(m0)
    table.values.append(np.array([gamma0] * len(nodes), dtype=object))
    table.a_sq.append(mp.mpf(0))
    table.gamma.append(gamma0)
    table.delta.append(mp.mpf(0))

    prev = np.array([mp.mpf(0)] * len(nodes), dtype=object)
    for n in range(N):
        r = nodes * table.values[n] - table.a(n) * prev
        if reorthogonalize:
            r = _orthogonalize(table, r, n + 1)
        norm_sq = table.inner(r, r)
        if norm_sq <= 0:
            raise PrecisionExhaustedError(n + 1, norm_sq)
        a_next = mp.sqrt(norm_sq)
        prev = table.values[n]
        table.values.append(r / a_next)
        table.a_sq.append(norm_sq)

        table.gamma.append(table.gamma[n] / a_next)
        if n == 0:
            table.delta.append(mp.mpf(0))
        else:
            table.delta.append((table.delta[n] - table.a(n) * table.gamma[n - 1]) / a_next)

    logger.info("Stieltjes table built: N=%d, K=%d, digits=%d", N, K, ctx.digits)
    return table


@working_precision
def gram_residual(ctx: ModelContext, table: LatticeTable) -> ResidualReport:
    """|<p_i, p_j> - delta_ij| for 0 <= i <= j <= N"""
    report = ResidualReport(name="gram")
    for i in range(table.N + 1):
        for j in range(i, table.N + 1):
            if (i + j) % 2 == 1:
                # odd integrand: positive and negative nodes cancel exactly
                pos = np.dot(table.quad_weights, table.positive(i) * table.positive(j))
                value = pos + np.dot(table.quad_weights, table.negative(i) * table.negative(j))
            else:
                value = table.inner(table.values[i], table.values[j])
            report.add((i, j), value - (1 if i == j else 0))
    return report


@working_precision
def bn_residual(ctx: ModelContext, table: LatticeTable,
                weight_factor: Optional[Callable[[mp.mpf], Any]] = None) -> ResidualReport:
    """b_n = q-integral of x p_n^2 w, optionally with w replaced by w * weight_factor"""
    report = ResidualReport(name="bn", metadata={"perturbed": weight_factor is not None})
    x = table.nodes[: table.K + 1]
    if weight_factor is None:
        f_pos = f_neg = np.array([mp.mpf(1)] * len(x), dtype=object)
    else:
        f_pos = np.array([weight_factor(v) for v in x], dtype=object)
        f_neg = np.array([weight_factor(-v) for v in x], dtype=object)
    for n in range(table.N + 1):
        pos = np.dot(table.quad_weights, x * table.positive(n) ** 2 * f_pos)
        neg = np.dot(table.quad_weights, -x * table.negative(n) ** 2 * f_neg)
        report.add(n, pos + neg)
    return report


def recover_coefficients(table: LatticeTable, n: int):
    """Leading and subleading coefficients of p_n by interpolation on nodes.

    p_n(x) = x^(n mod 2) P(x^2) with deg P = n // 2. P is rebuilt in Newton
    form on the first n // 2 + 1 nodes in t = x^2; with divided differences
    d_0..d_m the top coefficients are d_m and d_(m-1) - d_m (t_0 + ... + t_(m-1)).
    """
    m = n // 2
    if m + 1 > table.K + 1:
        raise InterpolationError(f"degree {n} needs {m + 1} nodes, lattice has {table.K + 1}")
    x = table.nodes[: m + 1]
    t = x * x
    diffs = table.values[n][: m + 1] / x if n % 2 else table.values[n][: m + 1].copy()
    newton = [diffs[0]]
    for level in range(1, m + 1):
        diffs = (diffs[1:] - diffs[:-1]) / (t[level:] - t[:-level])
        newton.append(diffs[0])
    gamma = newton[m]
    delta = newton[m - 1] - gamma * sum(t[:m]) if m >= 1 else mp.mpf(0)
    return gamma, delta


@working_precision
def leading_coeff_check(ctx: ModelContext, table: LatticeTable) -> ResidualReport:
    """gamma_{n-1}/gamma_n = a_n and delta_n/gamma_n = -sum_{j<n} a_j^2 from interpolated coefficients"""
    if table.N + 1 > table.K:
        raise InterpolationError(f"N + 1 = {table.N + 1} exceeds the lattice cutoff K = {table.K}")
    report = ResidualReport(name="lemma31")
    recovered = [recover_coefficients(table, n) for n in range(table.N + 1)]
    partial = mp.mpf(0)
    for n in range(1, table.N + 1):
        gamma_prev, _ = recovered[n - 1]
        gamma_n, delta_n = recovered[n]
        a_n = table.a(n)
        report.add(("gamma", n), (gamma_prev / gamma_n - a_n) / a_n)
        report.add(("delta", n), delta_n / gamma_n + partial)
        partial += table.a_sq[n]
    report.metadata["construction_gamma_gap"] = max(
        abs(recovered[n][0] - table.gamma[n]) / abs(table.gamma[n]) for n in range(table.N + 1)
    )
    return report
