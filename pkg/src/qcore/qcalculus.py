"""
q-Calculus kernel: q-Pochhammer symbols, lattice q-integrals and D_q

Truncated infinite products stop at the first factor with |a| q^j < series_tol.
The omitted tail then satisfies |log prod| <= series_tol / ((1 - q)(1 - series_tol)),
so the relative error of qpochhammer_inf is at most QPOCHHAMMER_ERROR_FACTOR /
(1 - q) times series_tol.
"""
import logging
from typing import Any, Callable, Optional, Tuple

import mpmath as mp
import numpy as np

from src.qcore.context import ModelContext, lattice_size, to_mpf, working_precision
from src.qcore.errors import ConfigurationError, DifferenceAtZeroError, LatticeError

logger = logging.getLogger(__name__)

QPOCHHAMMER_ERROR_FACTOR = 2

LatticeFunction = Callable[[mp.mpf], Any]


def qpochhammer(a: Any, q: Any, n: int) -> Any:
    """Finite q-Pochhammer symbol (a; q)_n = prod_{j<n} (1 - a q^j).

    Works for any numeric type closed under * and -, so Fraction inputs give
    exact results and mpf inputs use the active precision.
    """
    if n < 0:
        raise ConfigurationError(f"(a; q)_n needs n >= 0, got {n}")
    result = 1
    power = 1
    for _ in range(n):
        result *= 1 - a * power
        power *= q
    return result


@working_precision
def qpochhammer_inf(a: Any, q: Any, ctx: ModelContext) -> mp.mpf:
    """Infinite q-Pochhammer symbol, truncated at |a| q^j < series_tol"""
    a = to_mpf(a)
    q = to_mpf(q)
    if abs(q) >= 1:
        raise ConfigurationError(f"(a; q)_inf needs |q| < 1, got {q}")

    tol = ctx.tol_mp
    result = mp.mpf(1)
    term = a
    while abs(term) >= tol:
        result *= 1 - term
        term *= q
    return result


def qpochhammer_inf_bound(q: Any, ctx: ModelContext) -> mp.mpf:
    """Relative truncation error bound for qpochhammer_inf"""
    with ctx.precision():
        return QPOCHHAMMER_ERROR_FACTOR * ctx.tol_mp / (1 - abs(to_mpf(q)))


def qnumber(k: int, q: Any) -> Any:
    """[k]_q = (1 - q^k) / (1 - q)"""
    return (1 - q ** k) / (1 - q)


def lattice_nodes(ctx: ModelContext, extra: int = 0) -> np.ndarray:
    """Positive lattice nodes q^k, k = 0..K+extra, as an object array of mpf"""
    with ctx.precision():
        q = ctx.q_mp
        nodes = np.empty(lattice_size(ctx) + extra, dtype=object)
        value = mp.mpf(1)
        for k in range(len(nodes)):
            nodes[k] = value
            value *= q
    return nodes


@working_precision
def qintegral_nodes(pos_values: np.ndarray, neg_values: np.ndarray, ctx: ModelContext) -> mp.mpf:
    """(1-q) sum_k [f(q^k) + f(-q^k)] q^k from precomputed node values"""
    nodes = lattice_nodes(ctx)
    if len(pos_values) != len(nodes) or len(neg_values) != len(nodes):
        raise LatticeError(
            f"expected {len(nodes)} node values, got {len(pos_values)} and {len(neg_values)}"
        )
    total = np.dot(np.asarray(pos_values, dtype=object) + np.asarray(neg_values, dtype=object), nodes)
    return (1 - ctx.q_mp) * total


def _evaluate(f: LatticeFunction, x: mp.mpf, index: int) -> mp.mpf:
    value = to_mpf(f(x))
    if not mp.isfinite(value):
        raise LatticeError(f"integrand is not finite at lattice node {mp.nstr(x, 10)}", index=index)
    return value


@working_precision
def qintegral_with_bound(f: LatticeFunction, ctx: ModelContext) -> Tuple[mp.mpf, mp.mpf]:
    """Lattice q-integral of f together with an estimate of the omitted tail.

    The tail estimate assumes |f| beyond q^K is bounded by its value at the
    last node pair: 2 q^(K+1) max(|f(q^K)|, |f(-q^K)|).
    """
    nodes = lattice_nodes(ctx)
    pos = np.array([_evaluate(f, x, k) for k, x in enumerate(nodes)], dtype=object)
    neg = np.array([_evaluate(f, -x, k) for k, x in enumerate(nodes)], dtype=object)
    value = qintegral_nodes(pos, neg, ctx)
    tail = 2 * nodes[-1] * ctx.q_mp * max(abs(pos[-1]), abs(neg[-1]))
    logger.debug("q-integral over %d nodes, tail estimate %s", len(nodes), mp.nstr(tail, 5))
    return value, tail


def qintegral(f: LatticeFunction, ctx: ModelContext) -> mp.mpf:
    """Jackson-type integral of f over the truncated lattice {+-q^k}"""
    value, _ = qintegral_with_bound(f, ctx)
    return value


@working_precision
def qdiff(f: LatticeFunction, x: Any, ctx: ModelContext,
          derivative_at_zero: Optional[Any] = None) -> mp.mpf:
    """q-difference operator D_q f(x) = (f(qx) - f(x)) / (x (q - 1)).

    At x = 0 the caller must supply the derivative (the coefficient of x for a
    polynomial input).
    """
    x = to_mpf(x)
    if x == 0:
        if derivative_at_zero is None:
            raise DifferenceAtZeroError("D_q f(0) needs an explicit derivative-at-zero value")
        return to_mpf(derivative_at_zero)
    q = ctx.q_mp
    return (to_mpf(f(q * x)) - to_mpf(f(x))) / (x * (q - 1))


def format_real(value: Any, digits: int) -> str:
    """Decimal rendering with `digits` significant digits, always in fixed notation"""
    if value == 0 or not mp.isfinite(value):
        return mp.nstr(value, digits)
    # mag is within one of log2|value|; 0.302 > log10(2)
    reach = int(abs(mp.mag(value)) * 0.302) + digits + 2
    return mp.nstr(value, digits, min_fixed=-reach, max_fixed=reach)
