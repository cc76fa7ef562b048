"""
Fixed-point operator T and monotone bracketing

Writing u_n = y_2n and v_n = y_2n+1, each recurrence equation is a quadratic in
one unknown given its two neighbours in the other row. f_n and g_n select the
positive roots:

    u_n = f_n(x, y),  x = -c q^2n (v_n + v_{n-1}) + c + 1,  y = c^2 q^2n v_n v_{n-1} - c
    v_n = g_n(x, y),  x = -c q^(2n+1) (u_n + u_{n+1}) + c + 1,
                      y = c^2 q^(2n+1-alpha) u_n u_{n+1} - c

T maps a double row (xi, eta) to (f_n(...eta...), g_n(...xi...)). T reverses
termwise order, so from (0, 0) the even iterates increase, the odd iterates
decrease, and every even iterate lies below every odd one.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional, Tuple

import mpmath as mp
import pandas as pd

from src.painleve.recurrence import asymptotic_targets
from src.painleve.sequence import CoefficientSequence, Method
from src.qcore.context import ModelContext, to_mpf, working_precision
from src.qcore.errors import ConfigurationError, DiscriminantError, NonConvergenceError
from src.qcore.qcalculus import format_real

logger = logging.getLogger(__name__)

REGION_MARGIN = Fraction(1, 10)


class BoundaryPolicy(str, Enum):
    SHRINK = "shrink"  # drop one trailing index per application
    CLAMP = "clamp"  # pad beyond the window with the asymptotic limits


@dataclass
class RowPair:
    """Double row (xi, eta) with window bookkeeping"""
    xi: List[Any]
    eta: List[Any]
    window: int
    iteration_count: int = 0
    out_of_region: List[Tuple[str, int]] = field(default_factory=list)

    def __post_init__(self):
        if len(self.xi) != self.window or len(self.eta) != self.window:
            raise ConfigurationError(
                f"rows must both have window length {self.window}, got {len(self.xi)} and {len(self.eta)}"
            )

    @classmethod
    def zeros(cls, window: int) -> "RowPair":
        return cls(xi=[mp.mpf(0)] * window, eta=[mp.mpf(0)] * window, window=window)

    @classmethod
    def from_sequence(cls, seq: CoefficientSequence) -> "RowPair":
        """(y_0, y_2, ...) and (y_1, y_3, ...) truncated to a common length"""
        xi = seq.y[0::2]
        eta = seq.y[1::2]
        window = min(len(xi), len(eta))
        return cls(xi=list(xi[:window]), eta=list(eta[:window]), window=window)

    def to_sequence(self, ctx: ModelContext, N: int, **kwargs) -> CoefficientSequence:
        y = []
        for m in range(self.window):
            y.extend([self.xi[m], self.eta[m]])
        return CoefficientSequence(ctx=ctx, y=[mp.mpf(0)] + y[1: N + 1], method=Method.FIXEDPOINT, **kwargs)


@dataclass
class BracketReport:
    """Diagnostics of the bracketing iteration on the retained window"""
    lower: Optional[RowPair] = None  # latest even iterate
    upper: Optional[RowPair] = None  # latest odd iterate
    widths: List[Any] = field(default_factory=list)
    violations: List[Tuple[int, str, str, int]] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    y1_trace: List[Any] = field(default_factory=list)
    out_of_region: List[Tuple[int, str, int]] = field(default_factory=list)

    @property
    def width(self) -> Any:
        return self.widths[-1] if self.widths else mp.inf

    def to_frame(self, digits: int = 30) -> pd.DataFrame:
        """Per-iteration width and y_1 approximation"""
        rows = []
        for k, (width, y1) in enumerate(zip(self.widths, self.y1_trace), start=1):
            rows.append({
                "iteration": k,
                "y_1": format_real(y1, digits),
                "width": format_real(width, 10),
            })
        return pd.DataFrame(rows, columns=["iteration", "y_1", "width"])


def _positive_root(threshold: mp.mpf, n: int, b: mp.mpf, x: mp.mpf, y: mp.mpf, label: str) -> mp.mpf:
    # positive root of y t^2 + x t - b = 0
    if abs(y) < threshold:
        if abs(x) < threshold:
            raise DiscriminantError("both coefficients vanish", n, x, y, label)
        if x < 0:
            raise DiscriminantError("no bounded positive root as y -> 0", n, x, y, label)
        return b / x
    discriminant = x * x + 4 * b * y
    if discriminant < 0:
        raise DiscriminantError("negative discriminant", n, x, y, label)
    root = mp.sqrt(discriminant)
    if x >= 0:
        return 2 * b / (x + root)
    return (root - x) / (2 * y)


@working_precision
def f_n(ctx: ModelContext, n: int, x: Any, y: Any) -> mp.mpf:
    """(-x + sqrt(x^2 + 4 (1 - q^2n) y)) / (2 q^-alpha y)"""
    b = 1 - ctx.q_mp ** (2 * n)
    return ctx.q_alpha * _positive_root(ctx.singular_threshold, n, b, to_mpf(x), to_mpf(y), f"xi_{n}")


@working_precision
def g_n(ctx: ModelContext, n: int, x: Any, y: Any) -> mp.mpf:
    """(-x + sqrt(x^2 + 4 (1 - q^(2n+1+alpha)) y)) / (2 y)"""
    b = 1 - mp.power(ctx.q_mp, 2 * n + 1 + ctx.alpha_mp)
    return _positive_root(ctx.singular_threshold, n, b, to_mpf(x), to_mpf(y), f"eta_{n}")


def region_upper(ctx: ModelContext) -> mp.mpf:
    """Upper edge of the region on which T is applied"""
    candidates = [mp.mpf(1), ctx.q_alpha]
    if ctx.c < 0:
        candidates += [1 / abs(ctx.c_mp), ctx.q_alpha / abs(ctx.c_mp)]
    return max(candidates) * (1 + mp.mpf(REGION_MARGIN.numerator) / REGION_MARGIN.denominator)


def _guard(ctx: ModelContext, values: List[Any], label: str, record: List[Tuple[str, int]]) -> List[Any]:
    upper = region_upper(ctx)
    guarded = []
    for n, value in enumerate(values):
        if value < 0 or value > upper:
            record.append((label, n))
            value = min(max(value, mp.mpf(0)), upper)
        guarded.append(value)
    return guarded


@working_precision
def apply_T(ctx: ModelContext, rows: RowPair,
            policy: BoundaryPolicy = BoundaryPolicy.SHRINK) -> RowPair:
    """One application of T; the window shrinks by one under SHRINK"""
    if rows.window < 2:
        raise ConfigurationError(f"T needs a window of at least 2, got {rows.window}")
    q = ctx.q_mp
    c = ctx.c_mp
    out_of_region: List[Tuple[str, int]] = []
    xi = _guard(ctx, rows.xi, "xi", out_of_region)
    eta = _guard(ctx, rows.eta, "eta", out_of_region)
    W = rows.window

    if policy == BoundaryPolicy.CLAMP:
        even_limit, _ = asymptotic_targets(ctx)
        xi_ext = xi + [even_limit]
        eta_count = W
    else:
        xi_ext = xi
        eta_count = W - 1

    q2 = q * q
    q_alpha = ctx.q_alpha
    q_odd = q / q_alpha  # q^(1 - alpha)
    threshold = ctx.singular_threshold

    new_xi = [mp.mpf(0)]
    q2n = mp.mpf(1)
    for n in range(1, W):
        q2n *= q2
        x = -c * q2n * (eta[n] + eta[n - 1]) + c + 1
        y = c * c * q2n * eta[n] * eta[n - 1] - c
        new_xi.append(q_alpha * _positive_root(threshold, n, 1 - q2n, x, y, f"xi_{n}"))

    new_eta = []
    q2n = mp.mpf(1)
    for n in range(eta_count):
        x = -c * q2n * q * (xi_ext[n] + xi_ext[n + 1]) + c + 1
        y = c * c * q2n * q_odd * xi_ext[n] * xi_ext[n + 1] - c
        new_eta.append(_positive_root(threshold, n, 1 - q2n * q * q_alpha, x, y, f"eta_{n}"))
        q2n *= q2

    window = eta_count
    return RowPair(xi=new_xi[:window], eta=new_eta, window=window,
                   iteration_count=rows.iteration_count + 1, out_of_region=out_of_region)


def iterate(ctx: ModelContext, N: int, k: int,
            policy: BoundaryPolicy = BoundaryPolicy.SHRINK) -> CoefficientSequence:
    """T^k(0, 0) as a coefficient sequence y_0..y_N"""
    if k < 1:
        raise ConfigurationError(f"need at least one application of T, got k = {k}")
    retained = N // 2 + 1
    rows = RowPair.zeros(retained + (k if policy == BoundaryPolicy.SHRINK else 0))
    with ctx.precision():
        for _ in range(k):
            rows = apply_T(ctx, rows, policy)
    return rows.to_sequence(ctx, N, metadata={"iterations": k})


def _compare(report: BracketReport, iteration: int, label: str, old: List[Any], new: List[Any],
             increasing: bool, slack: mp.mpf) -> None:
    for n, (a, b) in enumerate(zip(old, new)):
        if (increasing and b < a - slack) or (not increasing and b > a + slack):
            report.violations.append((iteration, "monotone", label, n))


@working_precision
def solve(ctx: ModelContext, N: int, max_iter: int = 500, tol: Optional[Any] = None,
          policy: BoundaryPolicy = BoundaryPolicy.SHRINK, buffer_extra: int = 0,
          strict: bool = False) -> Tuple[CoefficientSequence, BracketReport]:
    """Iterate T from (0, 0) until the bracket width drops below tol.

    Args:
        ctx: Model parameters and working precision
        N: Highest index of the returned sequence
        max_iter: Iteration cap
        tol: Target bracket width, 10^-(digits/2) when omitted
        policy: How T treats the last row entries
        buffer_extra: Rows carried beyond the retained window
        strict: Raise NonConvergenceError instead of returning at max_iter

    Returns:
        The midpoint of the last two iterates as a sequence, and the
        BracketReport with widths, y_1 trace and order violations
    """
    if N < 1 or max_iter < 1:
        raise ConfigurationError(f"need N >= 1 and max_iter >= 1, got N={N}, max_iter={max_iter}")
    tol = ctx.tolerance(ctx.digits // 2) if tol is None else to_mpf(tol)
    slack = ctx.tolerance(ctx.digits)
    retained = N // 2 + 1
    buffer = retained + buffer_extra + (max_iter if policy == BoundaryPolicy.SHRINK else 0)

    report = BracketReport()
    previous = RowPair.zeros(buffer)
    report.lower = previous
    for k in range(1, max_iter + 1):
        current = apply_T(ctx, previous, policy)
        report.out_of_region.extend((k, label, n) for label, n in current.out_of_region)
        even = k % 2 == 0
        anchor = report.lower if even else report.upper
        if anchor is not None:
            _compare(report, k, "xi", anchor.xi[:retained], current.xi[:retained], even, slack)
            _compare(report, k, "eta", anchor.eta[:retained], current.eta[:retained], even, slack)
        other = report.upper if even else report.lower
        if other is not None:
            low, high = (current, other) if even else (other, current)
            for label in ("xi", "eta"):
                for n, (a, b) in enumerate(zip(getattr(low, label)[:retained], getattr(high, label)[:retained])):
                    if a > b + slack:
                        report.violations.append((k, "sandwich", label, n))
        if even:
            report.lower = current
        else:
            report.upper = current

        width = max(
            max(abs(a - b) for a, b in zip(current.xi[:retained], previous.xi[:retained])),
            max(abs(a - b) for a, b in zip(current.eta[:retained], previous.eta[:retained])),
        )
        report.widths.append(width)
        report.y1_trace.append(current.eta[0])
        report.iterations = k
        logger.debug("T iteration %d: width %s", k, mp.nstr(width, 5))
        previous_pair = previous
        previous = current
        if k >= 2 and width < tol:
            report.converged = True
            break

    midpoint = RowPair(
        xi=[(a + b) / 2 for a, b in zip(previous.xi[:retained], previous_pair.xi[:retained])],
        eta=[(a + b) / 2 for a, b in zip(previous.eta[:retained], previous_pair.eta[:retained])],
        window=retained,
    )
    midpoint.xi[0] = mp.mpf(0)
    sequence = midpoint.to_sequence(ctx, N, metadata={"iterations": report.iterations})

    if report.violations:
        logger.warning("bracketing recorded %d order violations", len(report.violations))
    if not report.converged:
        logger.warning("T did not converge: width %s after %d iterations",
                       mp.nstr(report.width, 5), report.iterations)
        if strict:
            raise NonConvergenceError(report, sequence)
    else:
        logger.info("T converged in %d iterations (width %s)", report.iterations, mp.nstr(report.width, 5))
    return sequence, report


@working_precision
def fixed_point_defect(ctx: ModelContext, seq: CoefficientSequence) -> mp.mpf:
    """max |T(rows) - rows| over the window T can fill from the sequence"""
    rows = RowPair.from_sequence(seq)
    image = apply_T(ctx, rows)
    return max(
        max(abs(a - b) for a, b in zip(image.xi, rows.xi)),
        max(abs(a - b) for a, b in zip(image.eta, rows.eta)),
    )
