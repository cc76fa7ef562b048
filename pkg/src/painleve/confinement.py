"""
Numeric singularity-confinement probes

Starting from y_{n-1} = y_before and y_n = epsilon, the forward recurrence is
iterated through the singular pattern (1/eps, 1/eps, eps, O(1)). Orders in
epsilon are fitted by halving epsilon; the first regular value y_{n+4} is
compared with its predicted limit, which depends on y_{n-1} only.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import mpmath as mp

from src.painleve.recurrence import forward_step
from src.qcore.context import ModelContext, parity_of, to_mpf, working_precision
from src.qcore.errors import ConfigurationError

logger = logging.getLogger(__name__)

EXPECTED_ORDERS = (-1, -1, 1, 0)


@dataclass
class SingularityTrace:
    """Values y_n..y_{n+steps} through one confined singularity"""
    parity: str
    n: int
    epsilon: Any
    y_before: Any
    y_values: List[Any]
    predicted_y4: Any
    orders: List[float]
    relative_error: Any
    predicted_y8: Optional[Any] = None
    relative_error_y8: Optional[Any] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.y_values) - 1

    def expected_orders(self) -> List[int]:
        if self.steps == 4:
            return list(EXPECTED_ORDERS)
        return [-1, -1, 1, 1, -1, -1, 1, 0]

    def orders_match(self, tolerance: float = 0.1) -> bool:
        return all(abs(o - e) <= tolerance for o, e in zip(self.orders, self.expected_orders()))


def confined_value(ctx: ModelContext, n: int, y_before: Any) -> mp.mpf:
    """Limit of y_{n+4} as y_n -> 0 with y_{n-1} = y_before"""
    q = ctx.q_mp
    c = ctx.c_mp
    alpha = ctx.alpha_mp
    shift = 1 - q ** -2
    if n % 2 == 0:
        return mp.power(q, 2 + alpha) / (c * (1 - mp.power(q, n + alpha + 3))) * \
            (c * y_before * (1 - q ** n) - (1 + c) * shift)
    return mp.power(q, 2 - alpha) / (c * (1 - q ** (n + 3))) * \
        (c * y_before * (1 - mp.power(q, n + alpha)) - (1 + c) * shift * ctx.q_alpha)


@working_precision
def critical_y_before(ctx: ModelContext, n: int) -> mp.mpf:
    """The y_{n-1} for which the predicted y_{n+4} vanishes"""
    if ctx.c == 0:
        raise ConfigurationError("confinement analysis needs c != 0")
    q = ctx.q_mp
    c = ctx.c_mp
    shift = 1 - q ** -2
    if n % 2 == 0:
        return (1 + c) * shift / (c * (1 - q ** n))
    return ctx.q_alpha * (1 + c) * shift / (c * (1 - mp.power(q, n + ctx.alpha_mp)))


def _run(ctx: ModelContext, n: int, y_before: mp.mpf, epsilon: mp.mpf, steps: int) -> List[mp.mpf]:
    values = [y_before, epsilon]
    for i in range(steps):
        values.append(forward_step(ctx, n + i, values[-2], values[-1]))
    return values[1:]


def _relative(value: mp.mpf, target: mp.mpf) -> mp.mpf:
    if target == 0:
        return abs(value)
    return abs(value - target) / abs(target)


@working_precision
def confinement_probe(ctx: ModelContext, n: int, parity: str, y_before: Any, epsilon: Any,
                      steps: int = 4) -> SingularityTrace:
    """Push y_n = epsilon through the recurrence and measure confinement"""
    if parity not in ("even", "odd") or parity_of(n) != parity:
        raise ConfigurationError(f"n = {n} does not have parity {parity!r}")
    if n < 2:
        raise ConfigurationError(f"confinement probe needs n >= 2, got {n}")
    if steps not in (4, 8):
        raise ConfigurationError(f"steps must be 4 or 8, got {steps}")
    epsilon = to_mpf(epsilon)
    if not 0 < epsilon < mp.mpf("1e-5"):
        raise ConfigurationError(f"epsilon must lie in (0, 1e-5), got {mp.nstr(epsilon, 5)}")
    y_before = to_mpf(y_before)

    values = _run(ctx, n, y_before, epsilon, steps)
    halved = _run(ctx, n, y_before, epsilon / 2, steps)
    orders = [float(mp.log(abs(values[j]) / abs(halved[j]), 2)) for j in range(1, steps + 1)]

    predicted = confined_value(ctx, n, y_before)
    trace = SingularityTrace(
        parity=parity, n=n, epsilon=epsilon, y_before=y_before, y_values=values,
        predicted_y4=predicted, orders=orders, relative_error=_relative(values[4], predicted),
    )
    if steps == 8:
        # second stage: y_{n+4} plays the role of epsilon, y_{n+3} of y_before
        trace.predicted_y8 = confined_value(ctx, n + 4, values[3])
        trace.relative_error_y8 = _relative(values[8], trace.predicted_y8)
    logger.debug("confinement n=%d eps=%s orders=%s", n, mp.nstr(epsilon, 3), orders)
    return trace
