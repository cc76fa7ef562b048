"""
Coefficient sequences y_n = a_n^2 q^(1-n) with method provenance
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import mpmath as mp
import pandas as pd

from src.qcore.context import ModelContext, log10_abs
from src.qcore.errors import InvalidSequenceError
from src.qcore.qcalculus import format_real


class Method(str, Enum):
    ORACLE = "oracle"
    FORWARD = "forward"
    FIXEDPOINT = "fixedpoint"
    CLOSED_FORM = "closed_form"


POSITIVE_METHODS = (Method.ORACLE, Method.FIXEDPOINT)


@dataclass
class CoefficientSequence:
    """y_0..y_N for one model, with the method and precision that produced them"""
    ctx: ModelContext
    y: List[Any]
    method: Method
    breakdown_index: Optional[int] = None  # first n with y_n <= 0
    singular_index: Optional[int] = None  # step at which a SingularityError stopped the run
    entry_digits: List[int] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.y:
            raise InvalidSequenceError("a coefficient sequence needs at least y_0")
        if self.y[0] != 0:
            raise InvalidSequenceError(f"y_0 must be 0, got {self.y[0]}")
        if self.method in POSITIVE_METHODS:
            for n, value in enumerate(self.y[1:], start=1):
                if value <= 0:
                    raise InvalidSequenceError(f"{self.method.value} sequence has y_{n} = {value} <= 0")
        if not self.entry_digits:
            self.entry_digits = [self.ctx.digits] * len(self.y)

    @property
    def N(self) -> int:
        return len(self.y) - 1

    @property
    def a_sq(self) -> List[mp.mpf]:
        """a_n^2 = y_n q^(n-1)"""
        with self.ctx.precision():
            q = self.ctx.q_mp
            return [mp.mpf(0)] + [self.y[n] * q ** (n - 1) for n in range(1, len(self.y))]

    @classmethod
    def from_a_sq(cls, ctx: ModelContext, a_sq: List[Any], method: Method, **kwargs) -> "CoefficientSequence":
        with ctx.precision():
            q = ctx.q_mp
            y = [mp.mpf(0)] + [a_sq[n] / q ** (n - 1) for n in range(1, len(a_sq))]
        return cls(ctx=ctx, y=y, method=method, **kwargs)

    def truncated(self, N: int) -> "CoefficientSequence":
        return CoefficientSequence(
            ctx=self.ctx, y=self.y[: N + 1], method=self.method,
            breakdown_index=self.breakdown_index if (self.breakdown_index or 0) <= N else None,
            singular_index=self.singular_index if (self.singular_index or 0) <= N else None,
            entry_digits=self.entry_digits[: N + 1], metadata=dict(self.metadata),
        )

    def perturbed(self, index: int, delta: Any) -> "CoefficientSequence":
        """Copy with y_index shifted by delta (negative controls)"""
        with self.ctx.precision():
            y = list(self.y)
            y[index] = y[index] + delta
        return CoefficientSequence(ctx=self.ctx, y=y, method=self.method,
                                   entry_digits=list(self.entry_digits),
                                   metadata={**self.metadata, "perturbed_index": index})

    def to_frame(self, digits: Optional[int] = None) -> pd.DataFrame:
        """Rows n, y_n, a_n_sq, log10_abs_y_n, method with decimal strings"""
        digits = digits or self.ctx.digits
        a_sq = self.a_sq
        rows = []
        with self.ctx.precision():
            for n, value in enumerate(self.y):
                rows.append({
                    "n": n,
                    "y_n": format_real(value, digits),
                    "a_n_sq": format_real(a_sq[n], digits),
                    "log10_abs_y_n": "" if value == 0 else format_real(mp.log10(abs(value)), 17),
                    "method": self.method.value,
                })
        return pd.DataFrame(rows, columns=["n", "y_n", "a_n_sq", "log10_abs_y_n", "method"])

    def log10_abs(self) -> List[Optional[float]]:
        return [log10_abs(v) for v in self.y]
