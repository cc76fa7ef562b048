"""
Residual reports and sequence comparison metrics
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, List, Optional, Tuple

import mpmath as mp
import pandas as pd

from src.qcore.context import log10_abs
from src.qcore.qcalculus import format_real


@dataclass
class ResidualReport:
    """Named collection of (index, residual) pairs"""
    name: str
    residuals: List[Tuple[Hashable, Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add(self, index: Hashable, value: Any) -> None:
        self.residuals.append((index, value))

    def extend(self, items: Iterable[Tuple[Hashable, Any]]) -> None:
        for index, value in items:
            self.add(index, value)

    @property
    def max_abs(self) -> mp.mpf:
        if not self.residuals:
            return mp.mpf(0)
        return max(abs(v) for _, v in self.residuals)

    @property
    def argmax(self) -> Optional[Hashable]:
        if not self.residuals:
            return None
        return max(self.residuals, key=lambda item: abs(item[1]))[0]

    def values(self) -> List[Any]:
        return [v for _, v in self.residuals]

    def lookup(self, index: Hashable) -> Any:
        for key, value in self.residuals:
            if key == index:
                return value
        raise KeyError(index)

    def passed(self, tol: Any) -> bool:
        return self.max_abs < tol

    def merge(self, other: "ResidualReport", name: Optional[str] = None) -> "ResidualReport":
        """Concatenate two reports; metadata of `other` wins on key clashes"""
        merged = ResidualReport(
            name=name or self.name,
            residuals=list(self.residuals) + list(other.residuals),
            metadata={**self.metadata, **other.metadata},
        )
        return merged

    def filtered(self, predicate) -> "ResidualReport":
        return ResidualReport(
            name=self.name,
            residuals=[(k, v) for k, v in self.residuals if predicate(k)],
            metadata=dict(self.metadata),
        )

    def to_frame(self, digits: int = 20) -> pd.DataFrame:
        """Per-index table with decimal strings and log10 magnitudes"""
        rows = []
        for index, value in self.residuals:
            rows.append({
                "check": self.name,
                "index": index if not isinstance(index, tuple) else "/".join(str(i) for i in index),
                "residual": format_real(value, digits),
                "log10_abs_residual": log10_abs(value),
            })
        return pd.DataFrame(rows, columns=["check", "index", "residual", "log10_abs_residual"])

    def summary(self) -> Dict[str, Any]:
        return {
            "check": self.name,
            "count": len(self.residuals),
            "max_abs": self.max_abs,
            "argmax": self.argmax,
        }


class ResidualMetrics:
    """
    Aggregate statistics over residual reports and coefficient sequences
    """

    @staticmethod
    def summarize(reports: Iterable[ResidualReport]) -> pd.DataFrame:
        rows = []
        for report in reports:
            summary = report.summary()
            summary["log10_max_abs"] = log10_abs(summary["max_abs"])
            summary["max_abs"] = format_real(summary["max_abs"], 10)
            rows.append(summary)
        return pd.DataFrame(rows)

    @staticmethod
    def relative_gaps(values: List[Any], reference: List[Any]) -> List[Any]:
        """Termwise |a - b| / max(1, |b|) over the common prefix"""
        gaps = []
        for a, b in zip(values, reference):
            gaps.append(abs(a - b) / max(1, abs(b)))
        return gaps

    @staticmethod
    def monotone_from(values: List[Any]) -> int:
        """First index from which `values` is strictly decreasing to the end"""
        start = len(values) - 1
        while start > 0 and values[start] < values[start - 1]:
            start -= 1
        return start
