"""
Model context: q-Freud parameters, working precision, truncation control

ModelContext is the single source of configuration. Parameters are stored as
exact rationals so "0.9" or "-1/3" mean exactly what they say; mpf values are
materialized at the working precision (digits + GUARD_DIGITS) on demand.
"""
import functools
import logging
from contextlib import contextmanager
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Any, Dict, Iterator, Optional, Union

import mpmath as mp

from src.qcore.errors import ConfigurationError

logger = logging.getLogger(__name__)

GUARD_DIGITS = 10
MIN_DIGITS = 30

Rational = Union[int, str, float, Fraction]


def to_fraction(value: Rational) -> Fraction:
    """Parse an exact rational from int, decimal/fraction string, or float"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConfigurationError(f"Cannot use boolean {value!r} as a number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # shortest repr, so 0.9 means nine tenths
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"Cannot parse {value!r} as an exact number") from exc


def to_mpf(value: Any) -> mp.mpf:
    """Convert to mpf at the current working precision"""
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, mp.mpf):
        return +value
    return mp.mpf(value)


@dataclass(frozen=True)
class ModelContext:
    """Immutable parameter set for one q-Freud model and precision regime"""
    q: Fraction
    alpha: Fraction
    c: Fraction = Fraction(-1)
    digits: int = 50
    series_tol: Optional[Fraction] = None  # defaults to 10^-digits
    lattice_cutoff: Optional[int] = None  # K, lattice truncated at q^K
    exploratory: bool = False  # permits c > 0
    allow_low_precision: bool = False  # permits digits < MIN_DIGITS

    def __post_init__(self):
        object.__setattr__(self, "q", to_fraction(self.q))
        object.__setattr__(self, "alpha", to_fraction(self.alpha))
        object.__setattr__(self, "c", to_fraction(self.c))

        if not 0 < self.q < 1:
            raise ConfigurationError(f"q must lie in (0, 1), got {self.q}")
        if self.alpha <= -1:
            raise ConfigurationError(f"alpha must exceed -1, got {self.alpha}")
        if self.c > 0 and not self.exploratory:
            raise ConfigurationError(f"c = {self.c} > 0 requires exploratory mode")
        if not isinstance(self.digits, int) or self.digits <= 0:
            raise ConfigurationError(f"digits must be a positive integer, got {self.digits!r}")
        if self.digits < MIN_DIGITS and not self.allow_low_precision:
            raise ConfigurationError(
                f"digits = {self.digits} is below {MIN_DIGITS}; set allow_low_precision to override"
            )

        ceiling = Fraction(1, 10 ** self.digits)
        if self.series_tol is None:
            object.__setattr__(self, "series_tol", ceiling)
        else:
            tol = to_fraction(self.series_tol)
            if not 0 < tol <= ceiling:
                raise ConfigurationError(
                    f"series_tol must lie in (0, 1e-{self.digits}], got {float(tol):.3e}"
                )
            object.__setattr__(self, "series_tol", tol)

        if self.lattice_cutoff is None:
            object.__setattr__(self, "lattice_cutoff", self._auto_cutoff())
        elif self.lattice_cutoff < 1:
            raise ConfigurationError(f"lattice_cutoff must be positive, got {self.lattice_cutoff}")

    def _auto_cutoff(self) -> int:
        # ceil(log(tol)/log(q)), nudged so that q^K < tol strictly
        with mp.workdps(30):
            ratio = mp.log(to_mpf(self.series_tol)) / mp.log(to_mpf(self.q))
        return int(mp.ceil(ratio)) + 1

    @property
    def dps(self) -> int:
        """Working decimal precision including guard digits"""
        return self.digits + GUARD_DIGITS

    @contextmanager
    def precision(self) -> Iterator[None]:
        """Enter the working precision of this context"""
        with mp.workdps(self.dps):
            yield

    @property
    def q_mp(self) -> mp.mpf:
        return to_mpf(self.q)

    @property
    def alpha_mp(self) -> mp.mpf:
        return to_mpf(self.alpha)

    @property
    def c_mp(self) -> mp.mpf:
        return to_mpf(self.c)

    @property
    def q_alpha(self) -> mp.mpf:
        """q^alpha at the current precision"""
        return mp.power(self.q_mp, self.alpha_mp)

    @property
    def tol_mp(self) -> mp.mpf:
        return to_mpf(self.series_tol)

    @property
    def singular_threshold(self) -> mp.mpf:
        """10^(-digits/2): divisions below this are treated as singular"""
        return mp.power(10, -mp.mpf(self.digits) / 2)

    def tolerance(self, exponent: Union[int, float]) -> mp.mpf:
        """10^(-exponent) as an mpf"""
        return mp.power(10, -mp.mpf(exponent))

    def replace(self, **changes) -> "ModelContext":
        """Copy with changes; derived truncation settings are recomputed"""
        if "digits" in changes and "series_tol" not in changes:
            changes["series_tol"] = None
        if {"q", "digits", "series_tol"} & changes.keys() and "lattice_cutoff" not in changes:
            changes["lattice_cutoff"] = None
        return replace(self, **changes)

    def describe(self) -> Dict[str, Any]:
        """Parameter summary for logs and CSV metadata"""
        summary = {}
        for f in fields(self):
            value = getattr(self, f.name)
            summary[f.name] = str(value) if isinstance(value, Fraction) else value
        return summary

    @classmethod
    def from_config(cls, cfg: Dict[str, Any]) -> "ModelContext":
        model = cfg.get("model", {}) if cfg else {}
        return cls(
            q=model.get("q", "0.9"),
            alpha=model.get("alpha", 5),
            c=model.get("c", -1),
            digits=int(model.get("digits", 50)),
            series_tol=model.get("series_tol"),
            lattice_cutoff=model.get("lattice_cutoff"),
            exploratory=bool(model.get("exploratory", False)),
            allow_low_precision=bool(model.get("allow_low_precision", False)),
        )


def working_precision(func):
    """Run func at the precision of the first ModelContext among its arguments.

    mp.workdps mutates the global mpmath context, so parallel sweeps must use
    processes rather than threads.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = next(
            (a for a in list(args) + list(kwargs.values()) if isinstance(a, ModelContext)),
            None,
        )
        if ctx is None:
            return func(*args, **kwargs)
        with ctx.precision():
            return func(*args, **kwargs)
    return wrapper


def parity_of(n: int) -> str:
    return "even" if n % 2 == 0 else "odd"


def lattice_size(ctx: ModelContext) -> int:
    """Number of positive lattice nodes q^0..q^K"""
    return ctx.lattice_cutoff + 1


def log10_abs(value: mp.mpf) -> Optional[float]:
    if value == 0:
        return None
    return float(mp.log10(abs(value)))


def digits_for_budget(N: int) -> int:
    """Rule-of-thumb precision for a degree-N orthogonalization"""
    return MIN_DIGITS + 2 * N


__all__ = [
    "GUARD_DIGITS", "MIN_DIGITS", "ModelContext", "to_fraction", "to_mpf",
    "working_precision", "parity_of", "lattice_size", "log10_abs", "digits_for_budget",
]
