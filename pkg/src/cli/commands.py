"""
Subcommands: coeffs, verify, compare

Each command takes a validated RunConfig and returns a process exit code:
0 on success, 1 when a verification check fails, 2 when the computation
itself raised a QFreudError.
"""
import itertools
import logging
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import mpmath as mp
import pandas as pd

from src.cli.config import RunConfig
from src.fixedpoint.operator import BoundaryPolicy, iterate, solve
from src.metrics.residuals import ResidualReport
from src.oracle.stieltjes import bn_residual, gram_residual, leading_coeff_check, stieltjes
from src.oracle.structure import intermediate_residuals, scan, structure_residuals
from src.painleve.asymmetric import UVVariant, asymptote_gap, to_uv, uv_residual
from src.painleve.confinement import confinement_probe, critical_y_before
from src.painleve.limits import dp1_limit_residual, qpv_limit_gap
from src.painleve.recurrence import agreement_index, c0_closed_form, forward_run, painleve_residual
from src.painleve.sequence import CoefficientSequence, Method
from src.qcore.context import ModelContext, to_fraction, to_mpf
from src.qcore.errors import ConfigurationError, QFreudError
from src.qcore.qcalculus import format_real
from src.weights.qfreud import pearson_report

logger = logging.getLogger(__name__)

METHOD_SPEC = re.compile(r"^(?P<name>[a-z_]+)(@(?P<digits>\d+))?(:(?P<iterations>\d+))?$")
QPV_RATIO_BAND = (mp.mpf("1.8"), mp.mpf("2.2"))


@dataclass
class MethodSpec:
    """name[@digits][:iterations], e.g. forward@20 or fixedpoint:3"""
    name: str
    digits: Optional[int] = None
    iterations: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "MethodSpec":
        match = METHOD_SPEC.match(text.strip())
        if not match or match.group("name") not in {m.value for m in Method}:
            raise ConfigurationError(f"cannot parse method spec {text!r}; expected name[@digits][:iterations]")
        digits = match.group("digits")
        iterations = match.group("iterations")
        if iterations is not None and match.group("name") != Method.FIXEDPOINT.value:
            raise ConfigurationError(f"only fixedpoint accepts an iteration count, got {text!r}")
        return cls(
            name=match.group("name"),
            digits=int(digits) if digits else None,
            iterations=int(iterations) if iterations else None,
        )

    @property
    def label(self) -> str:
        text = self.name
        if self.digits:
            text += f"@{self.digits}"
        if self.iterations:
            text += f":{self.iterations}"
        return text


def compute_sequence(config: RunConfig, spec: Optional[MethodSpec] = None) -> CoefficientSequence:
    """y_0..y_n for the configured model with one method"""
    spec = spec or MethodSpec(config.method, iterations=config.iterations)
    ctx = config.model_context(spec.digits)
    N = config.n
    logger.info("computing y_0..y_%d with %s at %d digits", N, spec.label, ctx.digits)

    if spec.name == Method.ORACLE.value:
        table = stieltjes(ctx, N)
        return CoefficientSequence.from_a_sq(ctx, table.a_sq, Method.ORACLE)
    if spec.name == Method.FORWARD.value:
        return forward_run(ctx, N, strict=not config.allow_singular)
    if spec.name == Method.CLOSED_FORM.value:
        return c0_closed_form(ctx, N)

    policy = BoundaryPolicy(config.policy)
    if spec.iterations:
        return iterate(ctx, N, spec.iterations, policy)
    sequence, _ = solve(ctx, N, max_iter=config.max_iter, tol=to_fraction(config.tol),
                        policy=policy, buffer_extra=config.buffer_extra)
    return sequence


def write_csv(frame: pd.DataFrame, output: Optional[str]) -> None:
    """Header row, comma separator, LF endings, UTF-8; stdout when no path is given"""
    if output is None:
        sys.stdout.write(frame.to_csv(index=False, lineterminator="\n"))
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    logger.info("wrote %d rows to %s", len(frame), path)


def cmd_coeffs(config: RunConfig) -> int:
    sequence = compute_sequence(config)
    if sequence.breakdown_index is not None:
        logger.warning("positivity lost at n=%d", sequence.breakdown_index)
    if sequence.singular_index is not None:
        print(f"warning: singular step at n={sequence.singular_index}; output truncated", file=sys.stderr)
    write_csv(sequence.to_frame(), config.output)
    return 0


@dataclass
class CheckOutcome:
    report: ResidualReport
    passed: bool
    criterion: str
    notes: List[str] = field(default_factory=list)
    frame: Optional[pd.DataFrame] = None  # replaces report.to_frame() in the CSV

    def table(self) -> pd.DataFrame:
        return self.frame if self.frame is not None else self.report.to_frame()


def _tolerance(config: RunConfig, ctx: ModelContext) -> mp.mpf:
    if config.check_tol is not None:
        return to_mpf(to_fraction(config.check_tol))
    return ctx.singular_threshold


def _bounded(report: ResidualReport, tol: mp.mpf) -> CheckOutcome:
    return CheckOutcome(report=report, passed=report.passed(tol), criterion=f"tol {mp.nstr(tol, 3)}")


def check_pearson(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    return _bounded(pearson_report(ctx, config.points), _tolerance(config, ctx))


def check_gram(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    return _bounded(gram_residual(ctx, stieltjes(ctx, config.n)), _tolerance(config, ctx))


def check_bn(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    return _bounded(bn_residual(ctx, stieltjes(ctx, config.n)), _tolerance(config, ctx))


def check_lemma31(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    report = leading_coeff_check(ctx, stieltjes(ctx, config.n))
    outcome = _bounded(report, _tolerance(config, ctx))
    gap = report.metadata["construction_gamma_gap"]
    outcome.notes.append(f"interpolated vs constructed gamma_n: {mp.nstr(gap, 5)}")
    return outcome


def check_structure(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    table = stieltjes(ctx, config.n)
    return _bounded(scan(structure_residuals, ctx, table, range(3, table.N)), _tolerance(config, ctx))


def check_intermediate(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    table = stieltjes(ctx, config.n)
    return _bounded(scan(intermediate_residuals, ctx, table, range(2, table.N)), _tolerance(config, ctx))


def check_painleve(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    sequence = compute_sequence(config)
    return _bounded(painleve_residual(sequence.ctx, sequence), _tolerance(config, ctx))


def check_uv(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    sequence = compute_sequence(config)
    rows = to_uv(sequence, UVVariant(config.variant))
    return _bounded(uv_residual(sequence.ctx, rows), _tolerance(config, ctx))


def check_asymptotics(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    sequence = compute_sequence(config)
    threshold = None if config.check_tol is None else to_mpf(to_fraction(config.check_tol))
    report = asymptote_gap(sequence.ctx, sequence, threshold=threshold)
    onset = report.metadata["onset"]
    outcome = CheckOutcome(
        report=report, passed=onset is not None,
        criterion=f"monotone below {mp.nstr(report.metadata['threshold'], 3)}",
    )
    outcome.notes.append(f"onset n0 = {onset}" if onset is not None else "no onset within n <= N")
    return outcome


def check_bracket(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    _, bracket = solve(ctx, config.n, max_iter=config.max_iter, tol=to_fraction(config.tol),
                       policy=BoundaryPolicy(config.policy), buffer_extra=config.buffer_extra)
    report = ResidualReport(name="bracket", metadata={"converged": bracket.converged})
    report.extend(enumerate(bracket.widths, start=1))
    outcome = CheckOutcome(report=report, passed=not bracket.violations,
                           criterion="no monotonicity or sandwich violations",
                           frame=bracket.to_frame())
    outcome.notes.append(f"{len(bracket.violations)} order violations")
    if bracket.converged:
        outcome.notes.append(f"converged after {bracket.iterations} iterations")
    else:
        outcome.notes.append(
            f"NonConvergence: width {mp.nstr(bracket.width, 5)} after {bracket.iterations} iterations"
        )
    if bracket.out_of_region:
        outcome.notes.append(f"{len(bracket.out_of_region)} entries clamped into the region")
    return outcome


def _confinement_start(config: RunConfig, ctx: ModelContext, n: int) -> mp.mpf:
    if config.y_before is None:
        table = stieltjes(ctx, n)
        return CoefficientSequence.from_a_sq(ctx, table.a_sq, Method.ORACLE).y[n - 1]
    if config.y_before.strip().lower() == "critical":
        return critical_y_before(ctx, n)
    return to_mpf(to_fraction(config.y_before))


def check_confinement(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    n = config.index
    y_before = _confinement_start(config, ctx, n)
    report = ResidualReport(name="confinement", metadata={"n": n, "parity": config.parity})
    passed = True
    notes = []
    for text in config.epsilon:
        epsilon = to_mpf(to_fraction(text))
        bound = 1000 * epsilon
        trace = confinement_probe(ctx, n, config.parity, y_before, epsilon, steps=config.steps)
        report.add(("y_n+4", text), trace.relative_error)
        ok = trace.orders_match() and trace.relative_error < bound
        if trace.relative_error_y8 is not None:
            report.add(("y_n+8", text), trace.relative_error_y8)
            ok = ok and trace.relative_error_y8 < bound
        passed = passed and ok
        orders = ", ".join(f"{o:+.3f}" for o in trace.orders)
        notes.append(f"eps={text}: orders ({orders}) {'PASS' if ok else 'FAIL'}")
    return CheckOutcome(report=report, passed=passed, criterion="orders within 0.1, error < 1e3 eps",
                        notes=notes)


def check_dp1(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    report = dp1_limit_residual(ctx, config.a, config.n_max, config.q_family)
    monotone = report.metadata["monotone"]
    outcome = CheckOutcome(report=report, passed=report.metadata["overall_decrease"],
                           criterion="max_n |r_n| decreases from the first to the last q")
    broken = [n for n, ok in monotone.items() if not ok]
    if broken:
        outcome.notes.append(f"|r_n| not stepwise monotone for n in {broken}")
    return outcome


def check_qpv(config: RunConfig, ctx: ModelContext) -> CheckOutcome:
    report = ResidualReport(name="qpv", metadata={"n": config.index})
    v_pair = (config.v, config.v)
    low, high = QPV_RATIO_BAND
    passed = True
    for text in config.kappa:
        kappa = to_fraction(text)
        gap_u, gap_v = qpv_limit_gap(ctx, config.index, config.u, v_pair, kappa)
        half_u, half_v = qpv_limit_gap(ctx, config.index, config.u, v_pair, kappa / 2)
        for label, ratio in (("u", gap_u / half_u), ("v", gap_v / half_v)):
            report.add((label, text), ratio - 2)
            passed = passed and low <= ratio <= high
    return CheckOutcome(report=report, passed=passed, criterion="gap(kappa)/gap(kappa/2) in [1.8, 2.2]")


CHECK_REGISTRY: Dict[str, Callable[[RunConfig, ModelContext], CheckOutcome]] = {
    "pearson": check_pearson,
    "gram": check_gram,
    "bn": check_bn,
    "lemma31": check_lemma31,
    "structure": check_structure,
    "intermediate": check_intermediate,
    "painleve": check_painleve,
    "uv": check_uv,
    "asymptotics": check_asymptotics,
    "bracket": check_bracket,
    "confinement": check_confinement,
    "dp1": check_dp1,
    "qpv": check_qpv,
}


def cmd_verify(config: RunConfig) -> int:
    ctx = config.model_context()
    with ctx.precision():
        outcome = CHECK_REGISTRY[config.check](config, ctx)
        report = outcome.report
        status = "PASS" if outcome.passed else "FAIL"
        print(f"{config.check}: max |residual| = {mp.nstr(report.max_abs, 5)} "
              f"at {report.argmax} ({outcome.criterion}) {status}")
        for note in outcome.notes:
            print(f"  {note}")
        write_csv(outcome.table(), config.output)
    return 0 if outcome.passed else 1


def cmd_compare(config: RunConfig) -> int:
    specs = [MethodSpec.parse(text) for text in config.methods]
    runs = [(spec.label, compute_sequence(config, spec)) for spec in specs]
    pairs = list(itertools.combinations(runs, 2))
    dps = max(sequence.ctx.dps for _, sequence in runs)

    rows = []
    with mp.workdps(dps):
        for n in range(config.n + 1):
            row = {"n": n}
            for label, sequence in runs:
                row[f"y_{label}"] = format_real(sequence.y[n], sequence.ctx.digits) if n < len(sequence.y) else ""
            for (label_a, seq_a), (label_b, seq_b) in pairs:
                key = f"log10_diff_{label_a}_vs_{label_b}"
                if n >= len(seq_a.y) or n >= len(seq_b.y):
                    row[key] = ""
                    continue
                diff = abs(seq_a.y[n] - seq_b.y[n])
                row[key] = "" if diff == 0 else format_real(mp.log10(diff), 17)
            rows.append(row)

        for (label_a, seq_a), (label_b, seq_b) in pairs:
            common = min(len(seq_a.y), len(seq_b.y))
            largest = max(abs(seq_a.y[n] - seq_b.y[n]) for n in range(common))
            index = agreement_index(seq_a, seq_b, config.agree_digits)
            where = "throughout" if index is None else f"until n = {index}"
            print(f"{label_a} vs {label_b}: agree to {config.agree_digits} digits {where}; "
                  f"max |dy| = {mp.nstr(largest, 5)}", file=sys.stderr)

    write_csv(pd.DataFrame(rows), config.output)
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "coeffs": cmd_coeffs,
    "verify": cmd_verify,
    "compare": cmd_compare,
}


def failing_index(exc: QFreudError) -> Optional[int]:
    for attr in ("index", "n"):
        value = getattr(exc, attr, None)
        if value is not None:
            return value
    return None


def run(config: RunConfig) -> int:
    """Dispatch one subcommand, mapping library failures to exit code 2"""
    logger.info("model: %s", config.model_context().describe())
    try:
        return COMMANDS[config.command](config)
    except QFreudError as exc:
        index = failing_index(exc)
        prefix = f"error at index {index}" if index is not None else "error"
        print(f"{prefix}: {exc}", file=sys.stderr)
        return 2
