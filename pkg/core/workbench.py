"""
Workbench
Verb dispatch shared by the command line and the HTTP API: binds expression
strings to a backend, runs the calculus operation and renders one
OperationReport plus the human-readable lines
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import mpmath

from config import load_field_config
from core.access_control import default_backend, validate_backend_access, validate_verb
from core.backends import Backend, get_backend, parse_rational
from core.calculus import (
    TRANSFER_ERROR,
    TRANSFER_NO_TRANSFER,
    UNDECIDED,
    ContinuityReport,
    IncrementProbe,
    continuity_at,
    derivative,
    ivt_root,
    second_derivative,
    transfer_check,
    uniform_continuity_probe,
)
from core.errors import EXIT_INPUT_ERROR, EXIT_OK, EXIT_UNDECIDED, EXIT_UNSUPPORTED, DomainError, Undecided
from core.expr import Expr, parse
from core.hyperfinite import (
    SUM_UNDECIDED,
    euler_binomial_expand,
    euler_exp,
    hyperfinite_product,
    hyperfinite_sum,
    sum_theorem_probe,
)
from core.numeric import FieldConfig, Tag, format_decimal, format_rational, to_mpf
from core.omega import HyperNat, HyperSeq, hs_null_quotient_demo
from schemas import Command, CommandBody, OperationReport

logger = logging.getLogger(__name__)

DEFAULT_DIGITS = 6
DEFAULT_BINOMIAL_TERMS = 4
DEFAULT_OFFSET = "-1/N"
DEFAULT_ULTRA_RULE = "(1+1/n)^n"


@dataclass
class Outcome:
    """Report, human lines and exit code of one operation"""

    report: OperationReport
    lines: List[str] = field(default_factory=list)
    exit_code: int = EXIT_OK


# ============================================================================
# FORMATTING HELPERS
# ============================================================================

def _tolerance_digits(tol: Fraction) -> int:
    digits = 0
    while Fraction(1, 10 ** digits) > tol:
        digits += 1
    return digits


def _short(q: Optional[Fraction]) -> Optional[str]:
    """p/q when short, otherwise 12 decimals"""
    if q is None:
        return None
    text = format_rational(q)
    return text if len(text) <= 24 else format_decimal(q, 12)


def _scientific(q: Optional[Fraction]) -> Optional[str]:
    if q is None:
        return None
    if q == 0:
        return "0"
    return mpmath.nstr(to_mpf(q), 3)


# ============================================================================
# WORKBENCH
# ============================================================================

class Workbench:
    """One command bound to its backend and field configuration"""

    def __init__(self, command: Command, config: Optional[FieldConfig] = None):
        validate_verb(command.verb)
        self.command = command
        self.backend_name = command.backend or default_backend(command.verb)
        validate_backend_access(command.verb, self.backend_name)
        self.config = config or load_field_config(command.overrides())
        self.backend: Backend = get_backend(self.backend_name, self.config)

    # ------------------------------------------------------------------
    # argument access
    # ------------------------------------------------------------------

    def _args(self, low: int, high: Optional[int] = None) -> List[str]:
        args = self.command.args
        high = low if high is None else high
        if not low <= len(args) <= high:
            wanted = str(low) if low == high else f"{low} to {high}"
            raise DomainError(f"'{self.command.verb}' takes {wanted} argument(s), got {len(args)}",
                              "see --help for the argument list of each verb")
        return list(args)

    def _expressions(self, count: int) -> List[Expr]:
        return [parse(text) for text in self._args(count)]

    def _point(self) -> Fraction:
        if self.command.at is None:
            raise DomainError(f"'{self.command.verb}' needs a point", "pass --at <rational>")
        return parse_rational(self.command.at)

    def _interval(self) -> Tuple[Fraction, Fraction]:
        if not self.command.interval:
            raise DomainError(f"'{self.command.verb}' needs an interval", "pass --interval <a> <b>")
        a, b = self.command.interval
        return parse_rational(a), parse_rational(b)

    def _hypernat(self) -> HyperNat:
        return HyperNat.from_expr(self.command.N or "n", self.config)

    # ------------------------------------------------------------------
    # value rendering
    # ------------------------------------------------------------------

    def _value(self, value: Fraction, exact: bool) -> str:
        """
        Exact values print as p/q, inexact ones as decimals; sequence-model
        estimates carry their st_tolerance
        """
        if self.command.decimal is not None:
            return format_decimal(value, self.command.decimal)
        if exact:
            return format_rational(value)
        if self.backend_name == "omega":
            tol = self.config.st_tolerance
            digits = _tolerance_digits(tol)
            return f"{format_decimal(value, digits)} (± {format_decimal(tol, digits)})"
        return format_decimal(value, max(self.config.working_precision - self.config.guard_digits, 1))

    def _tolerances(self, **extra: Fraction) -> Dict[str, str]:
        tolerances = {
            "noise_floor": format_rational(self.config.noise_floor),
            "st_tolerance": format_rational(self.config.st_tolerance),
        }
        tolerances.update({key: format_rational(value) for key, value in extra.items()})
        return tolerances

    def _outcome(self, lines: List[str], verdict: Optional[str] = None, values: Optional[dict] = None,
                 probes: Optional[List[dict]] = None, exit_code: Optional[int] = None, **tolerances) -> Outcome:
        inputs = self.command.model_dump(exclude_none=True, exclude={"verb"})
        inputs["backend"] = self.backend_name
        report = OperationReport(
            operation=self.command.verb,
            inputs=inputs,
            verdict=verdict,
            probes=probes or [],
            values=values or {},
            tolerances=self._tolerances(**tolerances),
        )
        if exit_code is None:
            exit_code = EXIT_UNDECIDED if verdict == UNDECIDED else EXIT_OK
        return Outcome(report, lines, exit_code)

    # ------------------------------------------------------------------
    # verbs
    # ------------------------------------------------------------------

    def run(self) -> Outcome:
        handler = VERB_HANDLERS[self.command.verb]
        logger.debug(f"▶️ {self.command.verb} on {self.backend_name} with {self.command.args}")
        return handler(self)

    def derive(self, second: bool = False) -> Outcome:
        f, = self._expressions(1)
        x0 = self._point()
        result = (second_derivative if second else derivative)(f, x0, self.backend)
        text = self._value(result.value, result.exact)
        probes = [
            {"dx": p.dx, "ratio_class": str(p.ratio_class), "st": self._value(p.st, result.exact)}
            for p in result.probes
        ]
        key = "second_derivative" if second else "derivative"
        return self._outcome([text], None, {key: text, "exact": result.exact}, probes, agreement=result.tolerance)

    def derive2(self) -> Outcome:
        return self.derive(second=True)

    def _continuity(self, result: ContinuityReport) -> Outcome:
        probes = [self._increment(p) for p in result.probes]
        lines = [result.verdict]
        if result.witness is not None:
            w = result.witness
            lines.append(f"  witness at x={w.point}, alpha={w.alpha}: increment {w.increment_class}"
                         + (f", st {_short(w.increment_st)}" if w.increment_st is not None else ""))
        else:
            lines.extend(f"  x={p['point']}, alpha={p['alpha']}: {p['increment_class'] or p['note']}" for p in probes)
        values = {"point": result.point, "mode": result.mode}
        if result.witness is not None:
            values["witness"] = self._increment(result.witness)
        return self._outcome(lines, result.verdict, values, probes)

    @staticmethod
    def _increment(p: IncrementProbe) -> dict:
        return {
            "point": p.point,
            "alpha": p.alpha,
            "increment_class": str(p.increment_class) if p.increment_class else None,
            "increment_st": _short(p.increment_st),
            "note": p.note,
        }

    def cont(self) -> Outcome:
        f, = self._expressions(1)
        return self._continuity(continuity_at(f, self._point(), self.backend))

    def ucont(self) -> Outcome:
        f, = self._expressions(1)
        a, b = self._interval()
        return self._continuity(uniform_continuity_probe(f, a, b, self.backend))

    def classify(self) -> Outcome:
        text, = self._args(1)
        element = self.backend.parse_point(text)
        classification = self.backend.classify(element)
        order = self.backend.order(element)
        line = str(classification)
        if order is not None and classification.tag in (Tag.INFINITESIMAL, Tag.INFINITE):
            line += f" (order {format_rational(order)})"
        values = {
            "tag": classification.tag.value,
            "sign": classification.sign.value,
            "order": format_rational(order) if order is not None else None,
        }
        return self._outcome([line], classification.tag.value, values)

    def compare(self) -> Outcome:
        left, right = self._args(2)
        a, b = self.backend.parse_point(left), self.backend.parse_point(right)
        outcome = self.backend.compare(a, b)
        qualifier = None
        if outcome.verdict != UNDECIDED:
            qualifier = self._qualifier(a, b)
        line = outcome.verdict + (f" ({qualifier})" if qualifier else "")
        values = {
            "exception_set": outcome.exception_set,
            "dominance_pattern": outcome.dominance_pattern,
            "magnitudes": qualifier,
        }
        probes = [{"index": n} for n in outcome.probe_indices]
        return self._outcome([line], outcome.verdict, values, probes)

    def _qualifier(self, a, b) -> Optional[str]:
        try:
            ta = self.backend.classify(a).tag.value.lower()
            tb = self.backend.classify(b).tag.value.lower()
        except Undecided:
            return None
        return f"both {ta}" if ta == tb else f"{ta} vs {tb}"

    def st(self) -> Outcome:
        text, = self._args(1)
        element = self.backend.parse_point(text)
        standard = self.backend.standard_value(element)
        value = self._value(standard.value, standard.exact)
        return self._outcome([value], None, {"st": value, "exact": standard.exact})

    def euler_exp(self) -> Outcome:
        k, z = (parse_rational(text) for text in self._args(2))
        result = euler_exp(k, z, self._hypernat(), self.config)
        value = self._value(result.st_estimate, result.exact)
        verdict = "Agrees" if result.within_tolerance else "Deviates"
        lines = [
            value,
            f"  exp({format_rational(k * z)}) = {format_decimal(result.oracle, 12)}, "
            f"deviation {_scientific(result.deviation)}",
        ]
        values = {
            "sequence": result.sequence.label,
            "st": value,
            "oracle": format_decimal(result.oracle, 12),
            "deviation": _scientific(result.deviation),
            "pattern": result.pattern,
        }
        probes = [{"term": text} for text in result.sequence.preview()]
        return self._outcome(lines, verdict, values, probes)

    def binom(self) -> Outcome:
        k, z = (parse_rational(text) for text in self._args(2))
        m = self.command.terms or DEFAULT_BINOMIAL_TERMS
        terms = euler_binomial_expand(k, z, self._hypernat(), m, self.config)
        probes = [
            {
                "r": t.r,
                "sequence": t.sequence.label,
                "st": self._value(t.st, t.exact),
                "oracle": format_rational(t.oracle),
                "matches": t.matches,
            }
            for t in terms
        ]
        lines = [f"r={p['r']}: {p['st']} (oracle {p['oracle']})" for p in probes]
        verdict = "Agrees" if all(t.matches for t in terms) else "Deviates"
        return self._outcome(lines, verdict, {"terms": len(terms)}, probes)

    def _hyperfinite(self, build: Callable[..., HyperSeq]) -> Outcome:
        rule, = self._args(1)
        seq = build(rule, self._hypernat(), self.config)
        pattern = seq.analyze()
        classification = pattern.classification
        if classification.tag is Tag.INFINITE or pattern.limit is None:
            line = str(classification)
            st_text = None
        else:
            st_text = self._value(pattern.limit, pattern.exact)
            line = st_text
        indices = seq.probe_indices()
        lines = [line, f"  {pattern.name}, tail correction {seq.tail_pattern}, probes up to n={indices[-1]}"]
        values = {
            "sequence": seq.label,
            "class": str(classification),
            "st": st_text,
            "pattern": pattern.name,
            "tail_correction": seq.tail_pattern,
        }
        probes = [{"term": text} for text in seq.preview()]
        return self._outcome(lines, classification.tag.value, values, probes)

    def hsum(self) -> Outcome:
        return self._hyperfinite(hyperfinite_sum)

    def hprod(self) -> Outcome:
        return self._hyperfinite(hyperfinite_product)

    def ivt(self) -> Outcome:
        f, = self._expressions(1)
        a, b = self._interval()
        digits = self.command.digits or DEFAULT_DIGITS
        result = ivt_root(f, a, b, digits, self.config)
        line = result.decimal + (" (exact hit)" if result.exact_hit else "")
        values = {
            "decimal": result.decimal,
            "exact_hit": result.exact_hit,
            "bracket": [format_rational(result.left), format_rational(result.right)],
            "rounds": result.rounds,
        }
        return self._outcome([line], None, values)

    def sumthm(self) -> Outcome:
        u, = self._args(1)
        x0 = self._point()
        report = sum_theorem_probe(u, x0, self.command.offset or DEFAULT_OFFSET, self._hypernat(), self.config)
        detail = f"  remainder at {report.probe_point}: "
        if report.remainder_class is None:
            detail += report.note
        else:
            detail += str(report.remainder_class)
            if report.remainder_st is not None:
                detail += f", st {self._value(report.remainder_st, False)}"
        values = {
            "series_term": str(report.series_term),
            "probe_point": report.probe_point,
            "remainder_class": str(report.remainder_class) if report.remainder_class else None,
            "remainder_st": self._value(report.remainder_st, False) if report.remainder_st is not None else None,
            "pattern": report.pattern,
        }
        probes = [{"index": n, "remainder": _scientific(report.remainder.term(n))} for n in report.probes]
        exit_code = EXIT_UNDECIDED if report.verdict == SUM_UNDECIDED else EXIT_OK
        return self._outcome([report.verdict, detail], report.verdict, values, probes, exit_code)

    def transfer(self) -> Outcome:
        lhs, rhs = self._expressions(2)
        points = [self.command.at] if self.command.at else None
        report = transfer_check(lhs, rhs, self.backend, points)
        probes = []
        lines = [report.verdict]
        for p in report.points:
            probes.append({
                "point": p.point,
                "outcome": p.outcome,
                "magnitude": _scientific(p.magnitude),
                "error": p.error,
                "message": p.message or None,
            })
            if p.error:
                lines.append(f"  {p.point}: {p.outcome} ({p.error}: {p.message})")
            else:
                lines.append(f"  {p.point}: {p.outcome}, max magnitude {_scientific(p.magnitude)}")
        exit_code = {TRANSFER_NO_TRANSFER: EXIT_UNSUPPORTED, TRANSFER_ERROR: EXIT_INPUT_ERROR}.get(
            report.verdict, EXIT_OK)
        values = {"identity": report.identity}
        return self._outcome(lines, report.verdict, values, probes, exit_code, threshold=report.threshold)

    def ultrademo(self) -> Outcome:
        rule, = self._args(0, 1) or [DEFAULT_ULTRA_RULE]
        seq = HyperSeq.from_expr(rule, self.config)
        report = hs_null_quotient_demo(seq)
        value = self._value(report.represented, False)
        values = {
            "sequence": report.sequence,
            "represented": value,
            "witness": report.witness.label,
            "witness_class": str(report.witness_class) if report.witness_class is not None else UNDECIDED,
            "witness_certified": report.witness_certified,
        }
        probes = [{"term": text} for text in seq.preview()]
        return self._outcome(report.trace, "Represented", values, probes)


VERB_HANDLERS: Dict[str, Callable[[Workbench], Outcome]] = {
    "derive": Workbench.derive,
    "derive2": Workbench.derive2,
    "cont": Workbench.cont,
    "ucont": Workbench.ucont,
    "classify": Workbench.classify,
    "compare": Workbench.compare,
    "st": Workbench.st,
    "euler-exp": Workbench.euler_exp,
    "binom": Workbench.binom,
    "hsum": Workbench.hsum,
    "hprod": Workbench.hprod,
    "ivt": Workbench.ivt,
    "sumthm": Workbench.sumthm,
    "transfer": Workbench.transfer,
    "ultrademo": Workbench.ultrademo,
}


def run_command(command: Command, config: Optional[FieldConfig] = None) -> Outcome:
    """Execute one workbench command; engine errors propagate as BTrackError"""
    return Workbench(command, config).run()


def run_verb(verb: str, body: CommandBody) -> OperationReport:
    """HTTP entry point: the report of one verb, errors propagate"""
    outcome = run_command(Command(verb=verb, **body.model_dump()))
    logger.info(f"🌐 {verb} -> {outcome.report.verdict or 'value'} (exit {outcome.exit_code})")
    return outcome.report
