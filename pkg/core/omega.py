"""
Sequence Backend
Hyperreal representatives as rational sequences with termwise arithmetic,
eventual-agreement comparison over the cofinite (Frechet) filter and explicit
Undecided verdicts wherever only a free ultrafilter would decide
"""

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Literal, Optional, Tuple

import mpmath
from pydantic import BaseModel, ConfigDict, Field

from core.asymptotics import AsymptoticUnsupported, Expansion
from core.errors import (
    BTrackError,
    DivisionByZero,
    DomainError,
    NotCauchy,
    NotEventuallyNonzero,
    NotFinite,
    Undecided,
)
from core.expr import BinOp, Call, Expr, Neg, Pow, Var, constant, evaluate, parse, substitute, to_text
from core.numeric import (
    DEFAULT_CONFIG,
    Classification,
    FieldConfig,
    FieldElement,
    Sign,
    Tag,
    format_decimal,
    power_value,
    root_value,
    to_fraction,
    to_mpf,
)

logger = logging.getLogger(__name__)

Rule = Callable[[int], Fraction]
TailCorrection = Callable[[int], Fraction]

# ============================================================================
# AGREEMENT POLICY
# ============================================================================

class AgreementPolicy(BaseModel):
    """Agreement on cofinite index sets, examined up to `cutoff`"""

    model_config = ConfigDict(frozen=True)

    mode: Literal["FrechetFilter"] = "FrechetFilter"
    cutoff: int = Field(2 ** 20, ge=1)

    @classmethod
    def from_config(cls, config: FieldConfig) -> "AgreementPolicy":
        return cls(cutoff=config.sequence_cutoff)


# ============================================================================
# TAIL ANALYSIS
# ============================================================================

@dataclass(frozen=True)
class TailPattern:
    """
    Outcome of the tail analysis of one sequence

    name: the dominance pattern that matched (an asymptotic certificate or
    one of zero-tail / monotone-divergent / numeric-limit)
    """

    name: str
    classification: Classification
    limit: Optional[Fraction] = None
    certified: bool = False
    exact: bool = False


MIN_PROBE_LEVELS = 4


def _richardson(values: List) -> Tuple[object, object]:
    """
    Richardson table over values at n = 2^j (error expanding in powers of 1/n)

    Returns (estimate, diff) for the column whose last two entries agree best.
    """
    table = [list(values)]
    best = (values[-1], abs(values[-1] - values[-2]))
    m = 0
    while len(table[-1]) > 2:
        m += 1
        previous = table[-1]
        factor = mpmath.mpf(2) ** m
        column = [(factor * previous[i + 1] - previous[i]) / (factor - 1) for i in range(len(previous) - 1)]
        table.append(column)
        diff = abs(column[-1] - column[-2])
        if diff < best[1]:
            best = (column[-1], diff)
    return best


def _sign_suffix(signs: List[int]) -> Tuple[int, int]:
    """(sign, length) of the longest constant-sign run ending at the last probe"""
    if not signs:
        return 0, 0
    last = signs[-1]
    length = 0
    for s in reversed(signs):
        if s != last:
            break
        length += 1
    return last, length


# ============================================================================
# HYPERSEQ
# ============================================================================

class HyperSeq(FieldElement):
    """
    Sequence-model hyperreal representative

    rule maps n >= 1 to a rational term; `expr` (a rule in n) enables the
    asymptotic certificate. Terms where the rule fails are patched to 0 and
    recorded; finitely many such exceptions never change a verdict.
    """

    def __init__(self, rule: Rule, expr: Optional[Expr] = None, config: FieldConfig = DEFAULT_CONFIG,
                 exceptions: Iterable[int] = (), overrides: Optional[Dict[int, Fraction]] = None,
                 horizon: Optional[int] = None, tail_correction: Optional[TailCorrection] = None,
                 tail_pattern: str = "none", label: Optional[str] = None):
        self.rule = rule
        self.expr = expr
        self.config = config
        self.overrides: Dict[int, Fraction] = dict(overrides or {})
        self.horizon = horizon
        self.tail_correction = tail_correction
        self.tail_pattern = tail_pattern
        self.label = label or (f"<{to_text(expr)}>" if expr is not None else "<sequence>")
        self._exceptions = set(exceptions) | set(self.overrides)
        self._cache: Dict[int, Fraction] = {}
        self._lock = threading.Lock()
        self._certificate: Optional[Expansion] = None
        self._certificate_done = False

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_expr(cls, source, config: FieldConfig = DEFAULT_CONFIG) -> "HyperSeq":
        """
        Sequence from a rule in the index variable n

        The rule must be defined at every probed index.
        """
        expr = parse(source) if isinstance(source, str) else source
        seq = cls(_expr_rule(expr, config), expr, config)
        seq.check_tail("rule")
        return seq

    @classmethod
    def constant(cls, value, config: FieldConfig = DEFAULT_CONFIG) -> "HyperSeq":
        value = Fraction(value)
        return cls(lambda n: value, constant(value), config)

    @classmethod
    def index(cls, config: FieldConfig = DEFAULT_CONFIG) -> "HyperSeq":
        return cls(lambda n: Fraction(n), Var("n"), config)

    def _derived(self, rule: Rule, expr: Optional[Expr], exceptions: Iterable[int] = (),
                 horizon: Optional[int] = None, **kwargs) -> "HyperSeq":
        return HyperSeq(rule, expr, self.config, exceptions, horizon=horizon, **kwargs)

    # ------------------------------------------------------------------
    # terms
    # ------------------------------------------------------------------

    def term(self, n: int) -> Fraction:
        """Term n (memoized); failing terms are patched to 0 and recorded"""
        if n in self.overrides:
            return self.overrides[n]
        with self._lock:
            if n in self._cache:
                return self._cache[n]
        try:
            value = self.rule(n)
        except (DivisionByZero, DomainError) as exc:
            logger.debug(f"🩹 {self.label}: term {n} patched to 0 ({exc.name})")
            value = Fraction(0)
            with self._lock:
                self._exceptions.add(n)
        with self._lock:
            self._cache[n] = value
        return value

    def __call__(self, n: int) -> Fraction:
        return self.term(n)

    @property
    def exceptions(self) -> FrozenSet[int]:
        with self._lock:
            return frozenset(self._exceptions)

    def probe_indices(self, cutoff: Optional[int] = None) -> List[int]:
        """Indices 2^j - 1 and 2^j up to the cutoff, past every recorded exception"""
        limit = cutoff or self.config.sequence_cutoff
        if self.horizon is not None:
            limit = min(limit, self.horizon)
        floor = max(self.exceptions, default=0)
        j = max(3, floor.bit_length())
        indices: List[int] = []
        while 2 ** j <= limit:
            for n in (2 ** j - 1, 2 ** j):
                if n > floor:
                    indices.append(n)
            j += 1
        return indices

    def check_tail(self, what: str, error=DomainError):
        """Evaluate every probe strictly; failures there are not finite exceptions"""
        for n in self.probe_indices():
            if n in self.overrides:
                continue
            try:
                value = self.rule(n)
            except (DivisionByZero, DomainError) as exc:
                raise error(f"{what} {self.label} is undefined at tail index {n}: {exc.message}") from exc
            with self._lock:
                self._cache[n] = value

    # ------------------------------------------------------------------
    # certificate and tail analysis
    # ------------------------------------------------------------------

    def certificate(self) -> Optional[Expansion]:
        """Asymptotic expansion of the rule, or None when no pattern matches"""
        with self._lock:
            if self._certificate_done:
                return self._certificate
        cert = None
        if self.expr is not None:
            try:
                cert = evaluate(self.expr, {"n": Expansion.index(self.config)}, self.config)
                if not isinstance(cert, Expansion):
                    cert = Expansion.constant(cert, self.config)
            except (AsymptoticUnsupported, BTrackError, ZeroDivisionError) as exc:
                logger.debug(f"🔍 {self.label}: no asymptotic certificate ({exc})")
                cert = None
        with self._lock:
            self._certificate = cert
            self._certificate_done = True
        return cert

    def tail_signs(self, cutoff: Optional[int] = None) -> Tuple[List[int], List[int]]:
        indices = self.probe_indices(cutoff)
        signs = []
        for n in indices:
            value = self.term(n)
            signs.append((value > 0) - (value < 0))
        return indices, signs

    def analyze(self, cutoff: Optional[int] = None) -> TailPattern:
        """
        Classify the tail

        Uses the asymptotic certificate when one exists (its sign must agree
        with a constant-sign run of samples ending at the cutoff); otherwise
        falls back to the numeric patterns. Raises Undecided when nothing
        matches.
        """
        indices, signs = self.tail_signs(cutoff)
        if len(indices) < 2 * MIN_PROBE_LEVELS - 1:
            raise Undecided(f"{self.label}: too few probe indices below the cutoff")
        cert = self.certificate()
        if cert is not None and cert.certified:
            return self._certified_pattern(cert, signs)
        return self._numeric_pattern(indices, signs)

    def _certified_pattern(self, cert: Expansion, signs: List[int]) -> TailPattern:
        classification = cert.classify()
        sign, run = _sign_suffix(signs)
        if classification.tag is Tag.ZERO:
            if sign != 0 or run != len(signs):
                raise Undecided(f"{self.label}: certificate says zero but sampled terms are not")
            return TailPattern("exact-zero", classification, Fraction(0), True, True)
        expected = 1 if classification.sign is Sign.POSITIVE else -1
        if sign != expected or run < 2:
            raise Undecided(f"{self.label}: sampled signs do not settle to the certified sign by the cutoff")
        limit = None
        if classification.tag is not Tag.INFINITE:
            try:
                limit = cert.limit()
            except AsymptoticUnsupported:
                limit = None
        return TailPattern(cert.pattern(), classification, limit, True, cert.exact)

    def _numeric_pattern(self, indices: List[int], signs: List[int]) -> TailPattern:
        tol = to_mpf(self.config.st_tolerance)
        if all(s == 0 for s in signs):
            return TailPattern("zero-tail", Classification.zero(), Fraction(0))

        with mpmath.workdps(self.config.mp_dps):
            evens, odds = [], []
            for n in indices:
                value = to_mpf(self.term(n))
                if self.tail_correction is not None:
                    value += to_mpf(self.tail_correction(n))
                (evens if n % 2 == 0 else odds).append((n, value))
            even_values = [v for _, v in evens]
            odd_values = [v for _, v in odds]

            divergent = _monotone_divergence(even_values) or 0
            if divergent and _monotone_divergence(odd_values) == divergent:
                sign = Sign.POSITIVE if divergent > 0 else Sign.NEGATIVE
                return TailPattern("monotone-divergent", Classification(Tag.INFINITE, sign))

            estimate, diff = _richardson(even_values)
            odd_by_index = {n: v for n, v in odds}
            gaps = [abs(v - odd_by_index[n - 1]) for n, v in evens if n - 1 in odd_by_index]
            gaps_settle = len(gaps) >= 2 and (gaps[-1] < tol or gaps[-1] < gaps[-2] / 2)
            if diff >= tol or not gaps_settle:
                raise Undecided(
                    f"{self.label}: no cofinite pattern (limit estimate drifts by "
                    f"{mpmath.nstr(diff, 3)}, parity gap {mpmath.nstr(gaps[-1], 3) if gaps else 'n/a'})"
                )
            limit = to_fraction(estimate)

        if abs(limit) >= self.config.st_tolerance:
            classification = Classification(Tag.APPRECIABLE, Sign.of(limit))
            return TailPattern("numeric-limit", classification, limit)
        sign, run = _sign_suffix(signs)
        if sign == 0 or run < 2:
            raise Undecided(f"{self.label}: limit is 0 but the tail sign does not settle")
        classification = Classification(Tag.INFINITESIMAL, Sign.POSITIVE if sign > 0 else Sign.NEGATIVE)
        return TailPattern("numeric-limit", classification, Fraction(0))

    # ------------------------------------------------------------------
    # numeric-core contract
    # ------------------------------------------------------------------

    def classify(self) -> Classification:
        return self.analyze().classification

    def standard_part(self) -> Fraction:
        pattern = self.analyze()
        if pattern.classification.tag is Tag.INFINITE:
            raise NotFinite(f"{self.label} is infinite")
        if pattern.limit is None:
            raise Undecided(f"{self.label}: no limit estimate")
        return pattern.limit

    def order(self) -> Optional[Fraction]:
        cert = self.certificate()
        if cert is None or not cert.certified:
            return None
        return cert.order()

    def apply(self, name: str) -> "HyperSeq":
        return hs_apply(Call(name, Var("x")), self)

    def root(self, k: int) -> "HyperSeq":
        config = self.config

        def rule(n: int) -> Fraction:
            return root_value(self.term(n), k, config)[0]

        expr = None if self.expr is None else Pow(self.expr, Fraction(1, k))
        result = self._derived(rule, expr, self.exceptions, self.horizon)
        result.check_tail("root of")
        return result

    # ------------------------------------------------------------------
    # operators
    # ------------------------------------------------------------------

    def _coerce(self, other) -> Optional["HyperSeq"]:
        if isinstance(other, HyperSeq):
            return other
        if isinstance(other, (int, Fraction)):
            return HyperSeq.constant(other, self.config)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else hs_arith("+", self, other)

    def __radd__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else hs_arith("+", other, self)

    def __sub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else hs_arith("-", self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else hs_arith("-", other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else hs_arith("*", self, other)

    def __rmul__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else hs_arith("*", other, self)

    def __truediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else hs_arith("/", self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else hs_arith("/", other, self)

    def __neg__(self):
        expr = None if self.expr is None else Neg(self.expr)
        correction = self.tail_correction
        return self._derived(lambda n: -self.term(n), expr, self.exceptions, self.horizon,
                             tail_correction=(lambda n: -correction(n)) if correction else None,
                             tail_pattern=self.tail_pattern)

    def __pow__(self, exponent):
        if isinstance(exponent, Fraction) and exponent.denominator == 1:
            exponent = int(exponent)
        if isinstance(exponent, int):
            config = self.config

            def rule(n: int) -> Fraction:
                return power_value(self.term(n), exponent, config)[0]

            expr = None if self.expr is None else Pow(self.expr, Fraction(exponent))
            return self._derived(rule, expr, self.exceptions, self.horizon)
        if isinstance(exponent, HyperSeq):
            return _termwise_power(self, exponent)
        return NotImplemented

    def __rpow__(self, base):
        if isinstance(base, (int, Fraction)):
            return _termwise_power(HyperSeq.constant(base, self.config), self)
        return NotImplemented

    # ------------------------------------------------------------------
    # rendering
    # ------------------------------------------------------------------

    def preview(self, count: int = 4, digits: int = 12) -> List[str]:
        """Decimal rendering of the last `count` probe terms"""
        indices = self.probe_indices()[-count:]
        return [f"n={n}: {format_decimal(self.term(n), digits)}" for n in indices]

    def __str__(self):
        return self.label

    def __repr__(self):
        return f"HyperSeq({self.label})"


def _expr_rule(expr: Expr, config: FieldConfig) -> Rule:
    def rule(n: int) -> Fraction:
        return evaluate(expr, {"n": Fraction(n)}, config)

    return rule


def _monotone_divergence(values: List) -> Optional[int]:
    """+1 / -1 when the values move one way with non-shrinking increments"""
    if len(values) < MIN_PROBE_LEVELS:
        return None
    steps = [b - a for a, b in zip(values, values[1:])]
    for direction in (1, -1):
        oriented = [direction * s for s in steps]
        if all(s > 0 for s in oriented) and all(b >= a for a, b in zip(oriented, oriented[1:])):
            return direction
    return None


def _termwise_power(base: HyperSeq, exponent: HyperSeq) -> HyperSeq:
    config = base.config

    def rule(n: int) -> Fraction:
        e = exponent.term(n)
        if e.denominator != 1:
            raise DomainError(f"exponent term {e} is not an integer")
        return power_value(base.term(n), int(e), config)[0]

    expr = None
    if base.expr is not None and isinstance(exponent.expr, Var):
        expr = Pow(base.expr, exponent.expr.name)
    horizon = _min_horizon(base.horizon, exponent.horizon)
    return base._derived(rule, expr, base.exceptions | exponent.exceptions, horizon)


def _min_horizon(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ============================================================================
# HYPERNAT
# ============================================================================

class HyperNat:
    """
    Infinite hyperinteger representative: positive integer terms,
    nondecreasing and unbounded on the sampled indices
    """

    def __init__(self, seq: HyperSeq):
        self.seq = seq
        self._validate()

    @classmethod
    def from_expr(cls, source, config: FieldConfig = DEFAULT_CONFIG) -> "HyperNat":
        return cls(HyperSeq.from_expr(source, config))

    @classmethod
    def identity(cls, config: FieldConfig = DEFAULT_CONFIG) -> "HyperNat":
        return cls(HyperSeq.index(config))

    def _validate(self):
        indices = sorted(set(range(1, 17)) | set(self.seq.probe_indices()))
        previous = None
        for n in indices:
            value = self.seq.term(n)
            if value.denominator != 1 or value < 1:
                raise DomainError(f"hyperinteger {self.seq.label} has non-positive-integer term {value} at n={n}")
            if previous is not None and value < previous:
                raise DomainError(f"hyperinteger {self.seq.label} decreases at n={n}")
            previous = value
        cert = self.seq.certificate()
        if cert is not None and cert.certified:
            if cert.classify().tag is not Tag.INFINITE:
                raise DomainError(f"hyperinteger {self.seq.label} is bounded")
        elif self.seq.term(indices[-1]) <= self.seq.term(indices[0]):
            raise DomainError(f"hyperinteger {self.seq.label} does not grow on the sampled indices")

    def value(self, n: int) -> int:
        return int(self.seq.term(n))

    def index_horizon(self, limit: int) -> int:
        """Largest 2^j with N(2^j) <= limit (at least 8)"""
        j = 3
        while self.value(2 ** (j + 1)) <= limit and 2 ** (j + 1) <= self.seq.config.sequence_cutoff:
            j += 1
        return 2 ** j

    @property
    def label(self) -> str:
        return self.seq.label

    def __str__(self):
        return self.seq.label


# ============================================================================
# OPERATIONS
# ============================================================================

_OPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
}


def hs_arith(op: str, a: HyperSeq, b: HyperSeq) -> HyperSeq:
    """
    Termwise a op b

    For division, indices where b vanishes are patched to 0 and recorded;
    b must not vanish on tail probes.
    """
    if op not in ("+", "-", "*", "/"):
        raise DomainError(f"unknown operator '{op}'")
    exceptions = a.exceptions | b.exceptions
    horizon = _min_horizon(a.horizon, b.horizon)
    expr = BinOp(op, a.expr, b.expr) if a.expr is not None and b.expr is not None else None

    if op == "/":
        cert = b.certificate()
        if cert is not None and cert.is_exact_zero:
            raise NotEventuallyNonzero(f"divisor {b.label} is eventually zero")
        for n in b.probe_indices():
            if b.term(n) == 0:
                raise NotEventuallyNonzero(f"divisor {b.label} vanishes at tail index {n}")

        def rule(n: int) -> Fraction:
            divisor = b.term(n)
            if divisor == 0:
                raise DivisionByZero(f"divisor vanishes at n={n}")
            return a.term(n) / divisor

        return a._derived(rule, expr, exceptions, horizon, label=f"({a.label} / {b.label})" if expr is None else None)

    combine = _OPS[op]
    correction = None
    pattern = "none"
    if op in ("+", "-") and (a.tail_correction or b.tail_correction):
        ca = a.tail_correction or (lambda n: Fraction(0))
        cb = b.tail_correction or (lambda n: Fraction(0))
        correction = lambda n: combine(ca(n), cb(n))
        pattern = a.tail_pattern if a.tail_correction else b.tail_pattern

    def rule(n: int) -> Fraction:
        return combine(a.term(n), b.term(n))

    label = None if expr is not None else f"({a.label} {op} {b.label})"
    return a._derived(rule, expr, exceptions, horizon, tail_correction=correction,
                      tail_pattern=pattern, label=label)


def hs_apply(f: Expr, a: HyperSeq) -> HyperSeq:
    """
    Apply a function of x term by term

    Failures on tail probes raise DomainError; earlier ones are patched.
    """
    config = a.config

    def rule(n: int) -> Fraction:
        return evaluate(f, {"x": a.term(n), "n": Fraction(n)}, config)

    expr = substitute(f, "x", a.expr) if a.expr is not None else None
    label = None if expr is not None else f"{to_text(f)} at {a.label}"
    result = a._derived(rule, expr, a.exceptions, a.horizon, label=label)
    result.check_tail("applied function")
    return result


def hs_with_terms(a: HyperSeq, overrides: Dict[int, Fraction]) -> HyperSeq:
    """Change finitely many terms; the changed indices become exceptions"""
    merged = dict(a.overrides)
    merged.update({int(n): Fraction(v) for n, v in overrides.items()})
    return HyperSeq(a.rule, a.expr, a.config, a.exceptions, merged, a.horizon,
                    a.tail_correction, a.tail_pattern, a.label)


class Verdict(str, Enum):
    LESS = "Less"
    GREATER = "Greater"
    EVENTUALLY_EQUAL = "EventuallyEqual"
    UNDECIDED = "Undecided"


@dataclass
class Comparison:
    verdict: Verdict
    probe_indices: List[int]
    exception_set: List[int]
    dominance_pattern: str
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "probe_indices": self.probe_indices,
            "exception_set": self.exception_set,
            "dominance_pattern": self.dominance_pattern,
        }


def hs_compare(a: HyperSeq, b: HyperSeq, policy: Optional[AgreementPolicy] = None) -> Comparison:
    """
    Eventual comparison under the cofinite filter

    Less / Greater need a constant-sign run of a(n) - b(n) ending at the
    cutoff and a dominance pattern confirming it; anything else is Undecided.
    """
    policy = policy or AgreementPolicy.from_config(a.config)
    difference = hs_arith("-", a, b)
    indices = difference.probe_indices(policy.cutoff)
    exceptions = sorted(difference.exceptions)
    try:
        pattern = difference.analyze(policy.cutoff)
    except Undecided as exc:
        logger.info(f"⚖️ {a.label} vs {b.label}: Undecided ({exc.message})")
        return Comparison(Verdict.UNDECIDED, indices, exceptions, "unmatched", exc.message)

    classification = pattern.classification
    if classification.tag is Tag.ZERO:
        verdict = Verdict.EVENTUALLY_EQUAL
    elif pattern.name == "numeric-limit" and classification.tag is Tag.INFINITESIMAL:
        return Comparison(Verdict.UNDECIDED, indices, exceptions, pattern.name,
                          "difference tends to 0 without a certified sign")
    elif classification.sign is Sign.NEGATIVE:
        verdict = Verdict.LESS
    else:
        verdict = Verdict.GREATER
    _, signs = difference.tail_signs(policy.cutoff)
    if verdict is not Verdict.EVENTUALLY_EQUAL:
        sign, run = _sign_suffix(signs)
        if run < 2 or (sign < 0) != (verdict is Verdict.LESS):
            return Comparison(Verdict.UNDECIDED, indices, exceptions, pattern.name,
                              "sampled signs disagree with the dominance pattern")
    return Comparison(verdict, indices, exceptions, pattern.name)


@dataclass
class NullQuotientReport:
    sequence: str
    represented: Fraction
    tolerance: Fraction
    witness: HyperSeq
    witness_class: Optional[Classification]
    witness_certified: bool
    trace: List[str] = field(default_factory=list)


def hs_null_quotient_demo(a: HyperSeq) -> NullQuotientReport:
    """
    Represent a real by a Cauchy sequence modulo null sequences, and set it
    beside the ultrapower reading of the same sequence
    """
    try:
        value = a.standard_part()
    except (Undecided, NotFinite) as exc:
        raise NotCauchy(f"{a.label} does not settle within st_tolerance by the cutoff ({exc.message})") from exc

    witness = hs_arith("-", a, HyperSeq.constant(value, a.config))
    # None when the witness tail has no cofinite sign pattern
    witness_class: Optional[Classification] = None
    certified = False
    try:
        pattern = witness.analyze()
        witness_class = pattern.classification
        certified = pattern.certified
    except Undecided as exc:
        logger.debug(f"🧭 witness {witness.label} undecided: {exc.message}")
    if witness_class is not None and witness_class.tag not in (Tag.ZERO, Tag.INFINITESIMAL):
        raise NotCauchy(f"{a.label} minus its limit estimate is not a null sequence")

    if witness_class is None:
        reading = "undecided (its tail sign has no cofinite pattern)"
    else:
        reading = f"{witness_class.tag.value.lower()} ({'certified' if certified else 'sampled'})"

    shown = format_decimal(value, 12)
    trace = [
        f"Cauchy side: {a.label} lies in the ring of Cauchy sequences of rationals",
        f"null coset witness: {witness.label} is {reading}, so {a.label} plus the null sequences represents the real {shown}",
        f"ultrapower side: {a.label} modulo cofinite agreement is a hyperreal infinitely close to {shown}"
        if witness_class is not None else
        f"ultrapower side: Undecided, no cofinite pattern places {a.label} next to {shown}",
        "same shape: a ring of sequences divided by a maximal ideal; the Cauchy side uses the null sequences, "
        "the ultrapower side needs a free ultrafilter, of which only the cofinite part is computable",
    ]
    logger.info(f"🧭 {a.label} represents {shown}")
    return NullQuotientReport(a.label, value, a.config.st_tolerance, witness, witness_class, certified, trace)
