"""
Hyperfinite Procedures
Sums and products indexed 1..N for an infinite hyperinteger N, Euler's
exponential and binomial passages, and the remainder probe for series of
continuous functions at points infinitely close to a standard point
"""

import logging
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable, List, Optional

import mpmath

from core.asymptotics import AsymptoticUnsupported, Expansion
from core.errors import BTrackError, DomainError, Undecided
from core.expr import Div, Expr, Mul, Pow, Sub, constant, evaluate, free_variables, parse, to_text
from core.numeric import (
    DEFAULT_CONFIG,
    Classification,
    FieldConfig,
    Tag,
    format_rational,
    power_value,
    to_fraction,
    to_mpf,
)
from core.omega import HyperNat, HyperSeq, TailPattern

logger = logging.getLogger(__name__)

# ============================================================================
# CUMULATIVE TERMS
# ============================================================================

class _Cumulative:
    """
    Running sums or products of a_1, a_2, ... extended on demand

    values[m] is the aggregate of the first m terms.
    """

    def __init__(self, term: Callable[[int], Fraction], product: bool):
        self.term = term
        self.product = product
        self.values: List[Fraction] = [Fraction(1) if product else Fraction(0)]
        self._lock = threading.Lock()

    def upto(self, m: int) -> Fraction:
        with self._lock:
            while len(self.values) <= m:
                k = len(self.values)
                a = self.term(k)
                last = self.values[-1]
                self.values.append(last * a if self.product else last + a)
            return self.values[m]


def _term_rule(a_k: Expr, config: FieldConfig) -> Callable[[int], Fraction]:
    def term(k: int) -> Fraction:
        return evaluate(a_k, {"k": Fraction(k)}, config)

    return term


def _check_term_rule(a_k: Expr):
    extra = free_variables(a_k) - {"k"}
    if extra:
        raise DomainError(f"term rule {to_text(a_k)} may only use k (found {', '.join(sorted(extra))})")


# ============================================================================
# TAIL CORRECTIONS
# ============================================================================

def _tail_correction(a_k: Expr, config: FieldConfig):
    """
    Estimate of sum_{k > N} a_k from the asymptotic expansion of a_k

    Power terms c*k^p (p < -1) use the midpoint integral from N + 1/2;
    geometric terms c*beta^k (beta < 1) are summed in closed form.
    Returns (pattern name, correction in N) or ("none", None).
    """
    try:
        cert = evaluate(a_k, {"k": Expansion.index(config)}, config)
    except (AsymptoticUnsupported, BTrackError, ZeroDivisionError):
        return "none", None
    if not isinstance(cert, Expansion) or not cert.terms or cert.horizon is not None:
        return "none", None

    kinds = set()
    for scale, _ in cert.terms:
        if scale.q != 0:
            return "none", None
        if scale.beta == 1 and scale.p < -1:
            kinds.add("power-tail")
        elif 0 < scale.beta < 1 and scale.p == 0:
            kinds.add("geometric-tail")
        else:
            return "none", None
    terms = list(cert.terms)

    def correction(N: int) -> Fraction:
        total = Fraction(0)
        with mpmath.workdps(config.mp_dps):
            for scale, c in terms:
                if scale.beta == 1:
                    p = scale.p
                    midpoint = to_mpf(Fraction(2 * N + 1, 2))
                    total += c * to_fraction(mpmath.power(midpoint, to_mpf(p + 1))) / (-p - 1)
                else:
                    tail, _ = power_value(scale.beta, N + 1, config)
                    total += c * tail / (1 - scale.beta)
        return total

    return "+".join(sorted(kinds)), correction


# ============================================================================
# HYPERFINITE SUMS AND PRODUCTS
# ============================================================================

def _hyperfinite(a_k: Expr, N: HyperNat, product: bool, config: FieldConfig) -> HyperSeq:
    _check_term_rule(a_k)
    cumulative = _Cumulative(_term_rule(a_k, config), product)

    def rule(n: int) -> Fraction:
        return cumulative.upto(N.value(n))

    pattern, correction = ("none", None) if product else _tail_correction(a_k, config)
    tail = None
    if correction is not None:
        tail = lambda n: correction(N.value(n))

    symbol = "prod" if product else "sum"
    label = f"{symbol}(k=1..{N.label}) {to_text(a_k)}"
    horizon = N.index_horizon(config.hyperfinite_horizon)
    seq = HyperSeq(rule, None, config, horizon=horizon, tail_correction=tail, tail_pattern=pattern, label=label)
    seq.check_tail(f"hyperfinite {symbol}")
    logger.info(f"🧮 {label}: {horizon} probe horizon, tail correction {pattern}")
    return seq


def hyperfinite_sum(a_k, N: Optional[HyperNat] = None, config: FieldConfig = DEFAULT_CONFIG) -> HyperSeq:
    """
    Sequence whose term n is a_1 + ... + a_N(n)

    Args:
        a_k: rule in k (expression or source text)
        N: infinite hyperinteger, the identity <n> by default

    Returns:
        A lazy, memoized HyperSeq carrying a tail correction when the term
        rule has a summable power or geometric profile
    """
    a_k = parse(a_k) if isinstance(a_k, str) else a_k
    return _hyperfinite(a_k, N or HyperNat.identity(config), False, config)


def hyperfinite_product(a_k, N: Optional[HyperNat] = None, config: FieldConfig = DEFAULT_CONFIG) -> HyperSeq:
    """Sequence whose term n is a_1 * ... * a_N(n)"""
    a_k = parse(a_k) if isinstance(a_k, str) else a_k
    return _hyperfinite(a_k, N or HyperNat.identity(config), True, config)


# ============================================================================
# EULER'S EXPONENTIAL AND BINOMIAL EXPANSION
# ============================================================================

@dataclass
class EulerExpReport:
    sequence: HyperSeq
    st_estimate: Fraction
    oracle: Fraction
    deviation: Fraction
    pattern: str
    within_tolerance: bool
    exact: bool = False


def euler_exp(k: Fraction, z: Fraction, N: Optional[HyperNat] = None,
              config: FieldConfig = DEFAULT_CONFIG) -> EulerExpReport:
    """
    (1 + kz/N)^N and its standard part beside exp(kz)

    Raises Undecided when the limit estimate does not stabilize.
    """
    N = N or HyperNat.identity(config)
    kz = Fraction(k) * Fraction(z)
    with mpmath.workdps(config.mp_dps):
        oracle = to_fraction(mpmath.exp(to_mpf(kz)))

    if kz == 0:
        seq = HyperSeq.constant(1, config)
        seq.label = f"(1 + 0/{N.label})^{N.label}"
    else:
        def rule(n: int) -> Fraction:
            m = N.value(n)
            return power_value(1 + kz / m, m, config)[0]

        seq = HyperSeq(rule, None, config, label=f"(1 + {format_rational(kz)}/{N.label})^{N.label}")

    pattern = seq.analyze()
    if pattern.limit is None:
        raise Undecided(f"{seq.label}: no standard part by the cutoff")
    deviation = abs(pattern.limit - oracle)
    within = deviation < config.st_tolerance
    logger.info(f"🌀 {seq.label} ~ {float(pattern.limit):.12g} (exp oracle deviation {float(deviation):.3g})")
    return EulerExpReport(seq, pattern.limit, oracle, deviation, pattern.name, within, pattern.exact)


@dataclass
class BinomialTerm:
    r: int
    sequence: HyperSeq
    st: Fraction
    exact: bool
    oracle: Fraction

    @property
    def matches(self) -> bool:
        return self.st == self.oracle if self.exact else abs(self.st - self.oracle) < self.sequence.config.st_tolerance


def euler_binomial_expand(k: Fraction, z: Fraction, N: Optional[HyperNat] = None, m: int = 4,
                          config: FieldConfig = DEFAULT_CONFIG) -> List[BinomialTerm]:
    """
    The first m terms C(N, r) * (kz/N)^r of the binomial expansion of
    (1 + kz/N)^N, each with its standard part and the oracle (kz)^r / r!
    """
    N = N or HyperNat.identity(config)
    if m < 1:
        raise DomainError("the number of binomial terms must be positive")
    floor = N.value(N.seq.probe_indices()[0])
    if m > floor:
        raise DomainError(f"{m} terms exceed the smallest probed value {floor} of {N.label}")
    kz = Fraction(k) * Fraction(z)

    terms: List[BinomialTerm] = []
    for r in range(m):
        oracle = kz ** r / factorial(r)
        seq = _binomial_term(kz, r, N, config)
        pattern = seq.analyze()
        if pattern.limit is None:
            raise Undecided(f"binomial term {r} has no standard part by the cutoff")
        terms.append(BinomialTerm(r, seq, pattern.limit, pattern.exact, oracle))
    return terms


def _binomial_term(kz: Fraction, r: int, N: HyperNat, config: FieldConfig) -> HyperSeq:
    def rule(n: int) -> Fraction:
        size = N.value(n)
        return comb(size, r) * (kz / size) ** r

    expr = None
    if N.seq.expr is not None:
        # n(n-1)...(n-r+1) * (kz)^r / r! / n^r with n -> N
        big = N.seq.expr
        expr = constant(kz ** r / factorial(r))
        for i in range(r):
            expr = Mul(expr, Sub(big, constant(Fraction(i))) if i else big)
        if r:
            expr = Div(expr, Pow(big, Fraction(r)))
    label = f"C({N.label}, {r}) * ({format_rational(kz)}/{N.label})^{r}"
    return HyperSeq(rule, expr, config, label=label)


# ============================================================================
# SUM THEOREM PROBE
# ============================================================================

UNIFORM_EVIDENCE = "UniformEvidence"
NON_UNIFORM_WITNESS = "NonUniformWitness"
SUM_UNDECIDED = "Undecided"

_RECIPROCAL_OFFSET = re.compile(
    r"^\s*(?P<sign>[+-])\s*(?P<q>\d+(?:\.\d+)?(?:/\d+)?)?\s*(?:\*\s*\(\s*1\s*/\s*N\s*\)|/\s*N)\s*$"
)


@dataclass
class SumTheoremReport:
    series_term: Expr
    probe_point: str
    remainder: Optional[HyperSeq]
    remainder_class: Optional[Classification]
    remainder_st: Optional[Fraction]
    verdict: str
    pattern: str = ""
    note: str = ""
    probes: List[int] = field(default_factory=list)


def _hyper_point(x0: Fraction, offset: str, N: HyperNat, config: FieldConfig):
    """(label, n -> x*(n)) for the offset forms +-q/N, +-q*(1/N) or a rule in n"""
    match = _RECIPROCAL_OFFSET.match(offset)
    if match:
        q = Fraction(match.group("q") or 1)
        if match.group("sign") == "-":
            q = -q
        label = f"{format_rational(x0)} {'-' if q < 0 else '+'} {format_rational(abs(q))}/{N.label}"
        return label, lambda n: x0 + q / N.value(n)

    rule = offset.strip()
    if rule.startswith("+"):
        rule = rule[1:]
    seq = HyperSeq.from_expr(rule, config)
    try:
        tag = seq.classify().tag
    except Undecided as exc:
        raise DomainError(f"offset {seq.label} is not recognisably infinitesimal ({exc.message})") from exc
    if tag not in (Tag.INFINITESIMAL, Tag.ZERO):
        raise DomainError(f"offset {seq.label} is not infinitesimal, so the probe point is not next to "
                          f"{format_rational(x0)}")
    return f"{format_rational(x0)} + {seq.label}", lambda n: x0 + seq.term(n)


def _series_tail(u: Expr, x: Fraction, start: int, config: FieldConfig) -> Fraction:
    """sum_{k >= start} u_k(x) in working precision"""
    with mpmath.workdps(config.mp_dps):
        point = to_mpf(x)

        def summand(k):
            return evaluate(u, {"k": Fraction(int(k)), "x": point}, config)

        value = mpmath.nsum(summand, [start, mpmath.inf])
        if not mpmath.isfinite(value):
            raise DomainError(f"series of {to_text(u)} diverges at x = {format_rational(x)}")
        return to_fraction(value)


def sum_theorem_probe(u_k, x0: Fraction, offset: str = "-1/N", N: Optional[HyperNat] = None,
                      config: FieldConfig = DEFAULT_CONFIG) -> SumTheoremReport:
    """
    Remainder of a series of continuous functions at a point next to x0

    The remainder S(x*) - S_N(x*) is evaluated at index n as the tail of the
    series from N(n) + 1 at x*(n). An appreciable or infinite remainder
    witnesses non-uniform convergence; an infinitesimal one across the probes
    is evidence of uniformity.
    """
    u = parse(u_k) if isinstance(u_k, str) else u_k
    extra = free_variables(u) - {"k", "x"}
    if extra:
        raise DomainError(f"series term {to_text(u)} may only use k and x (found {', '.join(sorted(extra))})")
    N = N or HyperNat.identity(config)
    x0 = Fraction(x0)
    point_label, point = _hyper_point(x0, offset, N, config)

    def rule(n: int) -> Fraction:
        return _series_tail(u, point(n), N.value(n) + 1, config)

    horizon = N.index_horizon(config.hyperfinite_horizon)
    remainder = HyperSeq(rule, None, config, horizon=horizon, label=f"R_N({point_label})")
    remainder.check_tail("remainder")
    probes = remainder.probe_indices()

    try:
        pattern: TailPattern = remainder.analyze()
    except Undecided as exc:
        logger.info(f"📉 sum theorem probe of {to_text(u)} at {point_label}: Undecided")
        return SumTheoremReport(u, point_label, remainder, None, None, SUM_UNDECIDED, "unmatched", exc.message, probes)

    classification = pattern.classification
    if classification.tag in (Tag.APPRECIABLE, Tag.INFINITE):
        verdict = NON_UNIFORM_WITNESS
    else:
        verdict = UNIFORM_EVIDENCE
    logger.info(f"📉 sum theorem probe of {to_text(u)} at {point_label}: {verdict}")
    return SumTheoremReport(u, point_label, remainder, classification, pattern.limit, verdict, pattern.name, "",
                            probes)
