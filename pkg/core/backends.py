"""
Backend Registry
Uniform access to the three ordered-field backends: embedding of rationals,
point parsing, infinitesimal probe sets and comparison
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Type

from core.errors import DomainError, NotFinite, Undecided, UnsupportedBackend
from core.expr import evaluate, parse
from core.levi_civita import LCNumber
from core.numeric import DEFAULT_CONFIG, Classification, FieldConfig, Tag, classify, order, st
from core.omega import AgreementPolicy, HyperSeq, hs_compare
from core.ratfunc import RatFuncElem

logger = logging.getLogger(__name__)

Probe = Tuple[str, object]  # (label, infinitesimal element)


@dataclass
class StandardValue:
    value: Fraction
    exact: bool


@dataclass
class ComparisonOutcome:
    verdict: str
    probe_indices: List[int]
    exception_set: List[int]
    dominance_pattern: str


class Backend(ABC):
    """One ordered field extending the rationals"""

    name = ""

    def __init__(self, config: FieldConfig = DEFAULT_CONFIG):
        self.config = config

    @abstractmethod
    def embed(self, q: Fraction):
        """The rational q as a standard element"""

    @abstractmethod
    def parse_point(self, text: str):
        """An element written in the expression grammar"""

    @abstractmethod
    def derivative_probes(self) -> List[Probe]:
        ...

    @abstractmethod
    def continuity_probes(self) -> List[Probe]:
        ...

    @abstractmethod
    def default_transfer_points(self) -> List[str]:
        ...

    def standard_value(self, x) -> StandardValue:
        return StandardValue(st(x), True)

    def classify(self, x) -> Classification:
        return classify(x)

    def order(self, x) -> Optional[Fraction]:
        return order(x)

    def compare(self, a, b) -> ComparisonOutcome:
        sign = (a - b).sign()
        verdict = {-1: "Less", 0: "Equal", 1: "Greater"}[sign]
        return ComparisonOutcome(verdict, [], [], "leading-coefficient")

    def agreement_tolerance(self) -> Fraction:
        """How far two standard parts may differ and still count as equal"""
        return self.config.noise_floor

    def magnitude(self, x) -> Fraction:
        """Largest coefficient / term size, used by transfer checks"""
        return abs(Fraction(x))


class LeviCivitaBackend(Backend):
    name = "lc"

    def embed(self, q: Fraction) -> LCNumber:
        return LCNumber.constant(q, self.config)

    def eps(self, exponent=1) -> LCNumber:
        return LCNumber.epsilon(self.config, exponent)

    def parse_point(self, text: str) -> LCNumber:
        value = evaluate(parse(text), {"x": self.eps()}, self.config)
        return value if isinstance(value, LCNumber) else self.embed(value)

    def derivative_probes(self) -> List[Probe]:
        eps = self.eps()
        return [("eps", eps), ("-eps", -eps), ("2*eps", eps * 2), ("eps^2", self.eps(2))]

    def continuity_probes(self) -> List[Probe]:
        eps = self.eps()
        return [
            ("eps", eps),
            ("-eps", -eps),
            ("2*eps", eps * 2),
            ("eps^2", self.eps(2)),
            ("eps^(1/2)", self.eps(Fraction(1, 2))),
        ]

    def default_transfer_points(self) -> List[str]:
        return ["x", "1+x", "1/3+2*x^2", "2", "1/2"]

    def standard_value(self, x) -> StandardValue:
        if isinstance(x, LCNumber):
            return StandardValue(x.standard_part(), x.exact)
        return StandardValue(st(x), True)

    def magnitude(self, x) -> Fraction:
        if isinstance(x, LCNumber):
            return x.max_coefficient()
        return abs(Fraction(x))


class OmegaBackend(Backend):
    name = "omega"

    def embed(self, q: Fraction) -> HyperSeq:
        return HyperSeq.constant(q, self.config)

    def parse_point(self, text: str) -> HyperSeq:
        return HyperSeq.from_expr(text, self.config)

    def derivative_probes(self) -> List[Probe]:
        return [(f"<{rule}>", HyperSeq.from_expr(rule, self.config)) for rule in ("1/n", "-1/n", "2/n", "1/n^2")]

    def continuity_probes(self) -> List[Probe]:
        rules = ("1/n", "-1/n", "1/n^2", "1/log(n+1)")
        return [(f"<{rule}>", HyperSeq.from_expr(rule, self.config)) for rule in rules]

    def default_transfer_points(self) -> List[str]:
        return ["1/n", "1+1/n", "n"]

    def standard_value(self, x) -> StandardValue:
        if isinstance(x, HyperSeq):
            pattern = x.analyze()
            if pattern.classification.tag is Tag.INFINITE:
                raise NotFinite(f"{x.label} is infinite")
            if pattern.limit is None:
                raise Undecided(f"{x.label}: no limit estimate")
            return StandardValue(pattern.limit, pattern.exact)
        return StandardValue(st(x), True)

    def compare(self, a, b) -> ComparisonOutcome:
        a = a if isinstance(a, HyperSeq) else self.embed(a)
        b = b if isinstance(b, HyperSeq) else self.embed(b)
        result = hs_compare(a, b, AgreementPolicy.from_config(self.config))
        return ComparisonOutcome(result.verdict.value, result.probe_indices, result.exception_set,
                                 result.dominance_pattern)

    def agreement_tolerance(self) -> Fraction:
        return max(self.config.noise_floor, 2 * self.config.st_tolerance)

    def magnitude(self, x) -> Fraction:
        if isinstance(x, HyperSeq):
            return max((abs(x.term(n)) for n in x.probe_indices()), default=Fraction(0))
        return abs(Fraction(x))


class RatFuncBackend(Backend):
    name = "ratfunc"

    def embed(self, q: Fraction) -> RatFuncElem:
        return RatFuncElem.constant(q, self.config)

    def parse_point(self, text: str) -> RatFuncElem:
        value = evaluate(parse(text), {"x": RatFuncElem.generator(self.config)}, self.config)
        return value if isinstance(value, RatFuncElem) else self.embed(value)

    def _inverse_powers(self) -> List[Probe]:
        x = RatFuncElem.generator(self.config)
        return [("1/x", 1 / x), ("-1/x", -1 / x), ("2/x", 2 / x), ("1/x^2", 1 / (x * x))]

    def derivative_probes(self) -> List[Probe]:
        return self._inverse_powers()

    def continuity_probes(self) -> List[Probe]:
        return self._inverse_powers()

    def default_transfer_points(self) -> List[str]:
        return ["x"]

    def magnitude(self, x) -> Fraction:
        if isinstance(x, RatFuncElem):
            return max((abs(c) for c in x.num), default=Fraction(0))
        return abs(Fraction(x))


BACKENDS: Dict[str, Type[Backend]] = {
    "lc": LeviCivitaBackend,
    "omega": OmegaBackend,
    "ratfunc": RatFuncBackend,
}


def get_backend(name: str, config: FieldConfig = DEFAULT_CONFIG) -> Backend:
    if name not in BACKENDS:
        raise UnsupportedBackend(f"unknown backend '{name}' (choose one of {', '.join(BACKENDS)})")
    logger.debug(f"🔌 {name} backend, truncation {config.truncation_order}, cutoff {config.sequence_cutoff}")
    return BACKENDS[name](config)


def parse_rational(text: str) -> Fraction:
    """A standard point such as 3, -1/2 or 0.25"""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError, AttributeError) as exc:
        raise DomainError(f"'{text}' is not a rational number", "write points as p, p/q or a decimal") from exc
