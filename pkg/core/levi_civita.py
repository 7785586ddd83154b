"""
Levi-Civita Backend
Truncated Levi-Civita numbers: finite sums of c·eps^q with rational exponents,
exact arithmetic, ordering, roots and transcendental evaluation at
near-standard points
"""

import functools
import logging
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from core.errors import DivisionByZero, DomainError, NegativeLeading, NotFinite
from core.numeric import (
    DEFAULT_CONFIG,
    Classification,
    FieldConfig,
    FieldElement,
    Sign,
    Tag,
    format_decimal,
    format_rational,
    quantize,
    real_function,
    root_value,
)

logger = logging.getLogger(__name__)

Term = Tuple[Fraction, Fraction]  # (exponent, coefficient)


@functools.total_ordering
class LCNumber(FieldElement):
    """
    Truncated Levi-Civita number

    terms: exponents strictly increasing, no zero coefficients, at most
    truncation_order entries; zero is the empty tuple. `exact` is False once a
    transcendental base value or an irrational root entered the computation;
    inexact coefficients live on the working-precision binary grid.
    """

    __slots__ = ("terms", "config", "exact")

    def __init__(self, terms: Iterable[Term] = (), config: FieldConfig = DEFAULT_CONFIG,
                 exact: bool = True):
        merged: Dict[Fraction, Fraction] = {}
        for exponent, coefficient in terms:
            exponent = Fraction(exponent)
            merged[exponent] = merged.get(exponent, Fraction(0)) + Fraction(coefficient)
        kept: List[Term] = []
        for exponent in sorted(merged):
            coefficient = merged[exponent]
            if not exact:
                coefficient = quantize(coefficient, config)
            if coefficient != 0:
                kept.append((exponent, coefficient))
            if len(kept) == config.truncation_order:
                break
        self.terms: Tuple[Term, ...] = tuple(kept)
        self.config = config
        self.exact = exact

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def constant(cls, value, config: FieldConfig = DEFAULT_CONFIG, exact: bool = True) -> "LCNumber":
        return cls([(Fraction(0), Fraction(value))], config, exact)

    @classmethod
    def epsilon(cls, config: FieldConfig = DEFAULT_CONFIG, exponent=1) -> "LCNumber":
        """The positive infinitesimal eps^exponent (exponent < 0 gives H = eps^-1 and its powers)"""
        return cls([(Fraction(exponent), Fraction(1))], config)

    def _make(self, terms: Iterable[Term], exact: bool) -> "LCNumber":
        return LCNumber(terms, self.config, exact)

    def _coerce(self, other) -> Optional["LCNumber"]:
        if isinstance(other, LCNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return LCNumber.constant(other, self.config)
        return None

    # ------------------------------------------------------------------
    # inspection
    # ------------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def leading(self) -> Optional[Term]:
        return self.terms[0] if self.terms else None

    def coefficient(self, exponent) -> Fraction:
        exponent = Fraction(exponent)
        for e, c in self.terms:
            if e == exponent:
                return c
        return Fraction(0)

    def max_coefficient(self) -> Fraction:
        return max((abs(c) for _, c in self.terms), default=Fraction(0))

    # ------------------------------------------------------------------
    # field operations
    # ------------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._make(self.terms + other.terms, self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return self._make([(e, -c) for e, c in self.terms], self.exact)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        products = [(ea + eb, ca * cb) for ea, ca in self.terms for eb, cb in other.terms]
        return self._make(products, self.exact and other.exact)

    __rmul__ = __mul__

    def scale(self, factor: Fraction, shift: Fraction = Fraction(0), exact: bool = True) -> "LCNumber":
        """factor · eps^shift · self"""
        return self._make([(e + shift, c * factor) for e, c in self.terms], self.exact and exact)

    def inverse(self) -> "LCNumber":
        """
        1/self by leading-term factorization

        self = c·eps^e·(1 + u) with u infinitesimal, so
        1/self = c^-1·eps^-e·(1 - u + u^2 - ...), truncated.
        """
        lead = self.leading()
        if lead is None:
            raise DivisionByZero("division by the zero Levi-Civita number")
        e, c = lead
        u = self.scale(1 / c, -e) - 1
        series = self._series(u, _geometric_coefficients())
        return series.scale(1 / c, -e)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent):
        if isinstance(exponent, Fraction) and exponent.denominator == 1:
            exponent = int(exponent)
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = LCNumber.constant(1, self.config)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # ------------------------------------------------------------------
    # ordering
    # ------------------------------------------------------------------

    def sign(self) -> int:
        lead = self.leading()
        if lead is None:
            return 0
        return 1 if lead[1] > 0 else -1

    def cmp(self, other) -> int:
        """Sign of the leading (smallest-exponent) coefficient of self - other"""
        other = self._coerce(other)
        return (self - other).sign()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        if not self.terms:
            return hash(Fraction(0))
        if len(self.terms) == 1 and self.terms[0][0] == 0:
            return hash(self.terms[0][1])
        return hash(self.terms)

    # ------------------------------------------------------------------
    # numeric-core contract
    # ------------------------------------------------------------------

    def classify(self) -> Classification:
        lead = self.leading()
        if lead is None:
            return Classification.zero()
        exponent, coefficient = lead
        if exponent > 0:
            tag = Tag.INFINITESIMAL
        elif exponent < 0:
            tag = Tag.INFINITE
        else:
            tag = Tag.APPRECIABLE
        return Classification(tag, Sign.of(coefficient))

    def standard_part(self) -> Fraction:
        lead = self.leading()
        if lead is not None and lead[0] < 0:
            raise NotFinite(f"{self} is infinite")
        return self.coefficient(0)

    def order(self) -> Optional[Fraction]:
        lead = self.leading()
        return None if lead is None else lead[0]

    # ------------------------------------------------------------------
    # roots and transcendental functions
    # ------------------------------------------------------------------

    def _series(self, u: "LCNumber", coefficients: Iterator[Tuple[Fraction, bool]]) -> "LCNumber":
        """
        Sum c_j·u^j for j < truncation_order (u infinitesimal)

        Stops early once u^j starts beyond every retained exponent of a full
        partial sum.
        """
        limit = self.config.truncation_order
        total = LCNumber((), self.config)
        power = LCNumber.constant(1, self.config)
        for j, (coefficient, exact) in enumerate(coefficients):
            if j >= limit or power.is_zero:
                break
            if coefficient != 0:
                total = total + power.scale(coefficient, exact=exact)
            power = power * u
            if (len(total.terms) >= limit and not power.is_zero
                    and power.terms[0][0] > total.terms[-1][0]):
                break
        return total

    def root(self, k: int) -> "LCNumber":
        """k-th root via leading-term factorization and the binomial series"""
        if k < 1:
            raise DomainError(f"root index must be positive, got {k}")
        lead = self.leading()
        if lead is None:
            return self
        exponent, coefficient = lead
        if coefficient < 0:
            if k % 2 == 0:
                raise NegativeLeading(f"even root of {self} with negative leading coefficient")
            return -((-self).root(k))
        base, exact = root_value(coefficient, k, self.config)
        u = self.scale(1 / coefficient, -exponent) - 1
        series = self._series(u, _binomial_coefficients(Fraction(1, k)))
        return series.scale(base, exponent / k, exact=exact)

    def apply(self, name: str) -> "LCNumber":
        if name == "sqrt":
            return self.root(2)
        if name == "abs":
            return -self if self.sign() < 0 else self
        return lc_transcendental(name, self)

    # ------------------------------------------------------------------
    # rendering
    # ------------------------------------------------------------------

    def render(self, decimal: Optional[int] = None) -> str:
        """Display format c0 + c1·eps^(q1) + ..."""
        if not self.terms:
            return "0"
        parts = []
        for index, (exponent, coefficient) in enumerate(self.terms):
            magnitude = abs(coefficient)
            text = format_rational(magnitude) if decimal is None else format_decimal(magnitude, decimal)
            if exponent != 0:
                text = f"{text}·eps^({format_rational(exponent)})"
            if index == 0:
                parts.append(("-" if coefficient < 0 else "") + text)
            else:
                parts.append(("- " if coefficient < 0 else "+ ") + text)
        return " ".join(parts)

    def to_json(self) -> List[List[str]]:
        """Machine format: [exponent, coefficient] string pairs"""
        return [[format_rational(e), format_rational(c)] for e, c in self.terms]

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"LCNumber({self.render()})"


# ============================================================================
# SERIES COEFFICIENTS
# ============================================================================

def _geometric_coefficients() -> Iterator[Tuple[Fraction, bool]]:
    sign = Fraction(1)
    while True:
        yield sign, True
        sign = -sign


def _binomial_coefficients(alpha: Fraction) -> Iterator[Tuple[Fraction, bool]]:
    """C(alpha, j) for j = 0, 1, 2, ..."""
    value = Fraction(1)
    j = 0
    while True:
        yield value, True
        value = value * (alpha - j) / (j + 1)
        j += 1


def _exp_coefficients() -> Iterator[Tuple[Fraction, bool]]:
    value = Fraction(1)
    j = 0
    while True:
        yield value, True
        j += 1
        value = value / j


def _log1p_coefficients() -> Iterator[Tuple[Fraction, bool]]:
    yield Fraction(0), True
    j = 1
    while True:
        yield Fraction((-1) ** (j + 1), j), True
        j += 1


def _trig_coefficients(odd: bool) -> Iterator[Tuple[Fraction, bool]]:
    """Coefficients of sin(u) (odd=True) or cos(u) (odd=False)"""
    factorial = Fraction(1)
    j = 0
    while True:
        if j > 0:
            factorial *= j
        if (j % 2 == 1) == odd:
            sign = (-1) ** (j // 2)
            yield Fraction(sign) / factorial, True
        else:
            yield Fraction(0), True
        j += 1


# ============================================================================
# OPERATIONS
# ============================================================================

def lc_add(a: LCNumber, b: LCNumber) -> LCNumber:
    return a + b


def lc_neg(a: LCNumber) -> LCNumber:
    return -a


def lc_mul(a: LCNumber, b: LCNumber) -> LCNumber:
    return a * b


def lc_div(a: LCNumber, b: LCNumber) -> LCNumber:
    return a / b


def lc_cmp(a: LCNumber, b: LCNumber) -> int:
    """-1 / 0 / 1 for Less / Equal / Greater"""
    return a.cmp(b)


def lc_root(a: LCNumber, k: int) -> LCNumber:
    return a.root(k)


def lc_transcendental(name: str, x: LCNumber) -> LCNumber:
    """
    exp / log / sin / cos at a finite Levi-Civita number

    Writes x = a + u with a = st(x) and u infinitesimal and sums the Taylor
    series of the function at a in powers of u. Infinite arguments are rejected.
    """
    lead = x.leading()
    if lead is not None and lead[0] < 0:
        raise NotFinite(f"{name} is not evaluated at the infinite element {x}")
    config = x.config
    a = x.coefficient(0)
    u = x - a

    if name == "exp":
        base, exact = real_function("exp", a, config)
        return x._series(u, _exp_coefficients()).scale(base, exact=exact)

    if name == "log":
        if a <= 0:
            raise DomainError(f"log needs a positive standard part, got {format_rational(a)}")
        base, exact = real_function("log", a, config)
        tail = x._series(u.scale(1 / a), _log1p_coefficients())
        return tail + LCNumber.constant(base, config, exact)

    if name in ("sin", "cos"):
        sin_a, sin_exact = real_function("sin", a, config)
        cos_a, cos_exact = real_function("cos", a, config)
        cos_u = x._series(u, _trig_coefficients(odd=False))
        sin_u = x._series(u, _trig_coefficients(odd=True))
        if name == "sin":
            return cos_u.scale(sin_a, exact=sin_exact) + sin_u.scale(cos_a, exact=cos_exact)
        return cos_u.scale(cos_a, exact=cos_exact) - sin_u.scale(sin_a, exact=sin_exact)

    raise DomainError(f"unknown function '{name}'")
