"""
Rational-Function Backend
Real rational functions ordered by their behaviour at infinity: a proper
non-Archimedean ordered field with no transcendental structure
"""

import functools
import logging
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from core.errors import DegreeOverflow, DivisionByZero, NoTransfer, NotFinite
from core.expr import Add, Div, Expr, Lit, Mul, Pow, Sub, Var, constant, to_text
from core.numeric import (
    DEFAULT_CONFIG,
    Classification,
    FieldConfig,
    FieldElement,
    Sign,
    Tag,
    format_rational,
    real_function,
    root_value,
)

logger = logging.getLogger(__name__)

DEGREE_CAP = 512

Poly = Tuple[Fraction, ...]  # coefficients, lowest degree first; () is zero

# ============================================================================
# DENSE POLYNOMIALS OVER Q
# ============================================================================

def _trim(coefficients: Iterable) -> Poly:
    poly = [Fraction(c) for c in coefficients]
    while poly and poly[-1] == 0:
        poly.pop()
    if len(poly) - 1 > DEGREE_CAP:
        raise DegreeOverflow(f"polynomial degree {len(poly) - 1} exceeds the cap of {DEGREE_CAP}")
    return tuple(poly)


def degree(p: Poly) -> int:
    """Degree; -1 for the zero polynomial"""
    return len(p) - 1


def _add(p: Poly, q: Poly) -> Poly:
    size = max(len(p), len(q))
    return _trim((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(size))


def _neg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def _mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    if degree(p) + degree(q) > DEGREE_CAP:
        raise DegreeOverflow(f"product degree {degree(p) + degree(q)} exceeds the cap of {DEGREE_CAP}")
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def _scale(p: Poly, factor: Fraction) -> Poly:
    return _trim(c * factor for c in p)


def _divmod(p: Poly, q: Poly) -> Tuple[Poly, Poly]:
    if not q:
        raise DivisionByZero("polynomial division by zero")
    remainder = list(p)
    quotient = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    lead = q[-1]
    while len(remainder) >= len(q) and remainder:
        shift = len(remainder) - len(q)
        factor = remainder[-1] / lead
        quotient[shift] = factor
        for i, c in enumerate(q):
            remainder[shift + i] -= factor * c
        remainder = list(_trim(remainder))
    return _trim(quotient), _trim(remainder)


def _monic(p: Poly) -> Poly:
    return _scale(p, 1 / p[-1]) if p else p


def _gcd(p: Poly, q: Poly) -> Poly:
    while q:
        p, q = q, _divmod(p, q)[1]
    return _monic(p) if p else (Fraction(1),)


# ============================================================================
# FIELD ELEMENTS
# ============================================================================

@functools.total_ordering
class RatFuncElem(FieldElement):
    """
    num / den in lowest terms with den monic

    The order compares behaviour at x -> +infinity, so x exceeds every
    constant and 1/x is a positive infinitesimal.
    """

    __slots__ = ("num", "den", "config")

    def __init__(self, num: Sequence = (), den: Sequence = (1,), config: FieldConfig = DEFAULT_CONFIG):
        num, den = _trim(num), _trim(den)
        if not den:
            raise DivisionByZero("rational function with zero denominator")
        if not num:
            den = (Fraction(1),)
        else:
            g = _gcd(num, den)
            if g != (Fraction(1),):
                num, den = _divmod(num, g)[0], _divmod(den, g)[0]
            lead = den[-1]
            num, den = _scale(num, 1 / lead), _scale(den, 1 / lead)
        self.num: Poly = num
        self.den: Poly = den
        self.config = config

    @classmethod
    def constant(cls, value, config: FieldConfig = DEFAULT_CONFIG) -> "RatFuncElem":
        return cls((Fraction(value),), (Fraction(1),), config)

    @classmethod
    def generator(cls, config: FieldConfig = DEFAULT_CONFIG) -> "RatFuncElem":
        """The indeterminate x, the distinguished infinite element"""
        return cls((Fraction(0), Fraction(1)), (Fraction(1),), config)

    def _coerce(self, other) -> Optional["RatFuncElem"]:
        if isinstance(other, RatFuncElem):
            return other
        if isinstance(other, (int, Fraction)):
            return RatFuncElem.constant(other, self.config)
        return None

    @property
    def is_constant(self) -> bool:
        return degree(self.num) <= 0 and degree(self.den) == 0

    def constant_value(self) -> Fraction:
        return self.num[0] if self.num else Fraction(0)

    # ------------------------------------------------------------------
    # field operations
    # ------------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        num = _add(_mul(self.num, other.den), _mul(other.num, self.den))
        return RatFuncElem(num, _mul(self.den, other.den), self.config)

    __radd__ = __add__

    def __neg__(self):
        return RatFuncElem(_neg(self.num), self.den, self.config)

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
        return RatFuncElem(_mul(self.num, other.num), _mul(self.den, other.den), self.config)

    __rmul__ = __mul__

    def inverse(self) -> "RatFuncElem":
        if not self.num:
            raise DivisionByZero("division by the zero rational function")
        return RatFuncElem(self.den, self.num, self.config)

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
        if degree(self.num) * exponent > DEGREE_CAP or degree(self.den) * exponent > DEGREE_CAP:
            raise DegreeOverflow(f"power {exponent} exceeds the degree cap of {DEGREE_CAP}")
        result = RatFuncElem.constant(1, self.config)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    # ------------------------------------------------------------------
    # ordering
    # ------------------------------------------------------------------

    def sign(self) -> int:
        if not self.num:
            return 0
        return 1 if self.num[-1] > 0 else -1

    def cmp(self, other) -> int:
        """Sign of the leading coefficient of the reduced difference"""
        return (self - self._coerce(other)).sign()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        if self.is_constant:
            return hash(self.constant_value())
        return hash((self.num, self.den))

    # ------------------------------------------------------------------
    # numeric-core contract
    # ------------------------------------------------------------------

    def classify(self) -> Classification:
        if not self.num:
            return Classification.zero()
        gap = degree(self.num) - degree(self.den)
        if gap > 0:
            tag = Tag.INFINITE
        elif gap < 0:
            tag = Tag.INFINITESIMAL
        else:
            tag = Tag.APPRECIABLE
        return Classification(tag, Sign.of(self.num[-1]))

    def standard_part(self) -> Fraction:
        """Limit at infinity: the leading-coefficient ratio of equal degrees"""
        if not self.num:
            return Fraction(0)
        gap = degree(self.num) - degree(self.den)
        if gap > 0:
            raise NotFinite(f"{self} is infinite")
        if gap < 0:
            return Fraction(0)
        return self.num[-1] / self.den[-1]

    def order(self) -> Optional[Fraction]:
        if not self.num:
            return None
        return Fraction(degree(self.den) - degree(self.num))

    def apply(self, name: str) -> "RatFuncElem":
        if name == "abs":
            return -self if self.sign() < 0 else self
        if self.is_constant:
            value, _ = real_function(name, self.constant_value(), self.config)
            return RatFuncElem.constant(value, self.config)
        raise NoTransfer(
            f"{name}({self}) has no value in the rational-function field: "
            "this ordered extension carries no transfer of transcendental functions"
        )

    def root(self, k: int) -> "RatFuncElem":
        if self.is_constant:
            value, _ = root_value(self.constant_value(), k, self.config)
            return RatFuncElem.constant(value, self.config)
        raise NoTransfer(f"root {k} of the non-constant element {self} is not in the rational-function field")

    # ------------------------------------------------------------------
    # rendering
    # ------------------------------------------------------------------

    def to_expr(self) -> Expr:
        num = _poly_expr(self.num)
        if self.den == (Fraction(1),):
            return num
        return Div(num, _poly_expr(self.den))

    def to_json(self) -> dict:
        return {
            "num": [format_rational(c) for c in self.num],
            "den": [format_rational(c) for c in self.den],
        }

    def __str__(self):
        return to_text(self.to_expr())

    def __repr__(self):
        return f"RatFuncElem({self})"


def _monomial(coefficient: Fraction, power: int) -> Expr:
    if power == 0:
        return constant(coefficient)
    base = Var("x") if power == 1 else Pow(Var("x"), Fraction(power))
    if coefficient == 1:
        return base
    return Mul(constant(coefficient), base)


def _poly_expr(p: Poly) -> Expr:
    """Highest degree first, in the expression grammar"""
    if not p:
        return Lit(Fraction(0))
    terms: List[Tuple[Fraction, int]] = [(c, i) for i, c in reversed(list(enumerate(p))) if c != 0]
    first_coefficient, first_power = terms[0]
    node = _monomial(first_coefficient, first_power)
    for coefficient, power in terms[1:]:
        if coefficient < 0:
            node = Sub(node, _monomial(-coefficient, power))
        else:
            node = Add(node, _monomial(coefficient, power))
    return node


# ============================================================================
# OPERATIONS
# ============================================================================

def rf_arith(op: str, a: RatFuncElem, b: RatFuncElem) -> RatFuncElem:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError(f"unknown operator '{op}'")


def rf_cmp(a: RatFuncElem, b: RatFuncElem) -> int:
    return a.cmp(b)


def rf_transcendental(name: str, a: RatFuncElem) -> RatFuncElem:
    """NoTransfer for every non-constant element; constants evaluate numerically"""
    return a.apply(name)
