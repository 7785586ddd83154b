"""
Asymptotic Dominance Engine
Expansions of sequence rules over the monomials beta^n * n^p * (log n)^q with a
tracked error horizon; certifies eventual signs, magnitude classes and limits
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Tuple

from core.numeric import (
    DEFAULT_CONFIG,
    Classification,
    FieldConfig,
    Sign,
    Tag,
    exact_root,
    format_rational,
    quantize,
    real_function,
    root_value,
)

logger = logging.getLogger(__name__)


class AsymptoticUnsupported(Exception):
    """The rule falls outside the pattern library; callers fall back to sampling"""


# ============================================================================
# SCALES
# ============================================================================

class Scale(NamedTuple):
    """
    The monomial beta^n * n^p * (log n)^q

    Tuple order is the order of growth: larger beta wins, then larger p, then q.
    """

    beta: Fraction
    p: Fraction
    q: Fraction

    def times(self, other: "Scale") -> "Scale":
        return Scale(self.beta * other.beta, self.p + other.p, self.q + other.q)

    def inverse(self) -> "Scale":
        return Scale(1 / self.beta, -self.p, -self.q)

    def power(self, e: int) -> "Scale":
        return Scale(self.beta ** e, self.p * e, self.q * e)

    def text(self) -> str:
        parts = []
        if self.beta != 1:
            parts.append(f"({format_rational(self.beta)})^n")
        if self.p != 0:
            parts.append("n" if self.p == 1 else f"n^({format_rational(self.p)})")
        if self.q != 0:
            parts.append("log(n)" if self.q == 1 else f"log(n)^({format_rational(self.q)})")
        return "*".join(parts) or "1"


ONE = Scale(Fraction(1), Fraction(0), Fraction(0))
INDEX = Scale(Fraction(1), Fraction(1), Fraction(0))
LOG = Scale(Fraction(1), Fraction(0), Fraction(1))

Term = Tuple[Scale, Fraction]

# ============================================================================
# EXPANSIONS
# ============================================================================

class Expansion:
    """
    Finite asymptotic expansion  sum c_i * scale_i + O(horizon)

    terms are sorted by decreasing scale and all lie strictly above the
    horizon; horizon None means the expansion is exact. Inexact coefficients
    (transcendental constants) below the noise floor are absorbed into the
    horizon.
    """

    __slots__ = ("terms", "horizon", "exact", "config")

    def __init__(self, terms: Iterable[Term] = (), horizon: Optional[Scale] = None,
                 exact: bool = True, config: FieldConfig = DEFAULT_CONFIG):
        merged: Dict[Scale, Fraction] = {}
        for scale, coefficient in terms:
            merged[scale] = merged.get(scale, Fraction(0)) + coefficient
        kept: List[Term] = []
        for scale in sorted(merged, reverse=True):
            coefficient = merged[scale]
            if not exact:
                coefficient = quantize(coefficient, config)
                if 0 < abs(coefficient) < config.noise_floor:
                    horizon = scale if horizon is None else max(horizon, scale)
                    continue
            if coefficient != 0:
                kept.append((scale, coefficient))
        if horizon is not None:
            kept = [(s, c) for s, c in kept if s > horizon]
        limit = config.truncation_order
        if len(kept) > limit:
            dropped = kept[limit][0]
            horizon = dropped if horizon is None else max(horizon, dropped)
            kept = kept[:limit]
        self.terms: Tuple[Term, ...] = tuple(kept)
        self.horizon = horizon
        self.exact = exact
        self.config = config

    @classmethod
    def constant(cls, value, config: FieldConfig = DEFAULT_CONFIG, exact: bool = True) -> "Expansion":
        return cls([(ONE, Fraction(value))], None, exact, config)

    @classmethod
    def index(cls, config: FieldConfig = DEFAULT_CONFIG) -> "Expansion":
        """The index sequence n itself"""
        return cls([(INDEX, Fraction(1))], None, True, config)

    def _make(self, terms, horizon, exact) -> "Expansion":
        return Expansion(terms, horizon, exact, self.config)

    def _coerce(self, other) -> Optional["Expansion"]:
        if isinstance(other, Expansion):
            return other
        if isinstance(other, (int, Fraction)):
            return Expansion.constant(other, self.config)
        return None

    # ------------------------------------------------------------------
    # inspection
    # ------------------------------------------------------------------

    @property
    def is_exact_zero(self) -> bool:
        return not self.terms and self.horizon is None

    def leading(self) -> Optional[Term]:
        return self.terms[0] if self.terms else None

    def top(self) -> Optional[Scale]:
        """Largest scale present, counting the horizon"""
        if self.terms:
            return self.terms[0][0]
        return self.horizon

    def coefficient(self, scale: Scale) -> Fraction:
        for s, c in self.terms:
            if s == scale:
                return c
        return Fraction(0)

    @property
    def certified(self) -> bool:
        """The leading term (or exact zero) is known to dominate the error"""
        return self.is_exact_zero or bool(self.terms)

    def sign(self) -> int:
        if self.is_exact_zero:
            return 0
        lead = self.leading()
        if lead is None:
            raise AsymptoticUnsupported(f"nothing above the error horizon {self.horizon.text()}")
        return 1 if lead[1] > 0 else -1

    def classify(self) -> Classification:
        if self.is_exact_zero:
            return Classification.zero()
        lead = self.leading()
        if lead is None:
            raise AsymptoticUnsupported(f"nothing above the error horizon {self.horizon.text()}")
        scale, coefficient = lead
        if scale > ONE:
            tag = Tag.INFINITE
        elif scale == ONE:
            tag = Tag.APPRECIABLE
        else:
            tag = Tag.INFINITESIMAL
        return Classification(tag, Sign.of(coefficient))

    def limit(self) -> Fraction:
        """Exact limit of a finite expansion whose error vanishes"""
        classification = self.classify()
        if classification.tag is Tag.INFINITE:
            raise AsymptoticUnsupported("expansion grows without bound")
        if self.horizon is not None and self.horizon >= ONE:
            raise AsymptoticUnsupported("error horizon is not infinitesimal")
        return self.coefficient(ONE)

    def order(self) -> Optional[Fraction]:
        """-p for a leading c*n^p, None for exponential or logarithmic leads"""
        lead = self.leading()
        if lead is None:
            return None
        scale = lead[0]
        if scale.beta != 1 or scale.q != 0:
            return None
        return -scale.p

    def pattern(self) -> str:
        """Short description of the dominance certificate"""
        lead = self.leading()
        if self.is_exact_zero:
            return "exact-zero"
        if lead is None:
            return "uncertified"
        return f"leading {format_rational(lead[1])}*{lead[0].text()}"

    # ------------------------------------------------------------------
    # ring operations
    # ------------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        horizon = _max_scale(self.horizon, other.horizon)
        return self._make(self.terms + other.terms, horizon, self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return self._make([(s, -c) for s, c in self.terms], self.horizon, self.exact)

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
        if self.is_exact_zero or other.is_exact_zero:
            return self._make((), None, True)
        products = [(sa.times(sb), ca * cb) for sa, ca in self.terms for sb, cb in other.terms]
        horizon = None
        if self.horizon is not None:
            horizon = _max_scale(horizon, self.horizon.times(other.top()))
        if other.horizon is not None:
            horizon = _max_scale(horizon, other.horizon.times(self.top()))
        return self._make(products, horizon, self.exact and other.exact)

    __rmul__ = __mul__

    def scaled(self, factor: Fraction, scale: Scale = ONE, exact: bool = True) -> "Expansion":
        """factor * scale * self"""
        horizon = None if self.horizon is None else self.horizon.times(scale)
        terms = [(s.times(scale), c * factor) for s, c in self.terms]
        return self._make(terms, horizon, self.exact and exact)

    def _factor_leading(self) -> Tuple[Scale, Fraction, "Expansion"]:
        """self = c * scale * (1 + u) with u tending to zero"""
        lead = self.leading()
        if lead is None:
            raise AsymptoticUnsupported("no certified leading term")
        scale, coefficient = lead
        u = self.scaled(1 / coefficient, scale.inverse()) - 1
        return scale, coefficient, u

    def _series(self, u: "Expansion", coefficients: Iterator[Tuple[Fraction, bool]]) -> "Expansion":
        """Sum c_j * u^j for u tending to zero, with the truncation remainder as horizon"""
        total = self._make((), None, True)
        power = Expansion.constant(1, self.config)
        for j, (coefficient, exact) in enumerate(coefficients):
            if j >= self.config.truncation_order or power.is_exact_zero:
                break
            if total.horizon is not None and power.top() <= total.horizon:
                break
            if coefficient != 0:
                total = total + power.scaled(coefficient, exact=exact)
            power = power * u
        if not power.is_exact_zero:
            total = self._make(total.terms, _max_scale(total.horizon, power.top()), total.exact)
        return total

    def inverse(self) -> "Expansion":
        if self.is_exact_zero:
            raise AsymptoticUnsupported("division by the zero sequence")
        scale, coefficient, u = self._factor_leading()
        series = self._series(u, _geometric())
        return series.scaled(1 / coefficient, scale.inverse())

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

    def _int_power(self, exponent: int) -> "Expansion":
        if exponent < 0:
            return self.inverse()._int_power(-exponent)
        result = Expansion.constant(1, self.config)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __pow__(self, exponent):
        if isinstance(exponent, int):
            return self._int_power(exponent)
        if isinstance(exponent, Fraction):
            if exponent.denominator == 1:
                return self._int_power(int(exponent))
            return self.root(exponent.denominator)._int_power(exponent.numerator)
        if isinstance(exponent, Expansion):
            return self._expansion_power(exponent)
        return NotImplemented

    def __rpow__(self, base):
        if isinstance(base, (int, Fraction)):
            return Expansion.constant(base, self.config)._expansion_power(self)
        return NotImplemented

    def _expansion_power(self, exponent: "Expansion") -> "Expansion":
        """self ** exponent for a sequence-valued exponent such as n"""
        if exponent.horizon is None and all(s == ONE for s, _ in exponent.terms):
            if exponent.exact:
                return self ** exponent.coefficient(ONE)
            raise AsymptoticUnsupported("irrational constant exponent")
        if exponent.horizon is not None and exponent.horizon >= ONE:
            raise AsymptoticUnsupported("exponent error is not infinitesimal")
        scale, coefficient, u = self._factor_leading()
        if scale != ONE:
            raise AsymptoticUnsupported("variable exponent on a non-constant base")
        if coefficient < 0:
            raise AsymptoticUnsupported("negative base with variable exponent oscillates")
        # c^E * (1+u)^E
        result = Expansion.exp(exponent * self._series(u, _log1p()))
        if coefficient == 1:
            return result
        m = exponent.coefficient(INDEX)
        rest = exponent - Expansion([(INDEX, m)], None, True, self.config)
        linear = coefficient ** m.numerator
        if m.denominator != 1:
            linear = exact_root(linear, m.denominator)
            if linear is None:
                raise AsymptoticUnsupported("irrational base of the exponential factor")
        log_c, exact = real_function("log", coefficient, self.config)
        factor = Expansion.exp(rest.scaled(log_c, exact=exact))
        return (result * factor).scaled(Fraction(1), Scale(linear, Fraction(0), Fraction(0)))

    # ------------------------------------------------------------------
    # roots and transcendental functions
    # ------------------------------------------------------------------

    def root(self, k: int) -> "Expansion":
        if self.is_exact_zero:
            return self
        scale, coefficient, u = self._factor_leading()
        if coefficient < 0:
            if k % 2 == 0:
                raise AsymptoticUnsupported("even root of an eventually negative sequence")
            return -((-self).root(k))
        beta = exact_root(scale.beta, k)
        if beta is None:
            raise AsymptoticUnsupported("irrational root of an exponential scale")
        base, exact = root_value(coefficient, k, self.config)
        series = self._series(u, _binomial(Fraction(1, k)))
        return series.scaled(base, Scale(beta, scale.p / k, scale.q / k), exact=exact)

    def _split_finite(self) -> Tuple[List[Term], Fraction, "Expansion"]:
        """(growing terms, constant coefficient, vanishing part)"""
        if self.horizon is not None and self.horizon >= ONE:
            raise AsymptoticUnsupported("error horizon is not infinitesimal")
        growing = [(s, c) for s, c in self.terms if s > ONE]
        small = self._make([(s, c) for s, c in self.terms if s < ONE], self.horizon, self.exact)
        return growing, self.coefficient(ONE), small

    def exp(self) -> "Expansion":
        growing, a, small = self._split_finite()
        factor = ONE
        for scale, coefficient in growing:
            if scale != LOG:
                raise AsymptoticUnsupported(f"exp of a term growing like {scale.text()}")
            factor = Scale(Fraction(1), coefficient, Fraction(0))
        base, exact = real_function("exp", a, self.config)
        return self._series(small, _exp_series()).scaled(base, factor, exact=exact)

    def log(self) -> "Expansion":
        scale, coefficient, u = self._factor_leading()
        if coefficient <= 0:
            raise AsymptoticUnsupported("log of an eventually non-positive sequence")
        if scale.q != 0:
            raise AsymptoticUnsupported("log log n is outside the pattern library")
        result = self._series(u, _log1p())
        log_c, exact = real_function("log", coefficient, self.config)
        result = result + Expansion.constant(log_c, self.config, exact)
        if scale.beta != 1:
            log_beta, exact = real_function("log", scale.beta, self.config)
            result = result + Expansion([(INDEX, log_beta)], None, exact, self.config)
        if scale.p != 0:
            result = result + Expansion([(LOG, scale.p)], None, True, self.config)
        return result

    def _trig(self, name: str) -> "Expansion":
        growing, a, small = self._split_finite()
        if growing:
            raise AsymptoticUnsupported(f"{name} of an unbounded sequence oscillates")
        sin_a, sin_exact = real_function("sin", a, self.config)
        cos_a, cos_exact = real_function("cos", a, self.config)
        cos_u = self._series(small, _trig_series(odd=False))
        sin_u = self._series(small, _trig_series(odd=True))
        if name == "sin":
            return cos_u.scaled(sin_a, exact=sin_exact) + sin_u.scaled(cos_a, exact=cos_exact)
        return cos_u.scaled(cos_a, exact=cos_exact) - sin_u.scaled(sin_a, exact=sin_exact)

    def apply(self, name: str) -> "Expansion":
        if name == "sqrt":
            return self.root(2)
        if name == "abs":
            return -self if self.sign() < 0 else self
        if name == "exp":
            return self.exp()
        if name == "log":
            return self.log()
        if name in ("sin", "cos"):
            return self._trig(name)
        raise AsymptoticUnsupported(f"unknown function '{name}'")

    # ------------------------------------------------------------------
    # rendering
    # ------------------------------------------------------------------

    def text(self) -> str:
        parts = [f"{format_rational(c)}*{s.text()}" for s, c in self.terms]
        if self.horizon is not None:
            parts.append(f"O({self.horizon.text()})")
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"Expansion({self.text()})"


def _max_scale(a: Optional[Scale], b: Optional[Scale]) -> Optional[Scale]:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


# ============================================================================
# SERIES COEFFICIENTS
# ============================================================================

def _geometric() -> Iterator[Tuple[Fraction, bool]]:
    sign = Fraction(1)
    while True:
        yield sign, True
        sign = -sign


def _binomial(alpha: Fraction) -> Iterator[Tuple[Fraction, bool]]:
    value = Fraction(1)
    j = 0
    while True:
        yield value, True
        value = value * (alpha - j) / (j + 1)
        j += 1


def _exp_series() -> Iterator[Tuple[Fraction, bool]]:
    value = Fraction(1)
    j = 0
    while True:
        yield value, True
        j += 1
        value = value / j


def _log1p() -> Iterator[Tuple[Fraction, bool]]:
    yield Fraction(0), True
    j = 1
    while True:
        yield Fraction((-1) ** (j + 1), j), True
        j += 1


def _trig_series(odd: bool) -> Iterator[Tuple[Fraction, bool]]:
    factorial = Fraction(1)
    j = 0
    while True:
        if j > 0:
            factorial *= j
        if (j % 2 == 1) == odd:
            yield Fraction((-1) ** (j // 2)) / factorial, True
        else:
            yield Fraction(0), True
        j += 1
