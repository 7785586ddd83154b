"""
Numeric Core
Exact rational scalars, field configuration, magnitude classification and the
standard-part contract shared by every backend
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

import mpmath
from mpmath import libmp
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from core.errors import ConfigError, DomainError, NotFinite

logger = logging.getLogger(__name__)

# The coefficient / ground type everywhere
ExactRational = Fraction

# ============================================================================
# CONFIGURATION
# ============================================================================

class FieldConfig(BaseModel):
    """
    Working parameters of every backend

    truncation_order     max retained Levi-Civita / expansion terms
    working_precision    decimal digits for transcendental base-point values
    sequence_cutoff      max index examined in the sequence model
    st_tolerance         tolerance of sequence standard parts
    guard_digits         margin of every 10^(-working_precision + margin) check
    hyperfinite_horizon  max hyperinteger value summed term by term
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    truncation_order: int = Field(32, ge=1)
    working_precision: int = Field(50, ge=1)
    sequence_cutoff: int = Field(2 ** 20, ge=1)
    st_tolerance: Fraction = Fraction(1, 10 ** 9)
    guard_digits: int = Field(5, ge=0)
    hyperfinite_horizon: int = Field(4096, ge=16)

    @field_validator("st_tolerance", mode="before")
    @classmethod
    def _parse_tolerance(cls, value):
        try:
            if isinstance(value, float):
                value = repr(value)
            tol = Fraction(value)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"st_tolerance is not a rational: {value!r}") from exc
        if tol <= 0:
            raise ValueError("st_tolerance must be > 0")
        return tol

    @field_serializer("st_tolerance")
    def _dump_tolerance(self, value: Fraction) -> str:
        return format_rational(value)

    def with_overrides(self, **overrides) -> "FieldConfig":
        """Return a validated copy with the given fields replaced"""
        data = self.model_dump()
        data.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return FieldConfig(**data)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def noise_floor(self) -> Fraction:
        """Coefficients below this are indistinguishable from zero"""
        return Fraction(1, 10 ** max(self.working_precision - self.guard_digits, 1))

    @property
    def precision_bits(self) -> int:
        return math.ceil((self.working_precision + self.guard_digits + 10) * math.log2(10))

    @property
    def mp_dps(self) -> int:
        return self.working_precision + self.guard_digits + 10


DEFAULT_CONFIG = FieldConfig()

# ============================================================================
# CLASSIFICATION
# ============================================================================

class Tag(str, Enum):
    ZERO = "Zero"
    INFINITESIMAL = "Infinitesimal"
    APPRECIABLE = "Appreciable"
    INFINITE = "Infinite"


class Sign(str, Enum):
    NEGATIVE = "Negative"
    ZERO = "Zero"
    POSITIVE = "Positive"

    @classmethod
    def of(cls, value) -> "Sign":
        if value > 0:
            return cls.POSITIVE
        if value < 0:
            return cls.NEGATIVE
        return cls.ZERO

    def flip(self) -> "Sign":
        if self is Sign.POSITIVE:
            return Sign.NEGATIVE
        if self is Sign.NEGATIVE:
            return Sign.POSITIVE
        return self


@dataclass(frozen=True)
class Classification:
    tag: Tag
    sign: Sign

    def __post_init__(self):
        if (self.tag is Tag.ZERO) != (self.sign is Sign.ZERO):
            raise ValueError(f"inconsistent classification {self.tag.value}/{self.sign.value}")

    @classmethod
    def zero(cls) -> "Classification":
        return cls(Tag.ZERO, Sign.ZERO)

    def flip(self) -> "Classification":
        return Classification(self.tag, self.sign.flip())

    @property
    def is_finite(self) -> bool:
        return self.tag is not Tag.INFINITE

    @property
    def is_negligible(self) -> bool:
        """Zero or infinitesimal"""
        return self.tag in (Tag.ZERO, Tag.INFINITESIMAL)

    def to_dict(self) -> dict:
        return {"tag": self.tag.value, "sign": self.sign.value}

    def __str__(self) -> str:
        return f"{self.tag.value}, {self.sign.value}"


# ============================================================================
# BACKEND INTERFACE
# ============================================================================

class FieldElement(ABC):
    """
    Common ordered-field interface

    Backends implement the arithmetic dunders (with rational coercion), plus the
    methods below. Plain Fractions are the standard (Archimedean) elements and
    are handled by the module-level functions directly.
    """

    @abstractmethod
    def classify(self) -> Classification:
        ...

    @abstractmethod
    def standard_part(self) -> Fraction:
        ...

    @abstractmethod
    def apply(self, name: str) -> "FieldElement":
        """Evaluate one of sin, cos, exp, log, sqrt, abs"""

    @abstractmethod
    def root(self, k: int) -> "FieldElement":
        ...

    def order(self) -> Optional[Fraction]:
        return None


def classify(x) -> Classification:
    """Zero / Infinitesimal / Appreciable / Infinite, with sign"""
    if isinstance(x, (int, Fraction)):
        if x == 0:
            return Classification.zero()
        return Classification(Tag.APPRECIABLE, Sign.of(x))
    return x.classify()


def st(x) -> Fraction:
    """Standard part of a finite element"""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return x.standard_part()


def infinitely_close(x, y) -> bool:
    return classify(x - y).is_negligible


def order(x) -> Optional[Fraction]:
    """
    Order of magnitude of x relative to the backend's unit infinitesimal

    Positive for infinitesimals (ε^2 has order 2), zero for appreciable,
    negative for infinite elements; None for zero or when undetermined.
    """
    if isinstance(x, (int, Fraction)):
        return None if x == 0 else Fraction(0)
    return x.order()


# ============================================================================
# RATIONAL / MPMATH BRIDGE
# ============================================================================

def to_mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def to_fraction(value) -> Fraction:
    """Exact rational value of a finite mpf"""
    if not mpmath.isfinite(value):
        raise NotFinite(f"non-finite numeric value {value}")
    p, q = libmp.to_rational(mpmath.mpf(value)._mpf_)
    # gmpy backends hand back mpz parts
    return Fraction(int(p), int(q))


def quantize(q: Fraction, config: FieldConfig) -> Fraction:
    """Round to the binary grid of working precision (keeps inexact values small)"""
    scale = 1 << config.precision_bits
    if q.denominator <= scale:
        return q
    return Fraction(round(q * scale), scale)


def _iroot(value: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer"""
    if value < 2:
        return value
    if k == 2:
        return math.isqrt(value)
    guess = 1 << ((value.bit_length() + k - 1) // k)
    while True:
        nxt = ((k - 1) * guess + value // guess ** (k - 1)) // k
        if nxt >= guess:
            return guess
        guess = nxt


def exact_root(q: Fraction, k: int) -> Optional[Fraction]:
    """Exact k-th root of a rational when it is one, else None"""
    if q < 0:
        if k % 2 == 0:
            return None
        r = exact_root(-q, k)
        return None if r is None else -r
    num = _iroot(q.numerator, k)
    den = _iroot(q.denominator, k)
    if num ** k == q.numerator and den ** k == q.denominator:
        return Fraction(num, den)
    return None


def root_value(q: Fraction, k: int, config: FieldConfig) -> Tuple[Fraction, bool]:
    """k-th root of a rational; (value, exact)"""
    if k < 1:
        raise DomainError(f"root index must be positive, got {k}")
    if q < 0 and k % 2 == 0:
        raise DomainError(f"even root of negative value {format_rational(q)}")
    exact = exact_root(q, k)
    if exact is not None:
        return exact, True
    with mpmath.workdps(config.mp_dps):
        value = mpmath.root(to_mpf(abs(q)), k)
        result = to_fraction(value)
    return quantize(-result if q < 0 else result, config), False


# Exact integer powers above this many bits are materialized numerically
EXACT_POWER_BITS = 1 << 16


def power_value(q: Fraction, e: int, config: FieldConfig) -> Tuple[Fraction, bool]:
    """q**e for integer e; exact unless the exact result would be huge"""
    if q == 0:
        if e < 0:
            raise DomainError("zero raised to a negative power")
        return (Fraction(1) if e == 0 else Fraction(0)), True
    bits = q.numerator.bit_length() + q.denominator.bit_length()
    if bits * abs(e) <= EXACT_POWER_BITS or abs(q) == 1:
        return q ** e, True
    with mpmath.workdps(config.mp_dps):
        value = mpmath.power(to_mpf(q), e)
        result = to_fraction(value)
    return quantize(result, config), False


_MPMATH_FUNCTIONS = {
    "exp": mpmath.exp,
    "log": mpmath.log,
    "sin": mpmath.sin,
    "cos": mpmath.cos,
}


def real_function(name: str, q: Fraction, config: FieldConfig) -> Tuple[Fraction, bool]:
    """
    Value of a standard function at a rational point

    Returns (value, exact). Inexact values carry error below
    10^-(working_precision + guard_digits).
    """
    if name == "abs":
        return abs(q), True
    if name == "sqrt":
        return root_value(q, 2, config)
    if name == "log" and q <= 0:
        raise DomainError(f"log of non-positive value {format_rational(q)}")
    if q == 0 and name in ("exp", "sin", "cos"):
        return (Fraction(0) if name == "sin" else Fraction(1)), True
    if name == "log" and q == 1:
        return Fraction(0), True
    if name not in _MPMATH_FUNCTIONS:
        raise DomainError(f"unknown function '{name}'")
    with mpmath.workdps(config.mp_dps):
        value = _MPMATH_FUNCTIONS[name](to_mpf(q))
        result = to_fraction(value)
    return quantize(result, config), False


def apply_function(x, name: str, config: FieldConfig):
    """Dispatch a standard function to the element's backend"""
    if isinstance(x, (int, Fraction)):
        value, _ = real_function(name, Fraction(x), config)
        return value
    if isinstance(x, mpmath.mpf):
        if name == "abs":
            return abs(x)
        if name == "sqrt":
            if x < 0:
                raise DomainError("sqrt of a negative value")
            return mpmath.sqrt(x)
        if name == "log" and x <= 0:
            raise DomainError("log of a non-positive value")
        return _MPMATH_FUNCTIONS[name](x)
    return x.apply(name)


# ============================================================================
# FORMATTING
# ============================================================================

def format_rational(q: Fraction) -> str:
    """Exact 'p/q' (or 'p') rendering"""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction, digits: int) -> str:
    """Round half away from zero to `digits` fractional digits"""
    q = Fraction(q)
    negative = q < 0
    scaled = abs(q) * 10 ** digits
    whole = scaled.numerator // scaled.denominator
    if scaled - whole >= Fraction(1, 2):
        whole += 1
    text = str(whole).rjust(digits + 1, "0")
    if digits:
        text = f"{text[:-digits]}.{text[-digits:]}"
    if negative and whole != 0:
        text = "-" + text
    return text


def truncate_decimal(q: Fraction, digits: int) -> str:
    """Digits of floor(q * 10^digits) / 10^digits"""
    q = Fraction(q)
    scaled = q * 10 ** digits
    whole = scaled.numerator // scaled.denominator
    negative = whole < 0
    text = str(abs(whole)).rjust(digits + 1, "0")
    if digits:
        text = f"{text[:-digits]}.{text[-digits:]}"
    return ("-" + text) if negative else text
