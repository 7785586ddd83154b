from fractions import Fraction

import mpmath
import pytest

from core.errors import ConfigError, DomainError, NotFinite
from core.numeric import (
    DEFAULT_CONFIG,
    EXACT_POWER_BITS,
    Classification,
    FieldConfig,
    Sign,
    Tag,
    classify,
    exact_root,
    format_decimal,
    format_rational,
    order,
    power_value,
    real_function,
    root_value,
    st,
    to_fraction,
    truncate_decimal,
)


def test_default_config():
    config = FieldConfig()
    assert config.truncation_order == 32
    assert config.working_precision == 50
    assert config.sequence_cutoff == 2 ** 20
    assert config.st_tolerance == Fraction(1, 10 ** 9)
    assert config.noise_floor == Fraction(1, 10 ** 45)
    assert config.mp_dps == 65


@pytest.mark.parametrize("raw", ["1e-9", "1/1000000000", 1e-9, Fraction(1, 10 ** 9)])
def test_tolerance_spellings(raw):
    assert FieldConfig(st_tolerance=raw).st_tolerance == Fraction(1, 10 ** 9)


def test_config_is_frozen_and_validated():
    with pytest.raises(ValueError):
        FieldConfig(truncation_order=0)
    with pytest.raises(ConfigError):
        DEFAULT_CONFIG.with_overrides(st_tolerance="-1")
    with pytest.raises(ConfigError):
        DEFAULT_CONFIG.with_overrides(working_precision="lots")
    changed = DEFAULT_CONFIG.with_overrides(truncation_order=8, working_precision=None)
    assert changed.truncation_order == 8
    assert changed.working_precision == 50
    assert DEFAULT_CONFIG.truncation_order == 32


def test_config_dump_round_trips_tolerance():
    config = FieldConfig(st_tolerance="1/3")
    assert config.model_dump()["st_tolerance"] == "1/3"
    assert FieldConfig(**config.model_dump()) == config


def test_classification_consistency():
    with pytest.raises(ValueError):
        Classification(Tag.ZERO, Sign.POSITIVE)
    with pytest.raises(ValueError):
        Classification(Tag.APPRECIABLE, Sign.ZERO)
    c = Classification(Tag.INFINITESIMAL, Sign.POSITIVE)
    assert str(c) == "Infinitesimal, Positive"
    assert c.flip().sign is Sign.NEGATIVE
    assert c.is_negligible and c.is_finite
    assert not Classification(Tag.INFINITE, Sign.NEGATIVE).is_finite


def test_rationals_are_standard():
    assert classify(Fraction(0)) == Classification.zero()
    assert classify(Fraction(-3, 2)) == Classification(Tag.APPRECIABLE, Sign.NEGATIVE)
    assert st(Fraction(7, 3)) == Fraction(7, 3)
    assert order(Fraction(5)) == 0
    assert order(Fraction(0)) is None


def test_exact_roots():
    assert exact_root(Fraction(4, 9), 2) == Fraction(2, 3)
    assert exact_root(Fraction(-8), 3) == -2
    assert exact_root(Fraction(2), 2) is None
    assert exact_root(Fraction(-4), 2) is None
    assert root_value(Fraction(16, 81), 4, DEFAULT_CONFIG) == (Fraction(2, 3), True)


def test_irrational_root_is_close():
    value, exact = root_value(Fraction(2), 2, DEFAULT_CONFIG)
    assert not exact
    assert abs(value * value - 2) < Fraction(1, 10 ** 55)
    with pytest.raises(DomainError):
        root_value(Fraction(-2), 2, DEFAULT_CONFIG)


def test_power_value_switches_to_numeric_for_huge_results():
    assert power_value(Fraction(2), 10, DEFAULT_CONFIG) == (Fraction(1024), True)
    assert power_value(Fraction(-1), 10 ** 9, DEFAULT_CONFIG) == (Fraction(1), True)
    e = EXACT_POWER_BITS
    value, exact = power_value(Fraction(1001, 1000), e, DEFAULT_CONFIG)
    assert not exact
    with mpmath.workdps(80):
        oracle = mpmath.power(mpmath.mpf(1001) / 1000, e)
        assert abs(mpmath.mpf(value.numerator) / value.denominator / oracle - 1) < mpmath.mpf(10) ** -55
    with pytest.raises(DomainError):
        power_value(Fraction(0), -1, DEFAULT_CONFIG)


def test_real_functions():
    assert real_function("exp", Fraction(0), DEFAULT_CONFIG) == (Fraction(1), True)
    assert real_function("log", Fraction(1), DEFAULT_CONFIG) == (Fraction(0), True)
    value, exact = real_function("sin", Fraction(2), DEFAULT_CONFIG)
    assert not exact
    assert format_decimal(value, 6) == "0.909297"
    with pytest.raises(DomainError):
        real_function("log", Fraction(-1), DEFAULT_CONFIG)


def test_to_fraction_rejects_infinity():
    assert to_fraction(mpmath.mpf("0.5")) == Fraction(1, 2)
    with pytest.raises(NotFinite):
        to_fraction(mpmath.inf)


def test_to_fraction_has_plain_integer_parts():
    one = to_fraction(mpmath.mpf(1))
    assert type(one.numerator) is int and type(one.denominator) is int
    assert format_decimal(one, 3) == "1.000"
    three_quarters = to_fraction(mpmath.mpf(3) / 4)
    assert three_quarters + Fraction(1, 4) == 1
    assert format_decimal(three_quarters * 2, 2) == "1.50"


def test_formatting():
    assert format_rational(Fraction(6)) == "6"
    assert format_rational(Fraction(-4, 6)) == "-2/3"
    assert format_decimal(Fraction(1, 8), 2) == "0.13"
    assert format_decimal(Fraction(-1, 8), 2) == "-0.13"
    assert format_decimal(Fraction(-1, 1000), 2) == "0.00"
    assert format_decimal(Fraction(5), 0) == "5"
    assert truncate_decimal(Fraction(1414213562, 10 ** 9), 6) == "1.414213"
    assert truncate_decimal(Fraction(-1, 8), 2) == "-0.13"
    assert truncate_decimal(Fraction(0), 3) == "0.000"
