from fractions import Fraction

import mpmath
import pytest

from core.calculus import (
    FAIL,
    PASS,
    TRANSFER_ERROR,
    TRANSFER_FAIL,
    TRANSFER_NO_TRANSFER,
    TRANSFER_PASS,
    continuity_at,
    derivative,
    ivt_root,
    second_derivative,
    transfer_check,
    uniform_continuity_probe,
)
from core.errors import DomainError, NoSignChange, NotDifferentiable, UnsupportedBackend
from core.expr import evaluate, parse, symbolic_diff
from core.numeric import DEFAULT_CONFIG, Tag, to_fraction, to_mpf


def random_polynomial(rng, degree):
    terms = []
    for power in range(degree + 1):
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        terms.append(f"({c})*x^{power}")
    return parse(" + ".join(terms))


# ----------------------------------------------------------------------------
# derivatives
# ----------------------------------------------------------------------------

def test_derivative_of_square(lc):
    result = derivative(parse("x^2"), Fraction(3), lc)
    assert result.value == 6
    assert result.exact
    assert [p.dx for p in result.probes] == ["eps", "-eps", "2*eps", "eps^2"]
    assert all(p.st == 6 for p in result.probes)
    assert all(p.ratio_class.tag is Tag.APPRECIABLE for p in result.probes)


def test_derivative_on_other_backends(omega, ratfunc):
    assert derivative(parse("x^2"), Fraction(3), omega).value == 6
    assert derivative(parse("x^2"), Fraction(3), ratfunc).value == 6


def test_sine_derivative_at_zero_is_exact(lc):
    result = derivative(parse("sin(x)"), Fraction(0), lc)
    assert result.value == 1
    assert result.exact


def test_polynomial_derivatives_match_symbolic(lc, rng):
    for _ in range(50):
        p = random_polynomial(rng, rng.randint(0, 6))
        x0 = Fraction(rng.randint(-20, 20), rng.randint(1, 7))
        expected = evaluate(symbolic_diff(p), {"x": x0})
        result = derivative(p, x0, lc)
        assert result.value == expected
        assert result.exact


def test_probe_independence(lc):
    result = derivative(parse("x^3"), Fraction(1, 2), lc)
    assert {p.st for p in result.probes} == {Fraction(3, 4)}


TRANSCENDENTAL_POINTS = [Fraction(1, 7), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1),
                         Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3)]

TRANSCENDENTAL_DERIVATIVES = {
    "sin(x)": lambda t: mpmath.cos(t),
    "cos(x)": lambda t: -mpmath.sin(t),
    "exp(x)": lambda t: mpmath.exp(t),
    "log(x)": lambda t: 1 / t,
    "sqrt(x)": lambda t: 1 / (2 * mpmath.sqrt(t)),
    "sin(exp(x))": lambda t: mpmath.cos(mpmath.exp(t)) * mpmath.exp(t),
    "cos(x^2)": lambda t: -2 * t * mpmath.sin(t ** 2),
    "exp(sin(x))": lambda t: mpmath.exp(mpmath.sin(t)) * mpmath.cos(t),
    "log(1 + x^2)": lambda t: 2 * t / (1 + t ** 2),
    "log(2 + cos(x))": lambda t: -mpmath.sin(t) / (2 + mpmath.cos(t)),
    "sqrt(1 + x^2)": lambda t: t / mpmath.sqrt(1 + t ** 2),
    "sqrt(exp(x))": lambda t: mpmath.exp(t / 2) / 2,
}


@pytest.mark.parametrize("x0", TRANSCENDENTAL_POINTS)
@pytest.mark.parametrize("source", list(TRANSCENDENTAL_DERIVATIVES))
def test_transcendental_derivatives(lc, source, x0):
    result = derivative(parse(source), x0, lc)
    with mpmath.workdps(80):
        expected = to_fraction(TRANSCENDENTAL_DERIVATIVES[source](to_mpf(x0)))
    assert abs(result.value - expected) < Fraction(1, 10 ** 45)


def test_abs_is_not_differentiable_at_zero(lc):
    with pytest.raises(NotDifferentiable):
        derivative(parse("abs(x)"), Fraction(0), lc)


def test_second_derivative(lc):
    result = second_derivative(parse("x^3"), Fraction(2), lc)
    assert result.value == 12
    assert len(result.probes) == 3


# ----------------------------------------------------------------------------
# continuity
# ----------------------------------------------------------------------------

def test_polynomial_is_continuous(lc):
    report = continuity_at(parse("x^2"), Fraction(5), lc)
    assert report.verdict == PASS
    assert report.mode == "increment"
    assert report.witness is None
    assert len(report.probes) == 5


def test_continuity_on_sequences(omega):
    assert continuity_at(parse("x^2"), Fraction(1), omega).verdict == PASS


def test_step_function_jumps(lc):
    report = continuity_at(parse("(abs(x) + x)/(2*x)"), Fraction(0), lc)
    assert report.verdict == FAIL
    assert report.mode == "mirrored"
    assert report.witness.increment_class.tag is Tag.APPRECIABLE


def test_pole_is_outside_the_domain(lc):
    with pytest.raises(DomainError):
        continuity_at(parse("1/x"), Fraction(0), lc)


def test_reciprocal_is_not_microcontinuous(lc):
    report = uniform_continuity_probe(parse("1/x"), Fraction(0), Fraction(1), lc)
    assert report.verdict == FAIL
    assert report.witness.point == "0+eps"
    assert report.witness.alpha == "eps^2"
    assert report.witness.increment_st == -1


@pytest.mark.parametrize("source", ["x^2", "sqrt(x)"])
def test_microcontinuous_functions(lc, source):
    report = uniform_continuity_probe(parse(source), Fraction(0), Fraction(1), lc)
    assert report.verdict == PASS
    assert report.mode == "hyperpoint"


def test_uniform_probe_needs_levi_civita(omega, lc):
    with pytest.raises(UnsupportedBackend):
        uniform_continuity_probe(parse("x"), Fraction(0), Fraction(1), omega)
    with pytest.raises(DomainError):
        uniform_continuity_probe(parse("x"), Fraction(1), Fraction(1), lc)


# ----------------------------------------------------------------------------
# intermediate values
# ----------------------------------------------------------------------------

@pytest.mark.parametrize(
    "source, a, b, digits, expected",
    [
        ("x^2-2", 1, 2, 6, "1.414213"),
        ("x^2-2", 1, 2, 10, "1.4142135623"),
        ("x^3-x-2", 1, 2, 5, "1.52137"),
    ],
)
def test_ivt_digits(source, a, b, digits, expected):
    result = ivt_root(parse(source), Fraction(a), Fraction(b), digits)
    assert result.decimal == expected
    assert not result.exact_hit
    assert result.left <= result.right


def test_ivt_exact_hit():
    result = ivt_root(parse("x"), Fraction(-1), Fraction(1), 3)
    assert result.decimal == "0.000"
    assert result.exact_hit


def test_ivt_finds_leftmost_of_several_roots():
    # zeros at sqrt(2)/10, 1/2 and 9/10
    result = ivt_root(parse("(x-0.5)*(x^2-0.02)*(x-0.9)"), Fraction(0), Fraction(1), 3)
    assert result.decimal == "0.141"
    assert not result.exact_hit
    assert result.left == Fraction(141, 1000)
    assert result.right == Fraction(142, 1000)


def test_ivt_root_on_a_grid_point():
    result = ivt_root(parse("(x-0.5)*(x-0.15)*(x-0.95)"), Fraction(0), Fraction(1), 3)
    assert result.decimal == "0.150"
    assert result.exact_hit
    assert result.left == result.right == Fraction(3, 20)


def test_ivt_zero_at_right_endpoint():
    result = ivt_root(parse("x-1"), Fraction(0), Fraction(1), 4)
    assert result.exact_hit
    assert result.left == 1


def test_ivt_errors():
    with pytest.raises(NoSignChange):
        ivt_root(parse("x^2+1"), Fraction(-1), Fraction(1), 4)
    with pytest.raises(DomainError):
        ivt_root(parse("x"), Fraction(-1), Fraction(1), 0)
    with pytest.raises(DomainError):
        ivt_root(parse("x"), Fraction(2), Fraction(1), 4)


# ----------------------------------------------------------------------------
# transfer
# ----------------------------------------------------------------------------

def test_pythagorean_identity_transfers(lc):
    report = transfer_check(parse("sin(x)^2+cos(x)^2"), parse("1"), lc)
    assert report.verdict == TRANSFER_PASS
    assert [p.point for p in report.points] == ["x", "1+x", "1/3+2*x^2", "2", "1/2"]
    assert all(p.magnitude < DEFAULT_CONFIG.noise_floor for p in report.points)


def test_rational_functions_have_no_transfer(ratfunc):
    report = transfer_check(parse("sin(x)^2+cos(x)^2"), parse("1"), ratfunc, ["x"])
    assert report.verdict == TRANSFER_NO_TRANSFER
    assert report.points[0].error == "NoTransfer"


def test_polynomial_identity_on_rational_functions(ratfunc):
    report = transfer_check(parse("(x+1)^2"), parse("x^2+2*x+1"), ratfunc)
    assert report.verdict == TRANSFER_PASS


def test_false_identity_fails(lc):
    report = transfer_check(parse("x^2"), parse("x"), lc)
    assert report.verdict == TRANSFER_FAIL


def test_backend_errors_are_findings(lc):
    report = transfer_check(parse("log(x)"), parse("0"), lc, ["-1"])
    assert report.verdict == TRANSFER_ERROR
    assert report.points[0].error == "DomainError"
