from fractions import Fraction

import mpmath
import pytest

from core.errors import DomainError
from core.hyperfinite import (
    NON_UNIFORM_WITNESS,
    UNIFORM_EVIDENCE,
    euler_binomial_expand,
    euler_exp,
    hyperfinite_product,
    hyperfinite_sum,
    sum_theorem_probe,
)
from core.numeric import Tag, to_fraction
from core.omega import HyperNat

TOL = Fraction(1, 10 ** 9)


def test_partial_sums_are_exact():
    seq = hyperfinite_sum("1/k")
    assert seq.term(1) == 1
    assert seq.term(4) == Fraction(25, 12)


def test_sum_is_linear_at_probes():
    left, right = hyperfinite_sum("1/k^2"), hyperfinite_sum("(1/2)^k")
    both = hyperfinite_sum("1/k^2 + (1/2)^k")
    for n in (7, 8, 15, 16, 31, 32, 63, 64):
        assert both.term(n) == left.term(n) + right.term(n)


def test_geometric_sum():
    seq = hyperfinite_sum("(1/2)^k")
    assert seq.tail_pattern == "geometric-tail"
    pattern = seq.analyze()
    assert abs(pattern.limit - 1) < TOL


def test_basel_sum():
    seq = hyperfinite_sum("1/k^2")
    assert seq.tail_pattern == "power-tail"
    with mpmath.workdps(30):
        oracle = to_fraction(mpmath.pi ** 2 / 6)
    assert abs(seq.analyze().limit - oracle) < TOL


def test_divergent_sum_is_infinite():
    pattern = hyperfinite_sum("1").analyze()
    assert pattern.classification.tag is Tag.INFINITE
    assert pattern.limit is None


def test_sum_rejects_foreign_variables():
    with pytest.raises(DomainError):
        hyperfinite_sum("x/k")


def test_sum_over_other_hyperinteger():
    seq = hyperfinite_sum("1", HyperNat.from_expr("2*n"))
    assert seq.term(5) == 10


def test_products():
    assert abs(hyperfinite_product("1 - 1/(k+1)^2").analyze().limit - Fraction(1, 2)) < TOL
    assert hyperfinite_product("1 + 1/k").analyze().classification.tag is Tag.INFINITE


@pytest.mark.parametrize("k", [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(-1), Fraction(-3, 2)])
@pytest.mark.parametrize("z", [Fraction(-2), Fraction(-1), Fraction(1, 3), Fraction(1), Fraction(2)])
def test_euler_exponential(k, z):
    report = euler_exp(k, z)
    assert abs(report.st_estimate - report.oracle) < TOL
    assert report.within_tolerance


def test_euler_exponential_of_zero_is_exact():
    report = euler_exp(Fraction(0), Fraction(5))
    assert report.st_estimate == 1
    assert report.exact


def test_binomial_terms_match_taylor_coefficients():
    terms = euler_binomial_expand(Fraction(1), Fraction(2), m=7)
    assert [t.r for t in terms] == list(range(7))
    assert terms[3].oracle == Fraction(4, 3)
    assert all(t.matches for t in terms)
    assert terms[3].st == Fraction(4, 3)


def test_binomial_terms_are_bounded_by_smallest_probe():
    with pytest.raises(DomainError):
        euler_binomial_expand(Fraction(1), Fraction(2), m=8)
    with pytest.raises(DomainError):
        euler_binomial_expand(Fraction(1), Fraction(2), m=0)


def test_sum_theorem_non_uniform_witness():
    report = sum_theorem_probe("x^k*(1-x)", Fraction(1))
    assert report.verdict == NON_UNIFORM_WITNESS
    assert report.probe_point == "1 - 1/<n>"
    with mpmath.workdps(30):
        oracle = to_fraction(mpmath.exp(-1))
    assert abs(report.remainder_st - oracle) < Fraction(1, 10 ** 6)


@pytest.mark.parametrize("u, x0", [("x^k", Fraction(1, 2)), ("0", Fraction(1))])
def test_sum_theorem_uniform_evidence(u, x0):
    assert sum_theorem_probe(u, x0).verdict == UNIFORM_EVIDENCE


def test_sum_theorem_offsets():
    report = sum_theorem_probe("x^k", Fraction(1, 2), "+2/N")
    assert report.probe_point == "1/2 + 2/<n>"
    with pytest.raises(DomainError):
        sum_theorem_probe("x^k", Fraction(1, 2), "1")
    with pytest.raises(DomainError):
        sum_theorem_probe("y^k", Fraction(1, 2))
