from fractions import Fraction

import pytest

from core.errors import DomainError, NotCauchy, NotEventuallyNonzero, NotFinite, Undecided
from core.expr import parse
from core.numeric import DEFAULT_CONFIG, Classification, FieldConfig, Sign, Tag, classify, infinitely_close
from core.omega import (
    AgreementPolicy,
    HyperNat,
    HyperSeq,
    Verdict,
    hs_apply,
    hs_arith,
    hs_compare,
    hs_null_quotient_demo,
    hs_with_terms,
)


def seq(text, config=DEFAULT_CONFIG):
    return HyperSeq.from_expr(text, config)


def test_probe_indices():
    assert seq("n").probe_indices(64) == [7, 8, 15, 16, 31, 32, 63, 64]
    patched = hs_with_terms(seq("n"), {20: Fraction(0)})
    assert patched.probe_indices(64) == [31, 32, 63, 64]


def test_termwise_arithmetic():
    a, b = seq("1/n"), seq("n")
    assert all((a * a).term(n) == Fraction(1, n * n) for n in range(1, 50))
    assert all((b + (-b)).term(n) == 0 for n in range(1, 50))
    assert all((1 / b).term(n) == Fraction(1, n) for n in range(1, 50))
    assert hs_arith("-", b, a).term(4) == Fraction(15, 4)


def test_ring_laws_at_random_indices(rng):
    a, b, c = seq("1/n + 2"), seq("(-1)^n*n"), seq("3/(n + 1)")
    total, distributed, difference = a + b, a * (b + c), (a - b) * c
    for _ in range(1000):
        n = rng.randint(1, 2 ** 20)
        x, y, z = a.term(n), b.term(n), c.term(n)
        assert total.term(n) == x + y
        assert distributed.term(n) == x * y + x * z
        assert difference.term(n) == x * z - y * z


@pytest.mark.parametrize(
    "text, tag, sign",
    [
        ("1/n", Tag.INFINITESIMAL, Sign.POSITIVE),
        ("1/n^2", Tag.INFINITESIMAL, Sign.POSITIVE),
        ("-1/log(n + 1)", Tag.INFINITESIMAL, Sign.NEGATIVE),
        ("2 + 1/n", Tag.APPRECIABLE, Sign.POSITIVE),
        ("n", Tag.INFINITE, Sign.POSITIVE),
        ("n - n", Tag.ZERO, Sign.ZERO),
    ],
)
def test_classify(text, tag, sign):
    assert classify(seq(text)) == Classification(tag, sign)


def test_oscillation_is_undecided():
    with pytest.raises(Undecided):
        seq("(-1)^n").classify()


def test_standard_part():
    assert seq("2 + 1/n").standard_part() == 2
    with pytest.raises(NotFinite):
        seq("n^2").standard_part()
    # transcendental limit, known to working precision
    assert abs(seq("(1 + 1/n)^n").standard_part() - Fraction(271828182846, 10 ** 11)) < Fraction(1, 10 ** 9)


def test_order():
    assert seq("1/n^2").order() == 2
    assert seq("3*n").order() == -1


def test_infinitely_close():
    assert infinitely_close(seq("1/n"), seq("1/n^2"))
    assert not infinitely_close(seq("1 + 1/n"), seq("2"))


def test_compare():
    assert hs_compare(seq("1/n^2"), seq("1/n")).verdict is Verdict.LESS
    assert hs_compare(seq("n"), seq("n")).verdict is Verdict.EVENTUALLY_EQUAL
    assert hs_compare(seq("n^2"), seq("1000*n")).verdict is Verdict.GREATER


@pytest.mark.parametrize("cutoff", [2 ** 10, 2 ** 14, 2 ** 17, 2 ** 20])
def test_oscillation_never_ordered(cutoff):
    policy = AgreementPolicy(cutoff=cutoff)
    result = hs_compare(seq("(-1)^n"), HyperSeq.constant(0), policy)
    assert result.verdict is Verdict.UNDECIDED
    assert result.probe_indices[-1] == cutoff


def test_finite_exceptions_do_not_change_verdicts():
    a = hs_with_terms(seq("1/n^2"), {1: Fraction(5), 3: Fraction(-7)})
    result = hs_compare(a, seq("1/n"))
    assert result.verdict is Verdict.LESS
    assert result.exception_set == [1, 3]


def test_division_by_a_zero_tail():
    with pytest.raises(NotEventuallyNonzero):
        hs_arith("/", seq("1"), seq("n - n"))
    with pytest.raises(DomainError):
        seq("1/(n - n)")


def test_early_division_failures_are_patched():
    quotient = seq("1/(n - 3)")
    assert quotient.term(3) == 0
    assert 3 in quotient.exceptions
    assert quotient.classify() == Classification(Tag.INFINITESIMAL, Sign.POSITIVE)


def test_apply():
    square = hs_apply(parse("x^2"), seq("1/n"))
    assert all(square.term(n) == Fraction(1, n * n) for n in range(1, 20))
    shifted = hs_apply(parse("x + 1"), HyperSeq.constant(0))
    assert shifted.standard_part() == 1
    sine = seq("1/n").apply("sin")
    assert infinitely_close(sine, seq("1/n"))
    assert classify(sine - seq("1/n")) == Classification(Tag.INFINITESIMAL, Sign.NEGATIVE)


def test_hypernat():
    N = HyperNat.from_expr("2*n")
    assert N.value(5) == 10
    assert HyperNat.identity().index_horizon(4096) == 4096
    with pytest.raises(DomainError):
        HyperNat.from_expr("5")
    with pytest.raises(DomainError):
        HyperNat.from_expr("n/2")


@pytest.mark.parametrize("source, fifth", [("n", 5), ("n^2", 25), ("2*n", 10), ("n + 3", 8)])
def test_increasing_hypernats_construct(source, fifth):
    assert HyperNat.from_expr(source).value(5) == fifth


def test_identity_hypernat():
    assert HyperNat.identity().value(5) == 5


def test_hypernat_rejects_a_dip():
    with pytest.raises(DomainError):
        HyperNat(hs_with_terms(seq("n"), {10: Fraction(1)}))


def test_null_quotient_demo():
    report = hs_null_quotient_demo(seq("(1 + 1/n)^n"))
    assert abs(report.represented - Fraction(2718281828459, 10 ** 12)) < Fraction(1, 10 ** 9)
    assert report.witness_class.tag in (Tag.INFINITESIMAL, Tag.ZERO)
    assert any("plus the null sequences" in line for line in report.trace)

    null = hs_null_quotient_demo(seq("1/n"))
    assert null.represented == 0
    assert null.witness_certified

    with pytest.raises(NotCauchy):
        hs_null_quotient_demo(seq("(-1)^n"))


def test_null_quotient_with_oscillating_witness():
    report = hs_null_quotient_demo(seq("1 + (-1)^n/n"))
    assert abs(report.represented - 1) < Fraction(1, 10 ** 9)
    assert report.witness_class is None
    assert not report.witness_certified
    assert "undecided" in report.trace[1]
    assert "plus the null sequences" in report.trace[1]
    assert report.trace[2].startswith("ultrapower side: Undecided")


def test_small_cutoff_is_undecided():
    config = FieldConfig(sequence_cutoff=32)
    with pytest.raises(Undecided):
        seq("1/n", config).classify()
