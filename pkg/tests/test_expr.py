from fractions import Fraction

import mpmath
import pytest

from core.errors import DivisionByZero, DomainError, NoTransfer, ParseError, UnboundVariable
from core.expr import (
    FUNCTIONS,
    Add,
    BinOp,
    Call,
    Div,
    Lit,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    evaluate,
    free_variables,
    parse,
    substitute,
    symbolic_diff,
    to_text,
)
from core.levi_civita import LCNumber
from core.numeric import DEFAULT_CONFIG, to_mpf
from core.ratfunc import RatFuncElem

X = Var("x")
LITERALS = [Fraction(0), Fraction(1), Fraction(2), Fraction(7), Fraction(1, 2), Fraction(9, 4), Fraction(3, 40)]
EXPONENTS = [Fraction(2), Fraction(3), Fraction(0), Fraction(-1), Fraction(1, 2), Fraction(-3, 2), "n", "k"]


def random_ast(rng, depth=3):
    if depth == 0 or rng.random() < 0.25:
        return Lit(rng.choice(LITERALS)) if rng.random() < 0.4 else Var(rng.choice("xnk"))
    kind = rng.randrange(4)
    if kind == 0:
        return BinOp(rng.choice("+-*/"), random_ast(rng, depth - 1), random_ast(rng, depth - 1))
    if kind == 1:
        return Neg(random_ast(rng, depth - 1))
    if kind == 2:
        return Pow(random_ast(rng, depth - 1), rng.choice(EXPONENTS))
    return Call(rng.choice(FUNCTIONS), random_ast(rng, depth - 1))


def random_polynomial(rng):
    expr = Lit(Fraction(rng.randint(0, 9), rng.randint(1, 4)))
    for power in range(1, rng.randint(1, 6) + 1):
        coefficient = Div(Lit(Fraction(rng.randint(1, 9))), Lit(Fraction(rng.randint(1, 5))))
        term = Mul(coefficient, Pow(X, Fraction(power)))
        expr = Sub(expr, term) if rng.random() < 0.5 else Add(expr, term)
    return expr


# ============================================================================
# PARSER
# ============================================================================

def test_parse_shapes():
    assert parse("x^2 + 1") == Add(Pow(X, Fraction(2)), Lit(Fraction(1)))
    assert parse("sin(x)/x") == Div(Call("sin", X), X)
    assert parse("x^(1/2)") == Pow(X, Fraction(1, 2))
    assert parse("(-1)^n") == Pow(Neg(Lit(Fraction(1))), "n")
    assert parse("1 - 2 - 3") == Sub(Sub(Lit(Fraction(1)), Lit(Fraction(2))), Lit(Fraction(3)))
    assert parse("0.25*x") == Mul(Lit(Fraction(1, 4)), X)


def test_implicit_multiplication_is_rejected():
    with pytest.raises(ParseError) as info:
        parse("2x")
    assert info.value.offset == 1
    assert "*" in info.value.expected


@pytest.mark.parametrize("text", ["", "x +", "foo(x)", "x^y", "x^2^3", "sin x", "(x", "x $ 1"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_parse_error_offset_is_in_bytes():
    with pytest.raises(ParseError) as info:
        parse("x +\u00a0$")
    assert info.value.offset == 5


def test_round_trip_on_random_trees(rng):
    for _ in range(500):
        tree = random_ast(rng)
        assert parse(to_text(tree)) == tree


def test_printer_uses_few_parentheses():
    assert to_text(parse("(x + 1)*(x - 1)")) == "(x + 1)*(x - 1)"
    assert to_text(parse("x - (1 - x)")) == "x - (1 - x)"
    assert to_text(parse("1/3")) == "1/3"
    assert to_text(Lit(Fraction(1, 3))) == "(1/3)"


# ============================================================================
# EVALUATION
# ============================================================================

def test_evaluate_rationals():
    assert evaluate(parse("1/n"), {"n": 5}) == Fraction(1, 5)
    assert evaluate(parse("(1/2)^k"), {"k": 3}) == Fraction(1, 8)
    assert evaluate(parse("x^(1/2)"), {"x": Fraction(9, 4)}) == Fraction(3, 2)
    assert evaluate(parse("x^(-2)"), {"x": Fraction(2)}) == Fraction(1, 4)


def test_evaluate_errors():
    with pytest.raises(UnboundVariable):
        evaluate(parse("x + n"), {"x": 1})
    with pytest.raises(DivisionByZero):
        evaluate(parse("1/x"), {"x": 0})
    with pytest.raises(DomainError):
        evaluate(parse("log(x)"), {"x": Fraction(-1)})
    with pytest.raises(DomainError):
        evaluate(parse("sqrt(x)"), {"x": Fraction(-4)})


def test_evaluate_in_backends():
    eps = LCNumber.epsilon()
    assert evaluate(parse("x^2 + 1"), {"x": eps}) == 1 + eps * eps
    with pytest.raises(NoTransfer):
        evaluate(parse("sin(x)"), {"x": RatFuncElem.generator()})


def test_evaluate_numeric_mode():
    with mpmath.workdps(30):
        value = evaluate(parse("x^k*(1 - x)"), {"x": mpmath.mpf("0.5"), "k": Fraction(3)})
        assert value == mpmath.mpf("0.0625")


def test_free_variables_and_substitute():
    e = parse("x^k + sin(n)")
    assert free_variables(e) == {"x", "k", "n"}
    assert substitute(parse("x^2 + x"), "x", parse("n + 1")) == parse("(n + 1)^2 + (n + 1)")
    assert substitute(parse("x^k"), "k", Var("n")) == parse("x^n")
    with pytest.raises(DomainError):
        substitute(parse("x^k"), "k", parse("n + 1"))


# ============================================================================
# SYMBOLIC DIFFERENTIATION
# ============================================================================

def test_symbolic_diff_shapes():
    assert symbolic_diff(parse("x^2")) == Mul(Lit(Fraction(2)), X)
    assert symbolic_diff(parse("sin(x)")) == Call("cos", X)
    assert symbolic_diff(parse("x*exp(x)")) == Add(Call("exp", X), Mul(X, Call("exp", X)))
    assert symbolic_diff(parse("n^2"), "x") == Lit(Fraction(0))


def test_symbolic_diff_against_numeric_derivative(rng):
    cases = ["sin(x)*cos(x)", "exp(x^2)/x", "log(x)^3", "sqrt(1 + x^2)", "x^n", "abs(x)*x", "1/(x + 2)^(1/2)"]
    with mpmath.workdps(40):
        for text in cases:
            f = parse(text)
            df = symbolic_diff(f)
            for _ in range(4):
                x0 = Fraction(rng.randint(2, 30), 10)
                binding = {"n": Fraction(3)}

                def g(t):
                    return evaluate(f, {**binding, "x": t}, DEFAULT_CONFIG)

                oracle = mpmath.diff(g, to_mpf(x0))
                value = evaluate(df, {**binding, "x": to_mpf(x0)}, DEFAULT_CONFIG)
                assert abs(value - oracle) < mpmath.mpf(10) ** -25 * (1 + abs(oracle)), text


def test_symbolic_diff_of_polynomials_is_exact(rng):
    for _ in range(20):
        p = random_polynomial(rng)
        dp = symbolic_diff(p)
        x0 = Fraction(rng.randint(-20, 20), rng.randint(1, 7))
        h = Fraction(1, 10 ** 30)
        difference = (evaluate(p, {"x": x0 + h}) - evaluate(p, {"x": x0})) / h
        assert abs(difference - evaluate(dp, {"x": x0})) < Fraction(1, 10 ** 20)
