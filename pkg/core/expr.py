"""
Expression Language
Parser, AST, printer, evaluation over any backend and symbolic differentiation
for functions of one variable (x), an index (n) and a parameter (k)
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

import mpmath

from core.errors import DivisionByZero, DomainError, ParseError, UnboundVariable
from core.numeric import (
    DEFAULT_CONFIG,
    FieldConfig,
    apply_function,
    format_decimal,
    power_value,
    root_value,
    to_mpf,
)

logger = logging.getLogger(__name__)

VARIABLES = ("x", "n", "k")
INDEX_VARIABLES = ("n", "k")
FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs")

# ============================================================================
# AST
# ============================================================================

class Expr:
    """Base of all AST nodes; printing goes through to_text"""

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Lit(Expr):
    value: Fraction


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr


Exponent = Union[Fraction, str]


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    """base ^ exponent, where the exponent is a rational literal or an index variable"""

    base: Expr
    exponent: Exponent


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr


def Add(left: Expr, right: Expr) -> BinOp:
    return BinOp("+", left, right)


def Sub(left: Expr, right: Expr) -> BinOp:
    return BinOp("-", left, right)


def Mul(left: Expr, right: Expr) -> BinOp:
    return BinOp("*", left, right)


def Div(left: Expr, right: Expr) -> BinOp:
    return BinOp("/", left, right)


# ============================================================================
# TOKENIZER
# ============================================================================

_TOKEN_RE = re.compile(r"\s*(?:(?P<number>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")

Token = Tuple[str, str, int]  # (kind, text, char offset)


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    position = 0
    while True:
        while position < len(text) and text[position].isspace():
            position += 1
        if position >= len(text):
            break
        match = _TOKEN_RE.match(text, position)
        if not match:
            raise ParseError(f"unexpected character {text[position]!r}", _byte_offset(text, position),
                             ["number", "identifier", "operator"])
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append((kind, match.group(kind), start))
        position = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


# ============================================================================
# PARSER
# ============================================================================

_ATOM_START = ("number", "identifier", "(", "-")


class _Parser:
    """
    Recursive-descent parser

        expr   := term (('+'|'-') term)*
        term   := factor (('*'|'/') factor)*
        factor := atom ('^' exponent)?
        atom   := number | var | func '(' expr ')' | '(' expr ')' | '-' atom
        exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')' | 'n' | 'k'
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def error(self, message: str, expected) -> ParseError:
        _, text, offset = self.peek()
        found = f"'{text}'" if text else "end of input"
        return ParseError(f"{message}, found {found}", _byte_offset(self.text, offset), expected)

    def expect_op(self, symbol: str):
        kind, text, _ = self.peek()
        if kind != "op" or text != symbol:
            raise self.error(f"expected '{symbol}'", [symbol])
        self.advance()

    def at_op(self, *symbols: str) -> bool:
        kind, text, _ = self.peek()
        return kind == "op" and text in symbols

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek()[0] != "end":
            raise self.error("unexpected token", ["+", "-", "*", "/", "^", "end of input"])
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.at_op("*", "/"):
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        node = self.atom()
        if self.at_op("^"):
            self.advance()
            node = Pow(node, self.exponent())
            if self.at_op("^"):
                raise self.error("chained '^' needs parentheses", ["*", "/", "+", "-", ")", "end of input"])
        return node

    def integer(self) -> int:
        kind, text, _ = self.peek()
        if kind != "number" or "." in text:
            raise self.error("expected an integer exponent", ["integer"])
        self.advance()
        return int(text)

    def exponent(self) -> Exponent:
        kind, text, _ = self.peek()
        if kind == "ident":
            if text not in INDEX_VARIABLES:
                raise self.error("exponent variable must be an index", ["n", "k"])
            self.advance()
            return text
        if self.at_op("-"):
            self.advance()
            return Fraction(-self.integer())
        if self.at_op("("):
            self.advance()
            sign = 1
            if self.at_op("-"):
                self.advance()
                sign = -1
            numerator = self.integer()
            denominator = 1
            if self.at_op("/"):
                self.advance()
                denominator = self.integer()
                if denominator == 0:
                    self.index -= 1
                    raise self.error("zero denominator in exponent", ["positive integer"])
            self.expect_op(")")
            return Fraction(sign * numerator, denominator)
        if kind == "number":
            return Fraction(self.integer())
        raise self.error("expected an exponent", ["integer", "(", "-", "n", "k"])

    def atom(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "number":
            self.advance()
            return Lit(Fraction(text))
        if kind == "ident":
            if text in FUNCTIONS:
                self.advance()
                self.expect_op("(")
                argument = self.expr()
                self.expect_op(")")
                return Call(text, argument)
            if text in VARIABLES:
                self.advance()
                return Var(text)
            raise self.error("unknown identifier", list(VARIABLES) + list(FUNCTIONS))
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        if self.at_op("-"):
            self.advance()
            return Neg(self.atom())
        raise self.error("expected an operand", _ATOM_START)


def parse(text: str) -> Expr:
    """Parse one expression; raises ParseError with byte offset and expected tokens"""
    if not text or not text.strip():
        raise ParseError("empty expression", 0, ["number", "identifier", "(", "-"])
    return _Parser(text).parse()


# ============================================================================
# PRINTER
# ============================================================================

def _terminating_digits(q: Fraction) -> Optional[int]:
    """Number of decimals needed to print q exactly, None if it never terminates"""
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    return max(twos, fives)


def _literal_text(q: Fraction) -> str:
    digits = _terminating_digits(q)
    if digits is None:
        return f"({q.numerator}/{q.denominator})"
    return format_decimal(q, digits)


def _exponent_text(exponent: Exponent) -> str:
    if isinstance(exponent, str):
        return exponent
    if exponent.denominator == 1:
        return str(exponent.numerator)
    return f"({exponent.numerator}/{exponent.denominator})"


def _atom_text(e: Expr) -> str:
    if isinstance(e, (Lit, Var, Call, Neg)):
        return to_text(e)
    return f"({to_text(e)})"


def to_text(e: Expr) -> str:
    """Render with the fewest parentheses that still parse back to the same tree"""
    if isinstance(e, Lit):
        return _literal_text(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, Neg):
        return "-" + _atom_text(e.operand)
    if isinstance(e, Pow):
        return f"{_atom_text(e.base)}^{_exponent_text(e.exponent)}"
    if isinstance(e, BinOp):
        additive = ("+", "-")
        left = to_text(e.left)
        right = to_text(e.right)
        if e.op in additive:
            if isinstance(e.right, BinOp) and e.right.op in additive:
                right = f"({right})"
            return f"{left} {e.op} {right}"
        if isinstance(e.left, BinOp) and e.left.op in additive:
            left = f"({left})"
        if isinstance(e.right, BinOp):
            right = f"({right})"
        return f"{left}{e.op}{right}"
    raise TypeError(f"not an expression node: {e!r}")


# ============================================================================
# EVALUATION
# ============================================================================

Binding = Dict[str, object]


def _is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction))


def _power(base, exponent, config: FieldConfig):
    """base ** integer exponent for any backend value"""
    if _is_scalar(base) and _is_scalar(exponent):
        exponent = Fraction(exponent)
        if exponent.denominator != 1:
            raise DomainError("index exponent must be an integer")
        if base == 0 and exponent < 0:
            raise DivisionByZero("zero raised to a negative power")
        value, _ = power_value(Fraction(base), int(exponent), config)
        return value
    if isinstance(base, mpmath.mpf) and _is_scalar(exponent):
        if base == 0 and exponent < 0:
            raise DivisionByZero("zero raised to a negative power")
        return base ** int(exponent)
    if _is_scalar(exponent):
        return base ** int(exponent)
    if _is_scalar(base):
        return exponent.__rpow__(Fraction(base))
    return base ** exponent


def _rational_power(base, exponent: Fraction, config: FieldConfig):
    """base ** (p/q): q-th root first, then the p-th power"""
    p, q = exponent.numerator, exponent.denominator
    if q != 1:
        if _is_scalar(base):
            base, _ = root_value(Fraction(base), q, config)
        elif isinstance(base, mpmath.mpf):
            if base < 0 and q % 2 == 0:
                raise DomainError("even root of a negative value")
            magnitude = mpmath.root(abs(base), q)
            base = -magnitude if base < 0 else magnitude
        else:
            base = base.root(q)
    return _power(base, p, config)


def evaluate(e: Expr, binding: Binding, config: FieldConfig = DEFAULT_CONFIG):
    """
    Evaluate an expression by structural recursion

    Args:
        e: parsed expression
        binding: variable name -> Fraction, mpf or backend element
        config: working precision for transcendental scalars

    Returns:
        A value of the bound variables' type (Fraction when everything is rational)
    """
    numeric = any(isinstance(value, mpmath.mpf) for value in binding.values())
    try:
        return _evaluate(e, binding, config, numeric)
    except ZeroDivisionError as exc:
        raise DivisionByZero(f"division by zero while evaluating {to_text(e)}") from exc


def _evaluate(e: Expr, binding: Binding, config: FieldConfig, numeric: bool):
    if isinstance(e, Lit):
        return to_mpf(e.value) if numeric else e.value
    if isinstance(e, Var):
        if e.name not in binding:
            raise UnboundVariable(f"variable '{e.name}' is not bound")
        value = binding[e.name]
        if isinstance(value, int):
            value = Fraction(value)
        # mpf does not mix with Fraction
        if numeric and isinstance(value, Fraction):
            return to_mpf(value)
        return value
    if isinstance(e, Neg):
        return -_evaluate(e.operand, binding, config, numeric)
    if isinstance(e, BinOp):
        left = _evaluate(e.left, binding, config, numeric)
        right = _evaluate(e.right, binding, config, numeric)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if _is_scalar(right) and right == 0:
            raise DivisionByZero(f"division by zero in {to_text(e)}")
        return left / right
    if isinstance(e, Pow):
        base = _evaluate(e.base, binding, config, numeric)
        if isinstance(e.exponent, str):
            return _power(base, _evaluate(Var(e.exponent), binding, config, False), config)
        return _rational_power(base, e.exponent, config)
    if isinstance(e, Call):
        argument = _evaluate(e.arg, binding, config, numeric)
        return apply_function(argument, e.func, config)
    raise TypeError(f"not an expression node: {e!r}")


def free_variables(e: Expr) -> FrozenSet[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Neg):
        return free_variables(e.operand)
    if isinstance(e, BinOp):
        return free_variables(e.left) | free_variables(e.right)
    if isinstance(e, Pow):
        names = free_variables(e.base)
        return names | {e.exponent} if isinstance(e.exponent, str) else names
    if isinstance(e, Call):
        return free_variables(e.arg)
    return frozenset()


def substitute(e: Expr, name: str, replacement: Expr) -> Expr:
    """Replace every occurrence of a variable by an expression"""
    if isinstance(e, Var):
        return replacement if e.name == name else e
    if isinstance(e, Neg):
        return Neg(substitute(e.operand, name, replacement))
    if isinstance(e, BinOp):
        return BinOp(e.op, substitute(e.left, name, replacement), substitute(e.right, name, replacement))
    if isinstance(e, Pow):
        if e.exponent == name and not isinstance(replacement, Var):
            raise DomainError(f"cannot substitute a compound expression into the exponent '{name}'")
        exponent = replacement.name if e.exponent == name else e.exponent
        return Pow(substitute(e.base, name, replacement), exponent)
    if isinstance(e, Call):
        return Call(e.func, substitute(e.arg, name, replacement))
    return e


# ============================================================================
# SYMBOLIC DIFFERENTIATION (constant folding only)
# ============================================================================

def constant(q: Fraction) -> Expr:
    """A literal in the shape the parser produces for it"""
    q = Fraction(q)
    if q < 0:
        return Neg(constant(-q))
    if _terminating_digits(q) is None:
        return Div(Lit(Fraction(q.numerator)), Lit(Fraction(q.denominator)))
    return Lit(q)


def constant_value(e: Expr) -> Optional[Fraction]:
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Neg):
        inner = constant_value(e.operand)
        return None if inner is None else -inner
    if isinstance(e, BinOp) and e.op == "/":
        num, den = constant_value(e.left), constant_value(e.right)
        if num is not None and den:
            return num / den
    return None


def _add(a: Expr, b: Expr) -> Expr:
    ca, cb = constant_value(a), constant_value(b)
    if ca is not None and cb is not None:
        return constant(ca + cb)
    if ca == 0:
        return b
    if cb == 0:
        return a
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    ca, cb = constant_value(a), constant_value(b)
    if ca is not None and cb is not None:
        return constant(ca - cb)
    if cb == 0:
        return a
    if ca == 0:
        return _neg(b)
    return Sub(a, b)


def _neg(a: Expr) -> Expr:
    ca = constant_value(a)
    if ca is not None:
        return constant(-ca)
    return Neg(a)


def _mul(a: Expr, b: Expr) -> Expr:
    ca, cb = constant_value(a), constant_value(b)
    if ca is not None and cb is not None:
        return constant(ca * cb)
    if ca == 0 or cb == 0:
        return Lit(Fraction(0))
    if ca == 1:
        return b
    if cb == 1:
        return a
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    ca, cb = constant_value(a), constant_value(b)
    if ca is not None and cb:
        return constant(ca / cb)
    if ca == 0:
        return Lit(Fraction(0))
    if cb == 1:
        return a
    return Div(a, b)


def _pow(base: Expr, exponent: Exponent) -> Expr:
    if isinstance(exponent, Fraction):
        if exponent == 1:
            return base
        if exponent == 0:
            return Lit(Fraction(1))
        cb = constant_value(base)
        if cb is not None and exponent.denominator == 1 and (cb != 0 or exponent > 0):
            return constant(cb ** int(exponent))
    return Pow(base, exponent)


def symbolic_diff(e: Expr, var: str = "x") -> Expr:
    """d/dvar by the standard rules; n and k are constants unless they are `var`"""
    if isinstance(e, Lit):
        return Lit(Fraction(0))
    if isinstance(e, Var):
        return Lit(Fraction(1 if e.name == var else 0))
    if isinstance(e, Neg):
        return _neg(symbolic_diff(e.operand, var))
    if isinstance(e, BinOp):
        du = symbolic_diff(e.left, var)
        dv = symbolic_diff(e.right, var)
        if e.op == "+":
            return _add(du, dv)
        if e.op == "-":
            return _sub(du, dv)
        if e.op == "*":
            return _add(_mul(du, e.right), _mul(e.left, dv))
        numerator = _sub(_mul(du, e.right), _mul(e.left, dv))
        return _div(numerator, _pow(e.right, Fraction(2)))
    if isinstance(e, Pow):
        du = symbolic_diff(e.base, var)
        if isinstance(e.exponent, str):
            if e.exponent == var:
                raise DomainError(f"cannot differentiate with respect to the exponent '{var}'")
            outer = _div(_mul(Var(e.exponent), e), e.base)
        else:
            outer = _mul(constant(e.exponent), _pow(e.base, e.exponent - 1))
        return _mul(outer, du)
    if isinstance(e, Call):
        du = symbolic_diff(e.arg, var)
        u = e.arg
        if e.func == "sin":
            outer = Call("cos", u)
        elif e.func == "cos":
            outer = _neg(Call("sin", u))
        elif e.func == "exp":
            outer = e
        elif e.func == "log":
            return _div(du, u)
        elif e.func == "sqrt":
            return _div(du, _mul(Lit(Fraction(2)), e))
        else:
            outer = _div(e, u)
        return _mul(outer, du)
    raise TypeError(f"not an expression node: {e!r}")
