"""Expression trees, a small text grammar, and interval/point evaluators.

Grammar (ASCII only)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' integer)?
    atom   := number | name | name '(' expr ')' | '(' expr ')' | '-' factor

Function names are exactly exp, ln, sqrt, cosh, sinh, tanh, arcosh, artanh.
'^' takes an integer literal exponent and binds tighter than unary minus
applied to an atom, so -x^2 parses as -(x^2).  Constants are decimal
literals; they enter evaluation as outward-rounded enclosures of their exact
rational values.

Expressions are immutable after parsing and evaluation is pure, so disjoint
boxes can be evaluated in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import interval
from .errors import (
    DomainViolation,
    NonIntegerExponent,
    ParseError,
    UnboundVariable,
    UnknownFunction,
)
from .interval import FUNCTIONS, Interval, Scalar


@dataclass(frozen=True)
class Constant:
    text: str


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Unary:
    fn: str  # one of FUNCTIONS, or "neg"
    child: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # add | sub | mul | div
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Power:
    base: "Expr"
    exponent: int


Expr = Constant | Variable | Unary | Binary | Power

Binding = dict[str, Interval]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> Expr:
        node = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise ParseError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return node

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expr(self) -> Expr:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            node = Binary(_OPS[op], node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            node = Binary(_OPS[op], node, self.factor())
        return node

    def factor(self) -> Expr:
        node = self.atom()
        if self.peek() == "^":
            self.pos += 1
            node = Power(node, self.integer())
        return node

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        digits_start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits_start:
            raise NonIntegerExponent(start)
        # A following '.', digit-exponent marker, or name means a non-integer literal.
        if self.pos < len(self.text) and (self.text[self.pos] == "." or self.text[self.pos].isalpha()):
            raise NonIntegerExponent(start)
        return int(self.text[start:self.pos])

    def atom(self) -> Expr:
        ch = self.peek()
        start = self.pos
        if ch == "":
            raise ParseError("unexpected end of input", start)
        if ch == "-":
            self.pos += 1
            return Unary("neg", self.factor())
        if ch == "(":
            self.pos += 1
            node = self.expr()
            if self.peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return node
        if ch.isdigit() or ch == ".":
            return Constant(self.number())
        if ch.isalpha() or ch == "_":
            name = self.name()
            if self.peek() == "(":
                if name not in FUNCTIONS:
                    raise UnknownFunction(name, start)
                self.pos += 1
                node = self.expr()
                if self.peek() != ")":
                    raise ParseError("expected ')'", self.pos)
                self.pos += 1
                return Unary(name, node)
            return Variable(name)
        raise ParseError(f"unexpected {ch!r}", start)

    def number(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            self.pos += 1
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
        if self.pos < len(self.text) and self.text[self.pos] in "eE":
            mark = self.pos
            self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos] in "+-":
                self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos].isdigit():
                while self.pos < len(self.text) and self.text[self.pos].isdigit():
                    self.pos += 1
            else:
                self.pos = mark  # not an exponent, e.g. "2e" where e is a name
        text = self.text[start:self.pos]
        if text in (".",):
            raise ParseError("malformed number", start)
        return text

    def name(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Rendering (canonical, round-trips through parse)
# ---------------------------------------------------------------------------

_LEVEL_ADD, _LEVEL_MUL, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4


def _level(e: Expr) -> int:
    if isinstance(e, Binary):
        return _LEVEL_ADD if e.op in ("add", "sub") else _LEVEL_MUL
    if isinstance(e, Power):
        return _LEVEL_POW
    if isinstance(e, Unary) and e.fn == "neg":
        return _LEVEL_ADD  # renders like a leading '-'
    return _LEVEL_ATOM


def render(e: Expr) -> str:
    if isinstance(e, Constant):
        return e.text
    if isinstance(e, Variable):
        return e.name
    if isinstance(e, Unary):
        if e.fn == "neg":
            child = render(e.child)
            if _level(e.child) < _LEVEL_ATOM and not isinstance(e.child, Power):
                child = f"({child})"
            return f"-{child}"
        return f"{e.fn}({render(e.child)})"
    if isinstance(e, Power):
        base = render(e.base)
        if _level(e.base) < _LEVEL_ATOM:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    left = render(e.left)
    right = render(e.right)
    mine = _level(e)
    if _level(e.left) < mine:
        left = f"({left})"
    # Subtraction and division are left-associative: parenthesize a right
    # operand at the same level.
    if _level(e.right) < mine or (_level(e.right) == mine and e.op in ("sub", "div")):
        right = f"({right})"
    symbol = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[e.op]
    return f"{left}{symbol}{right}"


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Variable):
        return frozenset((e.name,))
    if isinstance(e, Constant):
        return frozenset()
    if isinstance(e, Unary):
        return free_vars(e.child)
    if isinstance(e, Power):
        return free_vars(e.base)
    return free_vars(e.left) | free_vars(e.right)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _constant_interval(text: str, precision: int) -> Interval:
    return Interval.from_decimal(text, precision=precision)


def eval_interval(e: Expr, binding: Binding, precision: int = interval.DEFAULT_PRECISION) -> Interval:
    """Enclosure of the exact image of the binding box under e.

    Domain violations carry the path of the offending node (child indices
    from the root).
    """
    return _eval(e, binding, precision, ())


def _eval(e: Expr, binding: Binding, precision: int, path: tuple[int, ...]) -> Interval:
    if isinstance(e, Constant):
        return _constant_interval(e.text, precision)
    if isinstance(e, Variable):
        try:
            return binding[e.name]
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, Unary):
        child = _eval(e.child, binding, precision, path + (0,))
        if e.fn == "neg":
            return interval.neg(child)
        try:
            return interval.fn_eval(e.fn, child, precision)
        except DomainViolation as err:
            raise DomainViolation(err.function, err.detail, node_path=path) from None
    if isinstance(e, Power):
        base = _eval(e.base, binding, precision, path + (0,))
        return interval.pow_int(base, e.exponent, precision)
    left = _eval(e.left, binding, precision, path + (0,))
    right = _eval(e.right, binding, precision, path + (1,))
    return interval.arith(e.op, left, right, precision)


def to_point_binding(points: dict, precision: int = interval.DEFAULT_PRECISION) -> Binding:
    """Build a degenerate/outward Binding from Scalars, ints, or decimal strings."""
    binding: Binding = {}
    for name, value in points.items():
        if isinstance(value, Interval):
            binding[name] = value
        elif isinstance(value, Scalar):
            binding[name] = Interval.point(value)
        elif isinstance(value, int):
            binding[name] = Interval.from_int(value, precision)
        elif isinstance(value, str):
            binding[name] = Interval.from_decimal(value, precision=precision)
        else:
            raise TypeError(f"cannot bind {name}={value!r}")
    return binding


def eval_point(e: Expr, points: dict, precision: int = interval.DEFAULT_PRECISION) -> Interval:
    """Degenerate-interval specialization of eval_interval."""
    return eval_interval(e, to_point_binding(points, precision), precision)


def substitute(e: Expr, var: str, replacement: Expr) -> Expr:
    """Capture-free substitution of an expression for every occurrence of var."""
    if isinstance(e, Variable):
        return replacement if e.name == var else e
    if isinstance(e, Constant):
        return e
    if isinstance(e, Unary):
        return Unary(e.fn, substitute(e.child, var, replacement))
    if isinstance(e, Power):
        return Power(substitute(e.base, var, replacement), e.exponent)
    return Binary(e.op, substitute(e.left, var, replacement), substitute(e.right, var, replacement))
