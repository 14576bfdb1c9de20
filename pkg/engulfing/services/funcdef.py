"""
Function definition language.

Parses expressions such as ``piecewise(x<0: x^2, x>=0: x^4)`` or
``max(x1, 2*x2 - 1) + exp(x1)`` into immutable trees with exact evaluation,
directional-derivative and 1D derivative rules.

Grammar (LL(1), whitespace-insensitive):

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*          one factor must be constant
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' INTEGER)?         INTEGER >= 1
    atom   := NUMBER | VAR | '(' expr ')'
            | 'exp' '(' expr ')' | 'abs' '(' expr ')'
            | 'max' '(' expr (',' expr)* ')'
            | 'piecewise' '(' cond ':' expr (',' cond ':' expr)* ')'
    cond   := VAR ('<' | '<=' | '>' | '>=') ['-'] NUMBER
    VAR    := 'x' (dimension 1) | 'x1' .. 'xn'
"""
import logging
import math
import re
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..helpers.error_handlers import (ExpressionDimensionError, ExpressionSyntaxError,
                                      UnsupportedConstructError)
from ..models.function_spec import ConvexBody

logger = logging.getLogger(__name__)


def _safe_pow(value: float, k: int) -> float:
    try:
        return value ** k
    except OverflowError:
        return math.inf if (value > 0 or k % 2 == 0) else -math.inf


def _safe_exp(value: float) -> float:
    try:
        return math.exp(value)
    except OverflowError:
        return math.inf


# ---------------------------------------------------------------------------
# Nodes
# ---------------------------------------------------------------------------

class Node:
    """Base of all expression nodes."""

    def evaluate(self, x: Sequence[float]) -> float:
        raise NotImplementedError

    def directional(self, x: Sequence[float], v: Sequence[float]) -> float:
        raise NotImplementedError

    def derivative(self) -> 'Node':
        """Formal derivative of a 1D expression, valid away from kinks."""
        raise NotImplementedError

    def children(self) -> Tuple['Node', ...]:
        return ()

    def walk(self) -> Iterator['Node']:
        yield self
        for child in self.children():
            yield from child.walk()


@dataclass(frozen=True)
class Const(Node):
    value: float

    def evaluate(self, x):
        return self.value

    def directional(self, x, v):
        return 0.0

    def derivative(self):
        return Const(0.0)


@dataclass(frozen=True)
class Var(Node):
    index: int

    def evaluate(self, x):
        return float(x[self.index])

    def directional(self, x, v):
        return float(v[self.index])

    def derivative(self):
        return Const(1.0)


@dataclass(frozen=True)
class Sum(Node):
    terms: Tuple[Node, ...]

    def evaluate(self, x):
        return sum(t.evaluate(x) for t in self.terms)

    def directional(self, x, v):
        return sum(t.directional(x, v) for t in self.terms)

    def derivative(self):
        return _add([t.derivative() for t in self.terms])

    def children(self):
        return self.terms


@dataclass(frozen=True)
class Scale(Node):
    factor: float
    arg: Node

    def evaluate(self, x):
        return self.factor * self.arg.evaluate(x)

    def directional(self, x, v):
        return self.factor * self.arg.directional(x, v)

    def derivative(self):
        return _scale(self.factor, self.arg.derivative())

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Power(Node):
    base: Node
    exponent: int

    def evaluate(self, x):
        return _safe_pow(self.base.evaluate(x), self.exponent)

    def directional(self, x, v):
        inner = self.base.directional(x, v)
        if inner == 0.0:
            return 0.0
        return self.exponent * _safe_pow(self.base.evaluate(x), self.exponent - 1) * inner

    def derivative(self):
        outer = _scale(float(self.exponent), _power(self.base, self.exponent - 1))
        return _mul(outer, self.base.derivative())

    def children(self):
        return (self.base,)


@dataclass(frozen=True)
class Exp(Node):
    arg: Node

    def evaluate(self, x):
        return _safe_exp(self.arg.evaluate(x))

    def directional(self, x, v):
        inner = self.arg.directional(x, v)
        if inner == 0.0:
            return 0.0
        return _safe_exp(self.arg.evaluate(x)) * inner

    def derivative(self):
        return _mul(self, self.arg.derivative())

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Abs(Node):
    arg: Node

    def evaluate(self, x):
        return abs(self.arg.evaluate(x))

    def directional(self, x, v):
        value = self.arg.evaluate(x)
        inner = self.arg.directional(x, v)
        if value > 0:
            return inner
        if value < 0:
            return -inner
        return abs(inner)

    def derivative(self):
        return _mul(Sign(self.arg), self.arg.derivative())

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Max(Node):
    args: Tuple[Node, ...]

    def evaluate(self, x):
        return max(a.evaluate(x) for a in self.args)

    def directional(self, x, v):
        values = [a.evaluate(x) for a in self.args]
        top = max(values)
        return max(a.directional(x, v) for a, value in zip(self.args, values) if value == top)

    def derivative(self):
        return Active(self.args, tuple(a.derivative() for a in self.args))

    def children(self):
        return self.args


@dataclass(frozen=True)
class Condition:
    op: str
    bound: float

    def holds(self, u: float) -> bool:
        if self.op == '<':
            return u < self.bound
        if self.op == '<=':
            return u <= self.bound
        if self.op == '>':
            return u > self.bound
        return u >= self.bound


_COMPLEMENT = {'<': '>=', '<=': '>'}


@dataclass(frozen=True)
class Piecewise(Node):
    """1D piecewise expression; conditions partition the line in increasing order."""
    conditions: Tuple[Condition, ...]
    branches: Tuple[Node, ...]

    def __post_init__(self):
        if len(self.conditions) != len(self.branches) or len(self.branches) < 2:
            raise UnsupportedConstructError("piecewise needs at least two branches, one per condition")
        heads, last = self.conditions[:-1], self.conditions[-1]
        if any(c.op not in _COMPLEMENT for c in heads):
            raise UnsupportedConstructError("piecewise conditions before the last must be '<' or '<='")
        bounds = [c.bound for c in heads]
        if any(b >= a for a, b in zip(bounds[1:], bounds[:-1])):
            raise UnsupportedConstructError("piecewise breakpoints must be strictly increasing")
        if last.bound != bounds[-1] or last.op != _COMPLEMENT[heads[-1].op]:
            raise UnsupportedConstructError("last piecewise condition must be the complement of the one before")

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(c.bound for c in self.conditions[:-1])

    def branch_index(self, u: float) -> int:
        for i, condition in enumerate(self.conditions[:-1]):
            if condition.holds(u):
                return i
        return len(self.branches) - 1

    def evaluate(self, x):
        return self.branches[self.branch_index(float(x[0]))].evaluate(x)

    def directional(self, x, v):
        u, dv = float(x[0]), float(v[0])
        for i, bound in enumerate(self.breakpoints):
            if u == bound:
                if dv > 0:
                    return self.branches[i + 1].directional(x, v)
                if dv < 0:
                    return self.branches[i].directional(x, v)
                return 0.0
        return self.branches[self.branch_index(u)].directional(x, v)

    def derivative(self):
        return Piecewise(self.conditions, tuple(b.derivative() for b in self.branches))

    def children(self):
        return self.branches


# Nodes below only appear in derivative trees.

@dataclass(frozen=True)
class Mul(Node):
    left: Node
    right: Node

    def evaluate(self, x):
        return self.left.evaluate(x) * self.right.evaluate(x)

    def directional(self, x, v):
        return (self.left.directional(x, v) * self.right.evaluate(x)
                + self.left.evaluate(x) * self.right.directional(x, v))

    def derivative(self):
        return _add([_mul(self.left.derivative(), self.right), _mul(self.left, self.right.derivative())])

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Sign(Node):
    arg: Node

    def evaluate(self, x):
        value = self.arg.evaluate(x)
        return 1.0 if value > 0 else (-1.0 if value < 0 else 0.0)

    def directional(self, x, v):
        return 0.0

    def derivative(self):
        return Const(0.0)

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Active(Node):
    """Value of the entry of `values` paired with the first maximal entry of `args`."""
    args: Tuple[Node, ...]
    values: Tuple[Node, ...]

    def evaluate(self, x):
        scores = [a.evaluate(x) for a in self.args]
        return self.values[scores.index(max(scores))].evaluate(x)

    def directional(self, x, v):
        scores = [a.evaluate(x) for a in self.args]
        return self.values[scores.index(max(scores))].directional(x, v)

    def derivative(self):
        return Active(self.args, tuple(v.derivative() for v in self.values))

    def children(self):
        return self.args + self.values


# ---------------------------------------------------------------------------
# Smart constructors
# ---------------------------------------------------------------------------

def _scale(factor: float, node: Node) -> Node:
    if isinstance(node, Const):
        return Const(factor * node.value)
    if isinstance(node, Scale):
        return Scale(factor * node.factor, node.arg)
    return Scale(factor, node)


def _negate(node: Node) -> Node:
    return _scale(-1.0, node)


def _power(base: Node, exponent: int) -> Node:
    if exponent == 0:
        return Const(1.0)
    if exponent == 1:
        return base
    if isinstance(base, Const):
        return Const(_safe_pow(base.value, exponent))
    return Power(base, exponent)


def _mul(left: Node, right: Node) -> Node:
    if isinstance(left, Const):
        if left.value == 0.0:
            return Const(0.0)
        return right if left.value == 1.0 else _scale(left.value, right)
    if isinstance(right, Const):
        if right.value == 0.0:
            return Const(0.0)
        return left if right.value == 1.0 else _scale(right.value, left)
    return Mul(left, right)


def _add(terms: List[Node]) -> Node:
    constant = sum(t.value for t in terms if isinstance(t, Const))
    rest = [t for t in terms if not isinstance(t, Const)]
    if constant != 0.0 or not rest:
        rest.append(Const(constant))
    return rest[0] if len(rest) == 1 else Sum(tuple(rest))


# ---------------------------------------------------------------------------
# Trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExprTree:
    root: Node
    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ExpressionDimensionError(f"dimension must be positive, got {self.dimension}")
        for node in self.root.walk():
            if isinstance(node, Var) and not 0 <= node.index < self.dimension:
                raise ExpressionDimensionError(
                    f"variable x{node.index + 1} outside dimension {self.dimension}", dimension=self.dimension)
            if isinstance(node, Piecewise) and self.dimension != 1:
                raise ExpressionDimensionError("piecewise definitions are one-dimensional", dimension=self.dimension)

    def evaluate(self, x: Sequence[float]) -> float:
        return self.root.evaluate(x)

    def __str__(self):
        return print_tree(self)


@dataclass(frozen=True)
class KinkPoint:
    location: float
    left_slope: float
    right_slope: float


@dataclass(frozen=True)
class Derivative1D:
    derivative: ExprTree
    kinks: Tuple[KinkPoint, ...]

    @property
    def kink_locations(self) -> Tuple[float, ...]:
        return tuple(k.location for k in self.kinks)


# ---------------------------------------------------------------------------
# Lexer / parser
# ---------------------------------------------------------------------------

class _Token(NamedTuple):
    kind: str
    text: str
    offset: int


_TOKEN_RE = re.compile(
    r'(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)'
    r'|(?P<name>[A-Za-z_][A-Za-z_0-9]*)'
    r'|(?P<op><=|>=|[-+*^(),:<>])'
)
_VAR_RE = re.compile(r'x(\d*)$')
_FUNCTIONS = ('exp', 'abs', 'max', 'piecewise')


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode('utf-8'))


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    position = 0
    while position < len(text):
        if text[position].isspace():
            position += 1
            continue
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise ExpressionSyntaxError(f"unexpected character {text[position]!r}",
                                        _byte_offset(text, position), text)
        tokens.append(_Token(match.lastgroup, match.group(), position))
        position = match.end()
    tokens.append(_Token('end', '', len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, dimension: int):
        self.text = text
        self.dimension = dimension
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.current
        if token.kind != 'end':
            self.index += 1
        return token

    def at(self, text: str) -> bool:
        return self.current.kind == 'op' and self.current.text == text

    def offset(self, token: Optional[_Token] = None) -> int:
        return _byte_offset(self.text, (token or self.current).offset)

    def fail(self, message: Optional[str] = None):
        token = self.current
        if message is None:
            message = "unexpected end of input" if token.kind == 'end' else f"unexpected token {token.text!r}"
        raise ExpressionSyntaxError(message, self.offset(token), self.text)

    def expect(self, text: str) -> _Token:
        if not self.at(text):
            self.fail(f"expected {text!r}" if self.current.kind != 'end' else "unexpected end of input")
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.current.kind != 'end':
            self.fail()
        return node

    def expr(self) -> Node:
        terms = [self.term()]
        while self.at('+') or self.at('-'):
            negative = self.advance().text == '-'
            term = self.term()
            terms.append(_negate(term) if negative else term)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> Node:
        left = self.unary()
        while self.at('*'):
            star = self.advance()
            right = self.unary()
            if isinstance(left, Const):
                left = _scale(left.value, right)
            elif isinstance(right, Const):
                left = _scale(right.value, left)
            else:
                raise UnsupportedConstructError(
                    f"product of two non-constant expressions at offset {self.offset(star)}", self.offset(star))
        return left

    def unary(self) -> Node:
        if self.at('-'):
            self.advance()
            return _negate(self.unary())
        if self.at('+'):
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if not self.at('^'):
            return base
        self.advance()
        token = self.current
        if token.kind != 'num':
            if self.at('-') or token.kind == 'name':
                raise UnsupportedConstructError(
                    f"only integer powers k >= 1 are supported (offset {self.offset(token)})", self.offset(token))
            self.fail()
        self.advance()
        if not token.text.isdigit() or int(token.text) < 1:
            raise UnsupportedConstructError(
                f"only integer powers k >= 1 are supported, got {token.text} (offset {self.offset(token)})",
                self.offset(token))
        return _power(base, int(token.text))

    def number(self, token: _Token) -> float:
        value = float(token.text)
        if not math.isfinite(value):
            raise UnsupportedConstructError(f"constant {token.text} is not finite", self.offset(token))
        return value

    def variable(self, token: _Token) -> Optional[Var]:
        match = _VAR_RE.match(token.text)
        if match is None:
            return None
        digits = match.group(1)
        if not digits:
            if self.dimension != 1:
                raise ExpressionDimensionError(
                    f"use x1..x{self.dimension} in dimension {self.dimension} (offset {self.offset(token)})",
                    self.offset(token), self.dimension)
            return Var(0)
        index = int(digits)
        if not 1 <= index <= self.dimension:
            raise ExpressionDimensionError(
                f"variable {token.text} outside dimension {self.dimension} (offset {self.offset(token)})",
                self.offset(token), self.dimension)
        return Var(index - 1)

    def atom(self) -> Node:
        token = self.current
        if token.kind == 'num':
            self.advance()
            return Const(self.number(token))
        if self.at('('):
            self.advance()
            node = self.expr()
            self.expect(')')
            return node
        if token.kind != 'name':
            self.fail()
        variable = self.variable(token)
        if variable is not None:
            self.advance()
            return variable
        if token.text not in _FUNCTIONS:
            raise UnsupportedConstructError(
                f"unknown function {token.text!r} at offset {self.offset(token)}", self.offset(token))
        self.advance()
        if token.text == 'piecewise':
            return self.piecewise(token)
        self.expect('(')
        args = [self.expr()]
        while token.text == 'max' and self.at(','):
            self.advance()
            args.append(self.expr())
        self.expect(')')
        if token.text == 'exp':
            return Exp(args[0])
        if token.text == 'abs':
            return Abs(args[0])
        return Max(tuple(args))

    def piecewise(self, head: _Token) -> Node:
        if self.dimension != 1:
            raise ExpressionDimensionError("piecewise definitions are one-dimensional",
                                           self.offset(head), self.dimension)
        self.expect('(')
        conditions, branches = [], []
        while True:
            conditions.append(self.condition())
            self.expect(':')
            branches.append(self.expr())
            if not self.at(','):
                break
            self.advance()
        self.expect(')')
        try:
            return Piecewise(tuple(conditions), tuple(branches))
        except UnsupportedConstructError as e:
            raise UnsupportedConstructError(f"{e.message} (offset {self.offset(head)})", self.offset(head)) from e

    def condition(self) -> Condition:
        token = self.current
        if token.kind != 'name' or self.variable(token) is None:
            self.fail("expected a condition on x")
        self.advance()
        op = self.current
        if op.kind != 'op' or op.text not in ('<', '<=', '>', '>='):
            self.fail("expected a comparison")
        self.advance()
        sign = 1.0
        if self.at('-'):
            self.advance()
            sign = -1.0
        if self.current.kind != 'num':
            self.fail("expected a number")
        return Condition(op.text, sign * self.number(self.advance()))


def parse(text: str, dimension: int) -> ExprTree:
    """
    Parse an expression in dimension n.

    Raises:
        ExpressionSyntaxError: malformed text (byte offset of the offending token)
        ExpressionDimensionError: variable outside x1..xn, or piecewise with n > 1
        UnsupportedConstructError: non-integer power, product of non-constants, unknown function
    """
    if dimension < 1:
        raise ExpressionDimensionError(f"dimension must be positive, got {dimension}", dimension=dimension)
    tree = ExprTree(_Parser(text, dimension).parse(), dimension)
    logger.debug(f"Parsed expression {text!r} as {print_tree(tree)!r}")
    return tree


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

def _number(value: float) -> str:
    return repr(float(value))


def _is_atomic(node: Node) -> bool:
    if isinstance(node, Const):
        return node.value >= 0
    return isinstance(node, (Var, Exp, Abs, Max, Piecewise, Mul, Sign, Active))


def _print(node: Node, dimension: int) -> str:
    def wrap(child: Node) -> str:
        text = _print(child, dimension)
        return text if _is_atomic(child) else f"({text})"

    if isinstance(node, Const):
        return _number(node.value)
    if isinstance(node, Var):
        return 'x' if dimension == 1 else f"x{node.index + 1}"
    if isinstance(node, Sum):
        return " + ".join(f"({_print(t, dimension)})" if isinstance(t, Sum) else _print(t, dimension)
                          for t in node.terms)
    if isinstance(node, Scale):
        return f"{_number(node.factor)}*{wrap(node.arg)}"
    if isinstance(node, Power):
        return f"{wrap(node.base)}^{node.exponent}"
    if isinstance(node, Exp):
        return f"exp({_print(node.arg, dimension)})"
    if isinstance(node, Abs):
        return f"abs({_print(node.arg, dimension)})"
    if isinstance(node, Max):
        return "max(" + ", ".join(_print(a, dimension) for a in node.args) + ")"
    if isinstance(node, Piecewise):
        parts = [f"x{c.op}{_number(c.bound)}: {_print(b, dimension)}"
                 for c, b in zip(node.conditions, node.branches)]
        return "piecewise(" + ", ".join(parts) + ")"
    if isinstance(node, Mul):
        return f"mul({_print(node.left, dimension)}, {_print(node.right, dimension)})"
    if isinstance(node, Sign):
        return f"sign({_print(node.arg, dimension)})"
    if isinstance(node, Active):
        args = ", ".join(_print(a, dimension) for a in node.args)
        values = ", ".join(_print(v, dimension) for v in node.values)
        return f"active([{args}], [{values}])"
    raise UnsupportedConstructError(f"cannot print node {type(node).__name__}")


def print_tree(tree: ExprTree) -> str:
    """Canonical text; parse(print_tree(t)) == t for every parsed tree."""
    return _print(tree.root, tree.dimension)


# ---------------------------------------------------------------------------
# Evaluation and derivatives
# ---------------------------------------------------------------------------

def evaluate_tree(tree: ExprTree, x: Sequence[float]) -> float:
    return tree.root.evaluate(x)


def directional_derivative(tree: ExprTree, x: Sequence[float], v: Sequence[float]) -> float:
    """Exact one-sided directional derivative φ'(x; v)."""
    return tree.root.directional(x, v)


def _affine_coefficients(node: Node) -> Optional[Tuple[float, float]]:
    """(slope, intercept) when a 1D node is affine by construction."""
    if isinstance(node, Const):
        return 0.0, node.value
    if isinstance(node, Var):
        return 1.0, 0.0
    if isinstance(node, Scale):
        inner = _affine_coefficients(node.arg)
        return None if inner is None else (node.factor * inner[0], node.factor * inner[1])
    if isinstance(node, Sum):
        parts = [_affine_coefficients(t) for t in node.terms]
        if any(p is None for p in parts):
            return None
        return math.fsum(p[0] for p in parts), math.fsum(p[1] for p in parts)
    return None


def _scan_roots(node: Node, scan_box: float, points: int = 4001) -> List[float]:
    grid = np.linspace(-scan_box, scan_box, points)
    values = np.array([node.evaluate((u,)) for u in grid])
    roots = [float(u) for u, value in zip(grid, values) if value == 0.0]
    for i in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
        lo, hi = float(grid[i]), float(grid[i + 1])
        lo_sign = math.copysign(1.0, values[i])
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            value = node.evaluate((mid,))
            if value == 0.0:
                lo = hi = mid
                break
            if math.copysign(1.0, value) == lo_sign:
                lo = mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return roots


def _roots(node: Node, scan_box: float) -> List[float]:
    """Zeros of a 1D node: closed form for affine nodes, scanned otherwise."""
    coefficients = _affine_coefficients(node)
    if coefficients is not None:
        slope, intercept = coefficients
        return [] if slope == 0.0 else [-intercept / slope]
    return _scan_roots(node, scan_box)


def _kink_candidates(root: Node, scan_box: float) -> List[Tuple[float, bool]]:
    candidates = []
    for node in root.walk():
        if isinstance(node, Piecewise):
            candidates.extend((b, True) for b in node.breakpoints)
        elif isinstance(node, Abs):
            candidates.extend((r, False) for r in _roots(node.arg, scan_box))
        elif isinstance(node, Max):
            for i in range(len(node.args)):
                for j in range(i + 1, len(node.args)):
                    difference = Sum((node.args[i], _negate(node.args[j])))
                    candidates.extend((r, False) for r in _roots(difference, scan_box))
    return candidates


def _slopes_differ(left: float, right: float) -> bool:
    return abs(right - left) > 1e-9 * (1.0 + abs(left) + abs(right))


def derivative_1d(tree: ExprTree, scan_box: float = 1e3) -> Derivative1D:
    """
    Exact derivative tree of a 1D expression and its kink set.

    Kink candidates are piecewise breakpoints and zeros of abs arguments and
    of pairwise max differences (exact for affine arguments, scanned on
    [-scan_box, scan_box] otherwise); a candidate is kept when the one-sided
    slopes differ.
    """
    if tree.dimension != 1:
        raise ExpressionDimensionError("derivative_1d needs a one-dimensional expression", dimension=tree.dimension)
    derivative = ExprTree(tree.root.derivative(), 1)
    kinks = {}
    for location, exact in _kink_candidates(tree.root, scan_box):
        if location in kinks:
            continue
        left = -tree.root.directional((location,), (-1.0,))
        right = tree.root.directional((location,), (1.0,))
        if not _slopes_differ(left, right):
            if exact:
                continue
            # a rounded root may miss the kink; compare limits of the derivative instead
            step = 1e-7 * (1.0 + abs(location))
            left = derivative.evaluate((location - step,))
            right = derivative.evaluate((location + step,))
            if abs(right - left) <= 1e-6 * (1.0 + abs(left) + abs(right)):
                continue
        kinks[location] = KinkPoint(location, left, right)
    return Derivative1D(derivative, tuple(kinks[k] for k in sorted(kinks)))


def has_nonsmooth_nodes(tree: ExprTree) -> bool:
    return any(isinstance(n, (Abs, Max, Piecewise)) for n in tree.root.walk())


class ExpressionBody(ConvexBody):
    """Convex body backed by an expression tree."""

    analytic = True

    def __init__(self, tree: ExprTree, text: Optional[str] = None):
        self.tree = tree
        self.text = text if text is not None else print_tree(tree)
        self._kinks: Optional[Tuple[float, ...]] = None

    def value(self, x):
        return self.tree.root.evaluate(x)

    def directional(self, x, v):
        return self.tree.root.directional(x, v)

    def kinks_1d(self):
        if self.tree.dimension != 1 or not has_nonsmooth_nodes(self.tree):
            return ()
        if self._kinks is None:
            self._kinks = derivative_1d(self.tree).kink_locations
        return self._kinks

    def describe(self):
        return self.text
