"""Arithmetic expressions over leader variables x1..xd and follower
variables y1..yp.

Grammar (recursive descent):

    expr   := term (('+' | '-') term)*
    term   := power (('*' | '/') power)*
    power  := unary ('^' power)?          -- '^' is right-associative
    unary  := '-' unary | atom
    atom   := NUMBER | VARIABLE | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

Precedence, tightest first: unary minus, '^', '*' '/', '+' '-'. Note that
unary minus binds tighter than '^', so "-x1^2" is "(-x1)^2". Functions are
abs, exp, log, sqrt (one argument) and min, max (two or more).

Evaluation is vectorized over a batch of follower points and raises
ExpressionEvalError whenever any intermediate value is non-finite (division
by zero, log of a non-positive number, overflow, ...). Printing produces a
fully parenthesized form; parsing that form reproduces the tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ExpressionEvalError, ProblemSyntaxError, UnknownVariable

_FUNCTIONS = {"abs": 1, "exp": 1, "log": 1, "sqrt": 1, "min": 2, "max": 2}


class Expression:
    """Base class of expression AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expression):
    value: float


@dataclass(frozen=True)
class Var(Expression):
    kind: str     # "x" or "y"
    index: int    # 1-based


@dataclass(frozen=True)
class Neg(Expression):
    operand: Expression


@dataclass(frozen=True)
class BinOp(Expression):
    op: str       # one of + - * / ^
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Call(Expression):
    func: str
    args: tuple[Expression, ...]


_TOKEN_RE = re.compile(r"""
    (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
  | (?P<ws>\s+)
""", re.VERBOSE)

_VAR_RE = re.compile(r"([xy])([1-9][0-9]*)$")


def _tokenize(text: str, line: int | None):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ProblemSyntaxError(f"unexpected character {text[pos]!r}",
                                     line=line, column=pos + 1)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, tokens, line):
        self.tokens = tokens
        self.line = line
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ProblemSyntaxError(message, line=self.line, column=tok[2])

    def expect_op(self, op):
        kind, text, _ = self.peek()
        if kind != "op" or text != op:
            self.fail(f"expected '{op}'")
        self.advance()

    def parse(self) -> Expression:
        node = self.expr()
        kind, text, _ = self.peek()
        if kind != "end":
            self.fail(f"unexpected trailing input {text!r}")
        return node

    def expr(self) -> Expression:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> Expression:
        node = self.power()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.power())
            else:
                return node

    def power(self) -> Expression:
        base = self.unary()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", base, self.power())
        return base

    def unary(self) -> Expression:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Expression:
        kind, text, start = self.advance()
        if kind == "num":
            value = float(text)
            if not np.isfinite(value):
                raise ProblemSyntaxError(f"numeric literal {text!r} overflows",
                                         line=self.line, column=start)
            return Num(value)
        if kind == "name":
            if text in _FUNCTIONS:
                self.expect_op("(")
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.advance()
                    args.append(self.expr())
                self.expect_op(")")
                minargs = _FUNCTIONS[text]
                if minargs == 1 and len(args) != 1:
                    raise ProblemSyntaxError(f"{text} takes exactly one argument",
                                             line=self.line, column=start)
                if minargs == 2 and len(args) < 2:
                    raise ProblemSyntaxError(f"{text} takes at least two arguments",
                                             line=self.line, column=start)
                return Call(text, tuple(args))
            m = _VAR_RE.match(text)
            if m is None:
                raise ProblemSyntaxError(
                    f"unknown identifier {text!r} (variables are x1.., y1..)",
                    line=self.line, column=start)
            return Var(m.group(1), int(m.group(2)))
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ProblemSyntaxError(f"unexpected token {text!r}" if text else "unexpected end of input",
                                 line=self.line, column=start)


def parse_expression(text: str, line: int | None = None) -> Expression:
    """Parse one expression; raises ProblemSyntaxError with line/column."""
    return _Parser(_tokenize(text, line), line).parse()


def print_expression(node: Expression) -> str:
    """Fully parenthesized canonical form; parse(print(t)) == t."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"{node.kind}{node.index}"
    if isinstance(node, Neg):
        return f"(-{print_expression(node.operand)})"
    if isinstance(node, BinOp):
        return f"({print_expression(node.left)}{node.op}{print_expression(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({','.join(print_expression(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def variable_ranges(node: Expression) -> tuple[int, int]:
    """Largest x-index and y-index referenced (0 when a kind is unused)."""
    if isinstance(node, Var):
        return (node.index, 0) if node.kind == "x" else (0, node.index)
    if isinstance(node, Neg):
        return variable_ranges(node.operand)
    if isinstance(node, BinOp):
        lx, ly = variable_ranges(node.left)
        rx, ry = variable_ranges(node.right)
        return max(lx, rx), max(ly, ry)
    if isinstance(node, Call):
        xs, ys = 0, 0
        for a in node.args:
            ax, ay = variable_ranges(a)
            xs, ys = max(xs, ax), max(ys, ay)
        return xs, ys
    return 0, 0


def _check_finite(value, node: Expression):
    if not np.all(np.isfinite(value)):
        raise ExpressionEvalError(
            f"non-finite value while evaluating {print_expression(node)}")
    return value


def evaluate_batch(node: Expression, x: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Evaluate over a batch: x is (d,), Y is (m, p); returns (m,).

    Every intermediate is checked for finiteness so division by zero, log
    of a non-positive number, etc. raise ExpressionEvalError rather than
    propagating inf/nan.
    """
    x = np.asarray(x, dtype=float)
    Y = np.asarray(Y, dtype=float)

    def ev(n):
        if isinstance(n, Num):
            return n.value
        if isinstance(n, Var):
            if n.kind == "x":
                if n.index > x.shape[0]:
                    raise UnknownVariable(f"x{n.index} out of range (d={x.shape[0]})")
                return x[n.index - 1]
            if n.index > Y.shape[1]:
                raise UnknownVariable(f"y{n.index} out of range (p={Y.shape[1]})")
            return Y[:, n.index - 1]
        if isinstance(n, Neg):
            return -ev(n.operand)
        if isinstance(n, BinOp):
            left = ev(n.left)
            right = ev(n.right)
            with np.errstate(all="ignore"):
                if n.op == "+":
                    out = left + right
                elif n.op == "-":
                    out = left - right
                elif n.op == "*":
                    out = left * right
                elif n.op == "/":
                    out = np.divide(left, right)
                else:
                    out = np.power(left, right)
            return _check_finite(out, n)
        if isinstance(n, Call):
            args = [ev(a) for a in n.args]
            with np.errstate(all="ignore"):
                if n.func == "abs":
                    out = np.abs(args[0])
                elif n.func == "exp":
                    out = np.exp(args[0])
                elif n.func == "log":
                    out = np.log(args[0])
                elif n.func == "sqrt":
                    out = np.sqrt(args[0])
                elif n.func == "min":
                    out = args[0]
                    for a in args[1:]:
                        out = np.minimum(out, a)
                else:
                    out = args[0]
                    for a in args[1:]:
                        out = np.maximum(out, a)
            return _check_finite(out, n)
        raise TypeError(f"not an expression node: {n!r}")

    result = ev(node)
    return np.broadcast_to(np.asarray(result, dtype=float), (Y.shape[0],)).copy()


def evaluate_expression(expr: Expression, x, y) -> float:
    """Scalar evaluation at one (x, y) point."""
    Y = np.asarray(y, dtype=float).reshape(1, -1)
    return float(evaluate_batch(expr, np.asarray(x, dtype=float).ravel(), Y)[0])
