"""Complex expression trees: parsing, printing, evaluation and differentiation.

Expressions are immutable trees of :class:`Expr` nodes. They are built either
by :func:`parse_expression` or with the ordinary Python operators::

    >>> w = var("w")
    >>> R = parse_expression("-i/(2*w^2)", "w")
    >>> evaluate(R, 1.0)
    -0.5j

Evaluation is done with numpy complex arithmetic, so ``at`` may be a scalar or
an array of points. ``log``, ``sqrt`` and ``atan`` use principal branches
(the cut of ``log`` and ``sqrt`` lies along the negative real axis).

Grammar accepted by the parser::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' integer)?
    unary  := '-'? atom
    atom   := number | 'i' | identifier | func '(' expr ')' | '(' expr ')'

Note that unary minus binds tighter than ``^``: ``-w^2`` reads as ``(-w)^2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sqrt", "atan")
_BINARY = {"add": "+", "sub": "-", "mul": "*", "div": "/"}
_NUMPY_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sqrt": np.sqrt,
    "atan": np.arctan,
}
_RESERVED = set(FUNCTIONS) | {"i", "pi"}


class ExprError(Exception):
    """Base class for expression errors."""


class ParseError(ExprError):
    """Malformed expression text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class EvaluationError(ExprError, ArithmeticError):
    """Division by zero or a non-finite value inside an expression."""

    def __init__(self, message: str, node: "Expr"):
        super().__init__(f"{message} in '{to_string(node)}'")
        self.node = node


@dataclass(frozen=True, eq=True)
class Expr:
    kind: str
    args: tuple = ()
    value: complex = 0j
    name: str = ""
    exponent: int = 0

    def __post_init__(self):
        arity = {"const": 0, "var": 0, "powi": 1}
        arity.update({k: 2 for k in _BINARY})
        arity.update({k: 1 for k in FUNCTIONS})
        if self.kind not in arity:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if len(self.args) != arity[self.kind]:
            raise ValueError(f"{self.kind} takes {arity[self.kind]} arguments")

    def __str__(self):
        return to_string(self)

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return sub(const(0.0), self)

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("only integer powers are supported; use exp(a*log(b))")
        return powi(self, int(n))

    def variables(self) -> frozenset:
        if self.kind == "var":
            return frozenset([self.name])
        out = frozenset()
        for a in self.args:
            out |= a.variables()
        return out


ExprLike = Union[Expr, complex, float, int]


def _coerce(x: ExprLike) -> Expr:
    if isinstance(x, Expr):
        return x
    return const(x)


def const(c) -> Expr:
    return Expr("const", value=complex(c))


def var(name: str) -> Expr:
    return Expr("var", name=name)


def _is_const(e: Expr, c=None) -> bool:
    if e.kind != "const":
        return False
    if c is None:
        return True
    return e.value == c


def _ipow(base, n: int):
    # unrolled multiplication keeps integer powers branch-free
    if n == 0:
        return base * 0 + 1
    m = abs(n)
    out = base
    for _ in range(m - 1):
        out = out * base
    return 1 / out if n < 0 else out


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return const(a.value + b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return b
    return Expr("add", (a, b))


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return const(a.value - b.value)
    if _is_const(b, 0):
        return a
    return Expr("sub", (a, b))


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return const(0.0)
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return Expr("mul", (a, b))


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b) and b.value != 0:
        return const(a.value / b.value)
    if _is_const(b, 1):
        return a
    if _is_const(a, 0) and not _is_const(b, 0):
        return const(0.0)
    return Expr("div", (a, b))


def powi(a: Expr, n: int) -> Expr:
    if n == 1:
        return a
    if n == 0:
        return const(1.0)
    if _is_const(a) and not (n < 0 and a.value == 0):
        return const(_ipow(a.value, n))
    return Expr("powi", (a,), exponent=n)


def func(name: str, a: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    return Expr(name, (a,))


def exp(a: ExprLike) -> Expr:
    return func("exp", _coerce(a))


def log(a: ExprLike) -> Expr:
    return func("log", _coerce(a))


def sin(a: ExprLike) -> Expr:
    return func("sin", _coerce(a))


def cos(a: ExprLike) -> Expr:
    return func("cos", _coerce(a))


def tan(a: ExprLike) -> Expr:
    return func("tan", _coerce(a))


def sqrt(a: ExprLike) -> Expr:
    return func("sqrt", _coerce(a))


def atan(a: ExprLike) -> Expr:
    return func("atan", _coerce(a))


# ---------------------------------------------------------------------------
# printing


def _fmt_real(x: float) -> str:
    if not np.isfinite(x):
        raise ExprError(f"cannot print non-finite constant {x!r}")
    return format(x, ".17g")


def _fmt_const(c: complex) -> str:
    re_, im = c.real, c.imag
    if im == 0 and not np.signbit(im):
        s = _fmt_real(re_)
        return f"({s})" if s.startswith("-") else s
    # a constant with an imaginary part prints as (a+b*i) or (a-b*i)
    sign = "-" if np.signbit(im) else "+"
    return f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im))}*i)"


def to_string(e: Expr) -> str:
    """Canonical fully parenthesized infix form; constants carry 17 digits."""
    k = e.kind
    if k == "const":
        return _fmt_const(e.value)
    if k == "var":
        return e.name
    if k in _BINARY:
        a, b = e.args
        if k == "sub" and _is_const(a) and a.value == 0 and not np.signbit(a.value.real):
            return f"(-{to_string(b)})"
        return f"({to_string(a)}{_BINARY[k]}{to_string(b)})"
    if k == "powi":
        return f"({to_string(e.args[0])}^{e.exponent})"
    return f"{k}({to_string(e.args[0])})"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", len(text[:pos].encode()))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(text[:start].encode())))
        pos = m.end()
    tokens.append(("end", "", len(text.encode())))
    return tokens


class _Parser:
    def __init__(self, text: str, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] == "end":
            found = tok[1] or "end of input"
            raise ParseError(f"expected {value!r}, found {found!r}", tok[2])
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def term(self):
        e = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.factor()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def factor(self):
        e = self.unary()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "num" or not tok[1].isdigit():
                raise ParseError("exponent must be an integer", tok[2])
            e = powi(e, sign * int(tok[1]))
        return e

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            if self.peek()[0] == "num":
                return const(-float(self.take()[1]))
            return sub(const(0.0), self.atom())
        return self.atom()

    def atom(self):
        kind, text, offset = self.take()
        if kind == "num":
            return const(float(text))
        if kind == "id":
            if text in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ParseError(f"function {text!r} needs one argument in parentheses", offset)
                self.take()
                arg = self.expr()
                if self.peek()[1] == ",":
                    raise ParseError(f"arity mismatch: {text} takes exactly one argument", self.peek()[2])
                self.expect(")")
                return func(text, arg)
            if text == "i":
                return const(1j)
            if text == "pi":
                return const(np.pi)
            if text in self.variables:
                return var(text)
            raise ParseError(f"unknown identifier {text!r}", offset)
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {text or 'end of input'!r}", offset)


def parse_expression(text: str, variable_name="w") -> Expr:
    """Parse ``text`` into an :class:`Expr`.

    ``variable_name`` is a single name or a sequence of names (graph mode uses
    ``("x", "y")``). The identifiers ``i`` and ``pi`` are constants.
    """
    names = (variable_name,) if isinstance(variable_name, str) else tuple(variable_name)
    for n in names:
        if n in _RESERVED:
            raise ValueError(f"{n!r} is reserved and cannot be a variable name")
    return _Parser(text, set(names)).parse()


# ---------------------------------------------------------------------------
# evaluation


def _bind(e: Expr, at) -> Mapping:
    if isinstance(at, Mapping):
        return {k: np.asarray(v, dtype=complex) for k, v in at.items()}
    names = e.variables()
    if len(names) > 1:
        raise ValueError(f"expression has variables {sorted(names)}; pass a mapping")
    value = np.asarray(at, dtype=complex)
    return {n: value for n in names}


def _eval(e: Expr, env):
    k = e.kind
    if k == "const":
        return np.complex128(e.value)
    if k == "var":
        try:
            return env[e.name]
        except KeyError:
            raise ValueError(f"no value bound for variable {e.name!r}") from None
    if k == "powi":
        base = _eval(e.args[0], env)
        if e.exponent < 0 and np.any(base == 0):
            raise EvaluationError("division by zero", e)
        out = _ipow(base, e.exponent)
    elif k in _BINARY:
        a = _eval(e.args[0], env)
        b = _eval(e.args[1], env)
        if k == "add":
            out = a + b
        elif k == "sub":
            out = a - b
        elif k == "mul":
            out = a * b
        else:
            if np.any(b == 0):
                raise EvaluationError("division by zero", e)
            out = a / b
    else:
        a = _eval(e.args[0], env)
        if k == "log" and np.any(a == 0):
            raise EvaluationError("logarithm of zero", e)
        out = _NUMPY_FUNCS[k](a)
    if not np.all(np.isfinite(out)):
        raise EvaluationError("non-finite value", e)
    return out


def evaluate(e: Expr, at):
    """Evaluate ``e`` at a point (or array of points, or a name->value mapping).

    Returns a Python ``complex`` for scalar input and a complex ndarray otherwise.
    Raises :class:`EvaluationError` on division by zero or non-finite values.
    """
    env = _bind(e, at)
    with np.errstate(all="ignore"):
        out = _eval(e, env)
    if isinstance(at, Mapping):
        shape = np.broadcast_shapes(*(np.shape(v) for v in env.values())) if env else ()
    else:
        shape = np.shape(at)
    out = np.broadcast_to(out, shape)
    if out.ndim == 0:
        return complex(out)
    return np.array(out)


# ---------------------------------------------------------------------------
# differentiation


def differentiate(e: Expr, name: str = None) -> Expr:
    """Symbolic derivative of ``e`` with respect to the variable ``name``.

    When ``name`` is omitted the expression must have at most one variable.
    """
    if name is None:
        names = e.variables()
        if len(names) > 1:
            raise ValueError(f"expression has variables {sorted(names)}; name one")
        name = next(iter(names)) if names else "_"
    return _d(e, name)


def _d(e: Expr, x: str) -> Expr:
    k = e.kind
    if k == "const":
        return const(0.0)
    if k == "var":
        return const(1.0 if e.name == x else 0.0)
    if k == "add":
        return add(_d(e.args[0], x), _d(e.args[1], x))
    if k == "sub":
        return sub(_d(e.args[0], x), _d(e.args[1], x))
    if k == "mul":
        a, b = e.args
        return add(mul(_d(a, x), b), mul(a, _d(b, x)))
    if k == "div":
        a, b = e.args
        return div(sub(mul(_d(a, x), b), mul(a, _d(b, x))), powi(b, 2))
    a = e.args[0]
    da = _d(a, x)
    if _is_const(da, 0):
        return const(0.0)
    if k == "powi":
        n = e.exponent
        return mul(mul(const(float(n)), powi(a, n - 1)), da)
    if k == "exp":
        return mul(e, da)
    if k == "log":
        return div(da, a)
    if k == "sin":
        return mul(cos(a), da)
    if k == "cos":
        return mul(sub(const(0.0), sin(a)), da)
    if k == "tan":
        return div(da, powi(cos(a), 2))
    if k == "sqrt":
        return div(da, mul(const(2.0), e))
    if k == "atan":
        return div(da, add(const(1.0), powi(a, 2)))
    raise AssertionError(k)
