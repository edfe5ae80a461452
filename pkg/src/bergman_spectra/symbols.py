"""Invariant symbols as functions of the radial triple ``(r1, r2, r3)``.

Symbols are vectorized callables ``phi(r1, r2, r3)`` wrapped in
:class:`SymbolSpec`.  Besides the built-in families, symbols can be written in
a small expression language:

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("+" | "-") unary | power ;
    power   = atom [ "^" [ "-" ] integer ] ;
    atom    = number | "r1" | "r2" | "r3" | "b" | "i" | "(" expr ")" ;

``b`` is ``1 - r1^2 - r2^2 - r3^2 + r1^2 r3^2`` and ``i`` the imaginary unit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .measure import b_poly

__all__ = [
    "SymbolSpec",
    "SymbolSyntaxError",
    "parse_symbol",
    "symbol_from_string",
    "constant",
    "monomial",
    "polynomial",
    "shell",
    "rational",
]


@dataclass(frozen=True)
class SymbolSpec:
    evaluator: Callable = field(compare=False)
    name: str
    bound: float = math.inf

    def __call__(self, r1, r2, r3):
        return self.evaluator(r1, r2, r3)

    def check_bound(self, r1, r2, r3, max_points: int = 10_000) -> None:
        """Spot-check ``|phi| <= bound`` on at most ``max_points`` of the given nodes."""
        if not math.isfinite(self.bound):
            return
        r1, r2, r3 = (np.ravel(x) for x in np.broadcast_arrays(r1, r2, r3))
        step = max(1, len(r1) // max_points)
        vals = np.abs(np.asarray(self(r1[::step], r2[::step], r3[::step])))
        worst = float(np.max(vals)) if vals.size else 0.0
        if worst > self.bound * (1 + 1e-12):
            raise ValueError(f"symbol {self.name!r} exceeds its bound {self.bound}: |phi| = {worst}")

    def conj(self) -> "SymbolSpec":
        f = self.evaluator
        return SymbolSpec(lambda r1, r2, r3: np.conj(f(r1, r2, r3)), f"conj({self.name})", self.bound)

    def scale(self, a: complex) -> "SymbolSpec":
        f = self.evaluator
        return SymbolSpec(lambda r1, r2, r3: a * f(r1, r2, r3), f"{a}*({self.name})", abs(a) * self.bound)

    def __add__(self, other: "SymbolSpec") -> "SymbolSpec":
        f, g = self.evaluator, other.evaluator
        return SymbolSpec(
            lambda r1, r2, r3: f(r1, r2, r3) + g(r1, r2, r3),
            f"({self.name})+({other.name})",
            self.bound + other.bound,
        )


def constant(c: complex = 1.0) -> SymbolSpec:
    return SymbolSpec(lambda r1, r2, r3: c + 0 * r1 * r2 * r3, f"{c}", abs(c))


def monomial(a: int, b: int, c: int) -> SymbolSpec:
    """``r1^a r2^b r3^c``; bounded by one on Omega."""
    return SymbolSpec(lambda r1, r2, r3: r1**a * r2**b * r3**c, f"r1^{a}*r2^{b}*r3^{c}", 1.0)


def polynomial(coeffs: Mapping[tuple[int, int, int], Fraction | int | float]) -> SymbolSpec:
    """Sum of ``coef * r1^a r2^b r3^c`` over ``{(a, b, c): coef}``."""
    items = [(tuple(k), float(Fraction(v))) for k, v in sorted(coeffs.items())]

    def ev(r1, r2, r3):
        out = 0.0 * r1 * r2 * r3
        for (a, b, c), coef in items:
            out = out + coef * r1**a * r2**b * r3**c
        return out

    name = " + ".join(f"{Fraction(v)}*r1^{k[0]}*r2^{k[1]}*r3^{k[2]}" for k, v in sorted(coeffs.items()))
    return SymbolSpec(ev, name or "0", sum(abs(c) for _, c in items))


def shell(lo: float, hi: float) -> SymbolSpec:
    """Indicator of ``lo <= b(r) < hi``."""
    if not lo < hi:
        raise ValueError("shell needs lo < hi")
    return SymbolSpec(
        lambda r1, r2, r3: ((b_poly(r1, r2, r3) >= lo) & (b_poly(r1, r2, r3) < hi)).astype(float),
        f"shell({lo},{hi})",
        1.0,
    )


def rational() -> SymbolSpec:
    return SymbolSpec(lambda r1, r2, r3: 1.0 / (1.0 + r1 * r1 + r2 * r2 + r3 * r3), "1/(1+r1^2+r2^2+r3^2)", 1.0)


class SymbolSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)|(r1|r2|r3|b|i)\b|([-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.replace("·", "*").replace("−", "-")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise SymbolSyntaxError("unexpected character", text, pos + len(text[pos:]) - len(text[pos:].lstrip()))
        num, name, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            toks.append(("num", num, start))
        elif name is not None:
            toks.append(("name", name, start))
        else:
            toks.append(("op", op, start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value: str | None = None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise SymbolSyntaxError(f"expected {value!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise SymbolSyntaxError(f"unexpected {val!r}", self.text, pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("+", "-"):
            self.take()
            inner = self.unary()
            return inner if val == "+" else ("neg", inner)
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, val, pos = self.take()
            if kind != "num" or not val.isdigit():
                raise SymbolSyntaxError("exponent must be an integer", self.text, pos)
            node = ("pow", node, sign * int(val))
        return node

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return ("const", float(val))
        if kind == "name":
            return ("var", val)
        if val == "(":
            node = self.expr()
            self.take(")")
            return node
        raise SymbolSyntaxError("expected a number, variable or '('" if kind != "end" else "unexpected end of input", self.text, pos)


def _compile(node) -> Callable:
    tag = node[0]
    if tag == "const":
        c = node[1]
        return lambda r: c
    if tag == "var":
        name = node[1]
        if name == "i":
            return lambda r: 1j
        if name == "b":
            return lambda r: b_poly(*r)
        k = int(name[1]) - 1
        return lambda r: r[k]
    if tag == "neg":
        f = _compile(node[1])
        return lambda r: -f(r)
    if tag == "pow":
        f, e = _compile(node[1]), node[2]
        return lambda r: f(r) ** e if e >= 0 else 1.0 / f(r) ** (-e)
    f, g = _compile(node[1]), _compile(node[2])
    return {
        "add": lambda r: f(r) + g(r),
        "sub": lambda r: f(r) - g(r),
        "mul": lambda r: f(r) * g(r),
        "div": lambda r: f(r) / g(r),
    }[tag]


def parse_symbol(text: str, bound: float = math.inf) -> SymbolSpec:
    """Compile an expression over ``r1, r2, r3`` into a vectorized symbol."""
    fn = _compile(_Parser(text).parse())

    def ev(r1, r2, r3):
        out = fn((r1, r2, r3))
        return out + 0 * r1 * r2 * r3

    return SymbolSpec(ev, text.strip(), bound)


def symbol_from_string(text: str) -> SymbolSpec:
    """Built-in family (``const:c``, ``monomial:a:b:c``, ``shell:lo:hi``, ``rational``) or expression."""
    head, _, rest = text.strip().partition(":")
    args = rest.split(":") if rest else []
    try:
        if head == "monomial":
            return monomial(*(int(a) for a in args))
        if head == "shell":
            return shell(*(float(a) for a in args))
        if head == "rational" and not args:
            return rational()
        if head == "const":
            return constant(complex(args[0]) if "j" in args[0] else float(args[0]))
    except (TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"bad arguments for built-in symbol {text!r}: {exc}") from None
    return parse_symbol(text)
