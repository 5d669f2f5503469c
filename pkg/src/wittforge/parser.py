"""Form expressions: ``<1,-7>``, ``pfister(1,1)``, ``3 x E``, ``E (+) E``, ``E (*) E``, ``a * E``.

Binding, tightest first: scale, repetition, tensor, sum.  Sum and tensor
associate to the left, scale and repetition to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .fields import FieldError, Monomial
from .forms import Form, FormError, orthogonal_sum, repeat, scale, tensor


class ParseError(ValueError):
    def __init__(self, msg: str, src: str, pos: int):
        self.msg, self.src, self.pos = msg, src, pos
        super().__init__(f"{msg} at column {pos + 1}\n  {src}\n  {' ' * pos}^")


@dataclass(frozen=True)
class Literal:
    coeffs: tuple[Monomial, ...]


@dataclass(frozen=True)
class Pfister:
    slots: tuple[Monomial, ...]


@dataclass(frozen=True)
class Sum:
    left: "FormExpr"
    right: "FormExpr"


@dataclass(frozen=True)
class Tensor:
    left: "FormExpr"
    right: "FormExpr"


@dataclass(frozen=True)
class Scale:
    factor: Monomial
    body: "FormExpr"


@dataclass(frozen=True)
class Repeat:
    count: int
    body: "FormExpr"


FormExpr = Union[Literal, Pfister, Sum, Tensor, Scale, Repeat]

_PREC = {Sum: 1, Tensor: 2, Repeat: 3, Scale: 4, Literal: 5, Pfister: 5}

# sign, optional number, then uniformiser factors t, t2, t^3 joined by spaces or (inside lists) '*'
_NUM = re.compile(r"\d+(?:/\d+)?")
_TFACTOR = re.compile(r"t(\d*)(?:\^(\d+))?")


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def error(self, msg: str, pos=None):
        raise ParseError(msg, self.src, self.pos if pos is None else pos)

    def ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.ws()
        return self.src.startswith(s, self.pos)

    def eat(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.eat(s):
            self.error(f"expected {s!r}")

    def parse(self) -> FormExpr:
        e = self.sum()
        self.ws()
        if self.pos != len(self.src):
            self.error("unexpected input")
        return e

    def sum(self) -> FormExpr:
        e = self.tensor()
        while self.eat("(+)"):
            e = Sum(e, self.tensor())
        return e

    def tensor(self) -> FormExpr:
        e = self.repeat()
        while self.eat("(*)"):
            e = Tensor(e, self.repeat())
        return e

    def repeat(self) -> FormExpr:
        self.ws()
        m = re.compile(r"(\d+)\s*x(?![\w])").match(self.src, self.pos)
        if m:
            self.pos = m.end()
            return Repeat(int(m.group(1)), self.repeat())
        return self.scale()

    def scale(self) -> FormExpr:
        self.ws()
        start = self.pos
        if self.src.startswith(("<", "pfister", "("), self.pos) and not self.src.startswith(("(+)", "(*)"), self.pos):
            return self.atom()
        c = self.coefficient(allow_star=False)
        if not self.eat("*"):
            self.error("expected '*' after a scaling coefficient", start)
        return Scale(c, self.scale())

    def atom(self) -> FormExpr:
        if self.eat("<"):
            coeffs = self.coeff_list(">")
            return Literal(coeffs)
        if self.eat("pfister"):
            self.expect("(")
            return Pfister(self.coeff_list(")"))
        if self.eat("("):
            e = self.sum()
            self.expect(")")
            return e
        self.error("expected '<', 'pfister(' or '('")

    def coeff_list(self, close: str) -> tuple[Monomial, ...]:
        if self.eat(close):
            return ()
        out = [self.coefficient(allow_star=True)]
        while self.eat(","):
            out.append(self.coefficient(allow_star=True))
        self.expect(close)
        return tuple(out)

    def coefficient(self, allow_star: bool) -> Monomial:
        self.ws()
        start = self.pos
        sign = 1
        if self.src.startswith("-", self.pos):
            sign, self.pos = -1, self.pos + 1
        elif self.src.startswith("+", self.pos):
            self.pos += 1
        value = Fraction(sign)
        m = _NUM.match(self.src, self.pos)
        seen = False
        if m:
            value *= Fraction(m.group(0))
            self.pos = m.end()
            seen = True
        exps: dict[int, int] = {}
        while True:
            save = self.pos
            if seen:
                self.ws()
                if allow_star and self.src.startswith("*", self.pos):
                    self.pos += 1
                    self.ws()
            m = _TFACTOR.match(self.src, self.pos)
            if not m or (m.end() < len(self.src) and (self.src[m.end()].isalpha() or self.src[m.end()] == "_")):
                self.pos = save
                break
            idx = int(m.group(1)) if m.group(1) else 1
            if idx < 1:
                self.error("uniformiser index must be at least 1", self.pos)
            exps[idx] = exps.get(idx, 0) + (int(m.group(2)) if m.group(2) else 1)
            self.pos = m.end()
            seen = True
        if not seen:
            self.error("expected a coefficient", start)
        t = tuple(exps.get(i, 0) for i in range(1, max(exps, default=0) + 1))
        return Monomial(value, t)


def parse_form(src: str) -> FormExpr:
    return _Parser(src).parse()


def format_coeff(m: Monomial) -> str:
    return str(m)


def to_source(e: FormExpr) -> str:
    """Print ``e`` so that ``parse_form(to_source(e)) == e``."""
    def wrap(child, min_prec):
        s = to_source(child)
        return f"({s})" if _PREC[type(child)] < min_prec else s

    if isinstance(e, Literal):
        return "<" + ",".join(format_coeff(c) for c in e.coeffs) + ">"
    if isinstance(e, Pfister):
        return "pfister(" + ",".join(format_coeff(c) for c in e.slots) + ")"
    if isinstance(e, Sum):
        return f"{wrap(e.left, 1)} (+) {wrap(e.right, 2)}"
    if isinstance(e, Tensor):
        return f"{wrap(e.left, 2)} (*) {wrap(e.right, 3)}"
    if isinstance(e, Repeat):
        return f"{e.count} x {wrap(e.body, 3)}"
    if isinstance(e, Scale):
        return f"{format_coeff(e.factor)} * {wrap(e.body, 4)}"
    raise TypeError(e)


def _elem(field, m: Monomial):
    if m.value == 0:
        raise FormError("zero coefficient")
    try:
        return field.element(m)
    except FieldError as exc:
        raise FormError(str(exc)) from exc


def elaborate(e: FormExpr, field) -> Form:
    """Evaluate ``e`` to a diagonal form over ``field``."""
    if isinstance(e, Literal):
        return Form(field, [_elem(field, c) for c in e.coeffs])
    if isinstance(e, Pfister):
        q = Form(field, [1])
        for a in e.slots:
            q = tensor(q, Form(field, [1, _elem(field, a)]))
        return q
    if isinstance(e, Sum):
        return orthogonal_sum(elaborate(e.left, field), elaborate(e.right, field))
    if isinstance(e, Tensor):
        return tensor(elaborate(e.left, field), elaborate(e.right, field))
    if isinstance(e, Repeat):
        return repeat(e.count, elaborate(e.body, field))
    if isinstance(e, Scale):
        return scale(_elem(field, e.factor), elaborate(e.body, field))
    raise TypeError(e)


def form_from_source(src: str, field) -> Form:
    return elaborate(parse_form(src), field)
