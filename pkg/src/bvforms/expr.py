"""Text and JSON round-tripping for forms.

Grammar (explicit ``*``, no juxtaposition)::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := RATIONAL | GEN | 'h' | '(' expr ')'
    GEN    := ('x' | 'p' | 'dx' | 'dp') INT
    RATIONAL := INT ('/' INT)?

``h`` is the even central deformation parameter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import Gen, Kind, SuperForm
from .operators import HbarForm

__all__ = [
    "ParseError",
    "parse",
    "parse_form",
    "format_form",
    "format_hbar",
    "form_to_json",
    "form_from_json",
    "fraction_to_str",
]


class ParseError(ValueError):
    """Syntax or range error at a 0-based character position."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<gen>(?:dx|dp|x|p)\d+)
  | (?P<h>h)(?![A-Za-z0-9])
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)

_KINDS = {"x": Kind.X, "p": Kind.P, "dx": Kind.DX, "dp": Kind.DP}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _gen_of(tok: _Tok) -> Gen:
    m = re.fullmatch(r"(dx|dp|x|p)(\d+)", tok.text)
    index = int(m.group(2))
    if index < 1:
        raise ParseError(f"generator index must be >= 1 in {tok.text!r}", tok.pos)
    return Gen(_KINDS[m.group(1)], index)


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, tok.pos, self.text)

    def parse(self) -> HbarForm:
        if self.peek().kind == "end":
            raise self.error("empty expression")
        value = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return value

    def expr(self) -> HbarForm:
        value = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> HbarForm:
        value = self.unary()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            value = value * self.unary()
        return value

    def unary(self) -> HbarForm:
        t = self.peek()
        if t.kind == "op" and t.text in "+-":
            self.take()
            inner = self.unary()
            return -inner if t.text == "-" else inner
        return self.power()

    def power(self) -> HbarForm:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            t = self.take()
            if t.kind != "num" or "/" in t.text:
                raise self.error("exponent must be a non-negative integer", t)
            out = HbarForm([SuperForm.const(self.n, 1)], self.n)
            for _ in range(int(t.text)):
                out = out * base
            return out
        return base

    def atom(self) -> HbarForm:
        t = self.take()
        n = self.n
        if t.kind == "num":
            num, _, den = t.text.partition("/")
            if den and int(den) == 0:
                raise self.error("zero denominator", t)
            return HbarForm([SuperForm.const(n, Fraction(int(num), int(den or 1)))], n)
        if t.kind == "gen":
            g = _gen_of(t)
            if g.index > n:
                raise self.error(f"index of {t.text} exceeds n={n}", t)
            return HbarForm([SuperForm.gen(n, g)], n)
        if t.kind == "h":
            return HbarForm([SuperForm.zero(n), SuperForm.const(n, 1)], n)
        if t.kind == "op" and t.text == "(":
            value = self.expr()
            close = self.take()
            if close.kind != "op" or close.text != ")":
                raise self.error("expected ')'", close)
            return value
        if t.kind == "end":
            raise self.error("unexpected end of input", t)
        raise self.error(f"unexpected {t.text!r}", t)


def _infer_n(text: str) -> int:
    idx = [int(i) for i in re.findall(r"(?:dx|dp|x|p)(\d+)", text)]
    return max(idx + [1])


def parse(text: str, n: int | None = None) -> SuperForm | HbarForm:
    """Parse to a canonical SuperForm, or an HbarForm if ``h`` survives."""
    if n is None:
        n = _infer_n(text)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    value = _Parser(text, n).parse()
    if len(value) <= 1:
        return value[0]
    return value


def parse_form(text: str, n: int | None = None) -> SuperForm:
    value = parse(text, n)
    if isinstance(value, HbarForm):
        raise ParseError("expected a form without h", text.find("h"), text)
    return value


def fraction_to_str(c: Fraction) -> str:
    return str(c)


def _term(c: Fraction, body: str) -> tuple[str, str]:
    sign = "-" if c < 0 else "+"
    a = abs(c)
    if not body:
        return sign, str(a)
    if a == 1:
        return sign, body
    return sign, f"{a}*{body}"


def _join(parts: list[tuple[str, str]]) -> str:
    if not parts:
        return "0"
    sign, first = parts[0]
    out = ("-" if sign == "-" else "") + first
    for sign, s in parts[1:]:
        out += f" {sign} {s}"
    return out


def _terms(f: SuperForm, hpow: int = 0) -> list[tuple[str, str]]:
    h = "" if hpow == 0 else ("h" if hpow == 1 else f"h^{hpow}")
    parts = []
    for m, c in f.sorted_items():
        mono = "" if not m.factors() else m.to_str()
        body = "*".join(s for s in (h, mono) if s)
        parts.append(_term(c, body))
    return parts


def format_form(f: SuperForm) -> str:
    """Deterministic canonical string; ``parse(format_form(f)) == f``."""
    return _join(_terms(f))


def format_hbar(z: HbarForm | SuperForm) -> str:
    if isinstance(z, SuperForm):
        return format_form(z)
    parts: list[tuple[str, str]] = []
    for j, c in enumerate(z.coeffs):
        parts += _terms(c, j)
    return _join(parts)


def form_to_json(f: SuperForm) -> list[dict[str, str]]:
    return [
        {"monomial": m.to_str(), "coeff": f"{c.numerator}/{c.denominator}"}
        for m, c in f.sorted_items()
    ]


def form_from_json(records: list[dict[str, str]], n: int) -> SuperForm:
    out = SuperForm.zero(n)
    for rec in records:
        mono = parse_form(rec["monomial"], n)
        out = out + mono.scale(Fraction(rec["coeff"]))
    return out
