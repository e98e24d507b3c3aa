"""
Text formats of the command line.

    form       1,-2,3,-6   or   <1,-2,3,-6>
    pfister    <<a,b>>     or   a,b
    place      real | inf | global | all | <prime>
    curve      y^2 = <polynomial in x>   or   P1
    function   rational expression in x and y, e.g. (x^2+1)/(x-1) + 1/2*x*y

Every printer in qflab produces text these parsers read back.
Errors are `ParseError` with the 0-based position of the offending character.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Final, Literal

from qflab.curves import BaseCurve, HyperellipticCurve, ProjectiveLine
from qflab.errors import InvalidPrimeError, ParseError
from qflab.forms import DiagonalForm
from qflab.functions import FunctionElement, RationalFunction
from qflab.pfister import PfisterForm
from qflab.places import GLOBAL, REAL, Field, Place

ALL_PLACES: Final = 'all'
MAX_EXPONENT: Final = 64

_RATIONAL_RE: Final = re.compile(r'\s*([+-]?\d+(?:/\d+)?)\s*')
_TOKEN_RE: Final = re.compile(r'\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*/^()=]))')
_REAL_NAMES: Final = frozenset(('real', 'inf', 'infinity', 'r'))
_GLOBAL_NAMES: Final = frozenset(('global', 'q'))
_LINE_NAMES: Final = frozenset(('p1', 'p^1'))


def parse_rational(text: str, *, offset: int = 0, source: str | None = None) -> Fraction:
    """An integer or a/b; `offset` and `source` place errors inside a longer input."""
    full = text if source is None else source
    match = _RATIONAL_RE.fullmatch(text)
    if match is None:
        raise ParseError(f'expected a rational number, got {text.strip()!r}', full, offset + _first_visible(text))
    try:
        return Fraction(match.group(1))
    except ZeroDivisionError as exc:
        raise ParseError('zero denominator', full, offset + _first_visible(text)) from exc


def _first_visible(text: str) -> int:
    return len(text) - len(text.lstrip())


def _split_items(body: str, offset: int) -> list[tuple[str, int]]:
    items = []
    position = offset
    for chunk in body.split(','):
        items.append((chunk, position))
        position += len(chunk) + 1
    return items


def _unwrap(text: str, opening: str, closing: str) -> tuple[str, int]:
    stripped = text.strip()
    start = text.index(stripped[0]) if stripped else 0
    if stripped.startswith(opening):
        if not stripped.endswith(closing):
            raise ParseError(f'missing {closing!r}', text, len(text.rstrip()))
        return stripped[len(opening) : -len(closing)], start + len(opening)
    return stripped, start


def parse_entries(text: str, opening: str, closing: str) -> tuple[Fraction, ...]:
    body, offset = _unwrap(text, opening, closing)
    if not body.strip():
        raise ParseError('expected at least one entry', text, offset)
    entries = []
    for chunk, position in _split_items(body, offset):
        value = parse_rational(chunk, offset=position, source=text)
        if value == 0:
            raise ParseError('entries must be nonzero', text, position + _first_visible(chunk))
        entries.append(value)
    return tuple(entries)


def parse_form(text: str) -> DiagonalForm:
    return DiagonalForm(parse_entries(text, '<', '>'))


def parse_pfister(text: str) -> PfisterForm:
    return PfisterForm(parse_entries(text, '<<', '>>'))


def parse_place(text: str) -> Field | Literal['all']:
    name = text.strip().lower()
    if name in _REAL_NAMES:
        return REAL
    if name in _GLOBAL_NAMES:
        return GLOBAL
    if name == ALL_PLACES:
        return ALL_PLACES
    if not name.isdigit():
        raise ParseError('expected real, global, all or a prime', text, _first_visible(text))
    try:
        return Place(int(name))
    except InvalidPrimeError as exc:
        raise ParseError(str(exc), text, _first_visible(text)) from exc


@dataclass(frozen=True)
class _Token:
    kind: Literal['number', 'name', 'op', 'end']
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    position = 0
    while position < len(text):
        if text[position:].isspace():
            break
        match = _TOKEN_RE.match(text, position)
        if match is None:
            start = position + _first_visible(text[position:])
            raise ParseError(f'unexpected character {text[start]!r}', text, start)
        kind = match.lastgroup
        assert kind is not None  # noqa: S101
        tokens.append(_Token(kind, match.group(kind), match.start(kind)))  # type: ignore[arg-type]
        position = match.end()
    tokens.append(_Token('end', '', len(text)))
    return tokens


class _FunctionParser:
    """
    Recursive descent over

        expr   := term (('+' | '-') term)*
        term   := unary (('*' | '/')? unary)*
        unary  := ('+' | '-') unary | power
        power  := atom (('^' | '**') NUMBER)?
        atom   := NUMBER | 'x' | 'y' | '(' expr ')'

    Juxtaposition multiplies, so 2x and 3(x+1) are accepted.
    """

    def __init__(self, text: str, curve: BaseCurve | None, *, allow_y: bool = True) -> None:
        self.text = text
        self.curve = curve
        self.allow_y = allow_y
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def _error(self, message: str, token: _Token | None = None) -> ParseError:
        return ParseError(message, self.text, (token or self.current).position)

    def parse(self) -> FunctionElement:
        if self.current.kind == 'end':
            raise self._error('expected an expression')
        value = self._expr()
        if self.current.kind != 'end':
            raise self._error(f'unexpected {self.current.text!r}')
        return value

    def _expr(self) -> FunctionElement:
        value = self._term()
        while self.current.text in {'+', '-'} and self.current.kind == 'op':
            operator = self._advance()
            right = self._term()
            value = value + right if operator.text == '+' else value - right
        return value

    def _starts_atom(self) -> bool:
        token = self.current
        return token.kind in {'number', 'name'} or (token.kind == 'op' and token.text == '(')

    def _term(self) -> FunctionElement:
        value = self._unary()
        while True:
            if self.current.kind == 'op' and self.current.text in {'*', '/'}:
                operator = self._advance()
                right = self._unary()
                if operator.text == '*':
                    value = self._multiply(value, right, operator)
                else:
                    value = self._divide(value, right, operator)
            elif self._starts_atom():
                operator = self.current
                value = self._multiply(value, self._unary(), operator)
            else:
                return value

    def _unary(self) -> FunctionElement:
        if self.current.kind == 'op' and self.current.text in {'+', '-'}:
            operator = self._advance()
            value = self._unary()
            return -value if operator.text == '-' else value
        return self._power()

    def _power(self) -> FunctionElement:
        base = self._atom()
        if self.current.kind == 'op' and self.current.text in {'^', '**'}:
            operator = self._advance()
            exponent_token = self.current
            if exponent_token.kind != 'number':
                raise self._error('expected a non-negative integer exponent')
            if int(exponent_token.text) > MAX_EXPONENT:
                raise self._error(f'exponent larger than {MAX_EXPONENT}')
            self._advance()
            result = FunctionElement.constant(1)
            for _ in range(int(exponent_token.text)):
                result = self._multiply(result, base, operator)
            return result
        return base

    def _atom(self) -> FunctionElement:
        token = self.current
        if token.kind == 'number':
            self._advance()
            return FunctionElement.constant(int(token.text))
        if token.kind == 'name':
            self._advance()
            if token.text == 'x':
                return FunctionElement.x()
            if token.text == 'y':
                if not self.allow_y:
                    raise self._error('y is not allowed here', token)
                return FunctionElement.y()
            raise self._error(f'unknown variable {token.text!r}', token)
        if token.kind == 'op' and token.text == '(':
            self._advance()
            value = self._expr()
            if not (self.current.kind == 'op' and self.current.text == ')'):
                raise self._error("expected ')'")
            self._advance()
            return value
        raise self._error('expected a number, x, y or (' if token.kind != 'end' else 'unexpected end of input')

    def _multiply(self, left: FunctionElement, right: FunctionElement, operator: _Token) -> FunctionElement:
        if self.curve is not None:
            return self.curve.multiply(left, right)
        if left.has_y and right.has_y:
            raise self._error('y*y needs a curve equation', operator)
        return FunctionElement(left.u * right.u, left.u * right.v + left.v * right.u)

    def _divide(self, left: FunctionElement, right: FunctionElement, operator: _Token) -> FunctionElement:
        if right.is_zero:
            raise self._error('division by zero', operator)
        if not right.has_y:
            return FunctionElement(left.u / right.u, left.v / right.u)
        if not isinstance(self.curve, HyperellipticCurve):
            raise self._error('division by an expression in y needs a curve equation', operator)
        return self.curve.multiply(left, self.curve.inverse(right))


def parse_function(text: str, curve: BaseCurve | None = None) -> FunctionElement:
    """A function u + v*y on `curve`; without a curve, y may only appear linearly."""
    allow_y = not isinstance(curve, ProjectiveLine)
    return _FunctionParser(text, curve, allow_y=allow_y).parse()


def parse_polynomial(text: str, *, source: str | None = None, offset: int = 0) -> RationalFunction:
    try:
        element = _FunctionParser(text, None, allow_y=False).parse()
    except ParseError as exc:
        if source is None:
            raise
        raise ParseError(exc.reason, source, offset + exc.position) from exc
    if not element.u.is_polynomial:
        raise ParseError('expected a polynomial in x', source or text, offset)
    return element.u


def parse_curve(text: str) -> BaseCurve:
    if text.strip().lower() in _LINE_NAMES:
        return ProjectiveLine()
    lhs, equals, rhs = text.partition('=')
    if not equals:
        raise ParseError("expected 'y^2 = <polynomial in x>' or 'P1'", text, len(text))
    if re.fullmatch(r'\s*y\s*(\^|\*\*)\s*2\s*', lhs) is None:
        raise ParseError("the left-hand side must be 'y^2'", text, _first_visible(lhs))
    offset = len(lhs) + 1
    equation = parse_polynomial(rhs, source=text, offset=offset)
    try:
        return HyperellipticCurve(equation.num)
    except ValueError as exc:
        raise ParseError(str(exc), text, offset + _first_visible(rhs)) from exc
