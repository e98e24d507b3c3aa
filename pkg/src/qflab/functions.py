"""
Univariate polynomials and rational functions over Q, on top of sympy's `Poly`,
and elements u + v*y of a function field Q(x)[y] / (y^2 - f).
"""

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Final

from sympy import QQ, Poly, Rational, Symbol

from qflab.arith import RationalLike, as_rational

X: Final = Symbol('x')


def to_fraction(value: object) -> Fraction:
    """sympy Rational/Integer (or anything with .p/.q) to Fraction."""
    if isinstance(value, Fraction | int):
        return Fraction(value)
    return Fraction(int(value.p), int(value.q))  # type: ignore[attr-defined]


def to_sympy(value: RationalLike) -> Rational:
    rational = as_rational(value)
    return Rational(rational.numerator, rational.denominator)


def poly_from_coeffs(coeffs: Sequence[RationalLike]) -> Poly:
    """Highest degree first, as `Poly.all_coeffs` returns them."""
    return Poly.from_list([to_sympy(c) for c in coeffs] or [0], X, domain=QQ)


def constant_poly(value: RationalLike) -> Poly:
    return poly_from_coeffs([value])


def coefficients(poly: Poly) -> tuple[Fraction, ...]:
    return tuple(to_fraction(c) for c in poly.all_coeffs())


def degree(poly: Poly) -> int:
    if poly.is_zero:
        raise ValueError('the zero polynomial has no degree')
    return int(poly.degree())


def leading_coefficient(poly: Poly) -> Fraction:
    return to_fraction(poly.LC())


def evaluate(poly: Poly, point: RationalLike) -> Fraction:
    x0 = as_rational(point)
    value = Fraction(0)
    for coeff in coefficients(poly):
        value = value * x0 + coeff
    return value


def reverse(poly: Poly) -> Poly:
    """t^deg * p(1/t)."""
    return poly_from_coeffs(list(reversed(coefficients(poly))))


def shift_up(poly: Poly, power: int) -> Poly:
    """p * t^power."""
    if power < 0:
        raise ValueError('negative shift')
    return poly * Poly(X**power, X, domain=QQ)


def valuation(poly: Poly, modulus: Poly) -> int:
    """Exponent of the irreducible `modulus` in `poly`."""
    if poly.is_zero:
        raise ValueError('valuation of the zero polynomial')
    count = 0
    quotient, remainder = poly.div(modulus)
    while remainder.is_zero:
        count += 1
        poly = quotient
        quotient, remainder = poly.div(modulus)
    return count


def strip(poly: Poly, modulus: Poly, times: int) -> Poly:
    return poly.exquo(modulus**times) if times else poly


def irreducible_factors(poly: Poly) -> list[tuple[Poly, int]]:
    """Monic irreducible factors with exponents, ordered by (degree, coefficients)."""
    _, factors = poly.factor_list()
    monic = [(factor.monic(), exponent) for factor, exponent in factors if not factor.is_ground]
    return sorted(monic, key=lambda pair: (degree(pair[0]), coefficients(pair[0])))


def is_squarefree(poly: Poly) -> bool:
    return poly.gcd(poly.diff(X)).is_ground


def linear(root: RationalLike) -> Poly:
    """x - root."""
    return poly_from_coeffs([1, -as_rational(root)])


def format_polynomial(poly: Poly, variable: str = 'x') -> str:
    if poly.is_zero:
        return '0'
    coeffs = coefficients(poly)
    top = len(coeffs) - 1
    terms: list[str] = []
    for position, coeff in enumerate(coeffs):
        if coeff == 0:
            continue
        power = top - position
        monomial = '' if power == 0 else variable if power == 1 else f'{variable}^{power}'
        magnitude = abs(coeff)
        if not monomial:
            body = str(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f'{magnitude}*{monomial}'
        if not terms:
            terms.append(f'-{body}' if coeff < 0 else body)
        else:
            terms.append(f'- {body}' if coeff < 0 else f'+ {body}')
    return ' '.join(terms)


@dataclass(frozen=True)
class RationalFunction:
    """num/den with gcd 1 and a monic denominator."""

    num: Poly
    den: Poly

    def __post_init__(self) -> None:
        if self.den.is_zero:
            raise ZeroDivisionError('rational function with zero denominator')
        num, den = self.num, self.den
        if num.is_zero:
            num, den = constant_poly(0), constant_poly(1)
        else:
            common = num.gcd(den)
            num, den = num.exquo(common), den.exquo(common)
            lead = den.LC()
            num, den = num.quo_ground(lead), den.quo_ground(lead)
        object.__setattr__(self, 'num', num)  # noqa: PLC2801
        object.__setattr__(self, 'den', den)  # noqa: PLC2801

    @classmethod
    def polynomial(cls, poly: Poly) -> 'RationalFunction':
        return cls(poly, constant_poly(1))

    @classmethod
    def constant(cls, value: RationalLike) -> 'RationalFunction':
        return cls(constant_poly(value), constant_poly(1))

    @classmethod
    def x(cls) -> 'RationalFunction':
        return cls(poly_from_coeffs([1, 0]), constant_poly(1))

    @property
    def is_zero(self) -> bool:
        return bool(self.num.is_zero)

    @property
    def is_polynomial(self) -> bool:
        return bool(self.den.is_ground)

    @property
    def is_constant(self) -> bool:
        return bool(self.num.is_ground and self.den.is_ground)

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f'{self} is not constant')
        return leading_coefficient(self.num) if not self.is_zero else Fraction(0)

    def __add__(self, other: 'RationalFunction') -> 'RationalFunction':
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> 'RationalFunction':
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other: 'RationalFunction') -> 'RationalFunction':
        return self + (-other)

    def __mul__(self, other: 'RationalFunction') -> 'RationalFunction':
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: 'RationalFunction') -> 'RationalFunction':
        if other.is_zero:
            raise ZeroDivisionError('division by the zero function')
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __pow__(self, exponent: int) -> 'RationalFunction':
        if exponent < 0:
            return RationalFunction.constant(1) / self ** (-exponent)
        return RationalFunction(self.num**exponent, self.den**exponent)

    def scaled(self, factor: RationalLike) -> 'RationalFunction':
        return RationalFunction(self.num * to_sympy(factor), self.den)

    def evaluate(self, point: RationalLike) -> Fraction | None:
        denominator = evaluate(self.den, point)
        if denominator == 0:
            return None
        return evaluate(self.num, point) / denominator

    def __str__(self) -> str:
        if self.den.is_ground:
            return format_polynomial(self.num)
        return f'({format_polynomial(self.num)})/({format_polynomial(self.den)})'


@dataclass(frozen=True)
class FunctionElement:
    """u + v*y; products need the curve equation and live on the curve classes."""

    u: RationalFunction
    v: RationalFunction

    @classmethod
    def of(
        cls,
        u: 'RationalFunction | Poly | RationalLike',
        v: 'RationalFunction | Poly | RationalLike' = 0,
    ) -> 'FunctionElement':
        return cls(_as_rational_function(u), _as_rational_function(v))

    @classmethod
    def constant(cls, value: RationalLike) -> 'FunctionElement':
        return cls.of(value)

    @classmethod
    def x(cls) -> 'FunctionElement':
        return cls(RationalFunction.x(), RationalFunction.constant(0))

    @classmethod
    def y(cls) -> 'FunctionElement':
        return cls(RationalFunction.constant(0), RationalFunction.constant(1))

    @property
    def is_zero(self) -> bool:
        return self.u.is_zero and self.v.is_zero

    @property
    def is_constant(self) -> bool:
        return self.v.is_zero and self.u.is_constant

    @property
    def has_y(self) -> bool:
        return not self.v.is_zero

    def __add__(self, other: 'FunctionElement') -> 'FunctionElement':
        return FunctionElement(self.u + other.u, self.v + other.v)

    def __neg__(self) -> 'FunctionElement':
        return FunctionElement(-self.u, -self.v)

    def __sub__(self, other: 'FunctionElement') -> 'FunctionElement':
        return self + (-other)

    def scaled(self, factor: RationalLike) -> 'FunctionElement':
        return FunctionElement(self.u.scaled(factor), self.v.scaled(factor))

    def integral_parts(self) -> tuple[Poly, Poly, Poly]:
        """(U, V, D) polynomials with self = (U + V*y) / D and D monic."""
        common = self.u.den.lcm(self.v.den)
        upper = self.u.num * common.exquo(self.u.den)
        lower = self.v.num * common.exquo(self.v.den)
        return upper, lower, common

    def __str__(self) -> str:
        if self.v.is_zero:
            return str(self.u)
        y_part = 'y' if self.v == RationalFunction.constant(1) else f'({self.v})*y'
        if self.u.is_zero:
            return y_part
        return f'{self.u} + {y_part}'


def _as_rational_function(value: RationalFunction | Poly | RationalLike) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Poly):
        return RationalFunction.polynomial(value)
    return RationalFunction.constant(value)
