"""
Exact integer and rational primitives.

Every rational is a `fractions.Fraction`, always normalized, so equality is structural.
Factorization is delegated to sympy: trial division up to `QFLAB_FACTOR_LIMIT`,
then sympy's full factorint (Pollard rho / p-1) for a leftover composite cofactor.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import TypeAlias

from sympy import factorint, isprime
from sympy.ntheory import is_quad_residue

from qflab.errors import InvalidPrimeError, ZeroInputError
from qflab.logging_manager import get_logger
from qflab.settings import get_factor_limit

logger = get_logger(__name__)

ExactRational: TypeAlias = Fraction
RationalLike: TypeAlias = int | Fraction | str


def as_rational(value: RationalLike) -> Fraction:
    if isinstance(value, bool):
        raise TypeError('booleans are not rationals')
    return Fraction(value)


def require_nonzero(value: RationalLike, what: str = 'value') -> Fraction:
    rational = as_rational(value)
    if rational == 0:
        raise ZeroInputError(f'{what} must be nonzero')
    return rational


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        product = self.sign
        for prime, exponent in self.factors:
            product *= prime**exponent
        return product

    def primes(self) -> tuple[int, ...]:
        return tuple(prime for prime, _ in self.factors)


@lru_cache(maxsize=4096)
def _factor_positive(n: int) -> tuple[tuple[int, int], ...]:
    limit = get_factor_limit()
    partial = factorint(n, limit=limit)
    merged: dict[int, int] = {}
    for factor, exponent in partial.items():
        if isprime(factor):
            merged[factor] = merged.get(factor, 0) + exponent
            continue
        logger.debug('cofactor above trial-division limit', extra={'cofactor': factor, 'limit': limit})
        for prime, inner in factorint(factor).items():
            merged[prime] = merged.get(prime, 0) + inner * exponent
    return tuple(sorted(merged.items()))


def factorize(n: int) -> Factorization:
    if n == 0:
        raise ZeroInputError('cannot factorize zero')
    sign = -1 if n < 0 else 1
    if abs(n) == 1:
        return Factorization(sign, ())
    return Factorization(sign, _factor_positive(abs(n)))


def primes_dividing(value: RationalLike) -> tuple[int, ...]:
    rational = require_nonzero(value)
    found = set(factorize(rational.numerator).primes()) | set(factorize(rational.denominator).primes())
    return tuple(sorted(found))


@dataclass(frozen=True, order=True)
class SquareClass:
    """Class of a nonzero rational in Q*/Q*^2, held by its square-free integer representative."""

    representative: int

    def __post_init__(self) -> None:
        if self.representative == 0:
            raise ZeroInputError('square class of zero')

    def __mul__(self, other: 'SquareClass') -> 'SquareClass':
        return squarefree_part(self.representative * other.representative)

    def __str__(self) -> str:
        return str(self.representative)

    @property
    def is_trivial(self) -> bool:
        return self.representative == 1


def _squarefree_of_positive(n: int) -> int:
    kernel = 1
    for prime, exponent in factorize(n).factors:
        if exponent % 2:
            kernel *= prime
    return kernel


def squarefree_part(value: RationalLike) -> SquareClass:
    rational = require_nonzero(value, 'square class argument')
    sign = -1 if rational < 0 else 1
    # a/b and a*b differ by the square b^2
    kernel = _squarefree_of_positive(abs(rational.numerator)) * _squarefree_of_positive(rational.denominator)
    return SquareClass(sign * kernel)


def squarefree_integer(value: RationalLike) -> int:
    return squarefree_part(value).representative


def check_prime(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or not isprime(p):
        raise InvalidPrimeError(f'{p!r} is not a prime')
    return p


def legendre_symbol(a: int, p: int) -> int:
    check_prime(p)
    if p == 2:
        raise InvalidPrimeError('Legendre symbol needs an odd prime, got 2')
    if a % p == 0:
        return 0
    return 1 if is_quad_residue(a % p, p) else -1


def padic_valuation(value: RationalLike, p: int) -> int:
    check_prime(p)
    rational = require_nonzero(value, 'valuation argument')
    valuation = 0
    numerator, denominator = rational.numerator, rational.denominator
    while numerator % p == 0:
        numerator //= p
        valuation += 1
    while denominator % p == 0:
        denominator //= p
        valuation -= 1
    return valuation


def unit_part(value: RationalLike, p: int) -> Fraction:
    """x divided by p^v_p(x): numerator and denominator both prime to p."""
    rational = require_nonzero(value)
    return rational / Fraction(p) ** padic_valuation(rational, p)


def residue_mod(value: RationalLike, modulus: int) -> int:
    """Image of a rational whose denominator is prime to `modulus` in Z/modulus."""
    rational = as_rational(value)
    return rational.numerator * pow(rational.denominator, -1, modulus) % modulus


def rational_sqrt(value: RationalLike) -> Fraction | None:
    rational = as_rational(value)
    if rational < 0:
        return None
    top, bottom = math.isqrt(rational.numerator), math.isqrt(rational.denominator)
    if top * top != rational.numerator or bottom * bottom != rational.denominator:
        return None
    return Fraction(top, bottom)


def is_rational_square(value: RationalLike) -> bool:
    return rational_sqrt(value) is not None


def format_rational(value: RationalLike) -> str:
    return str(as_rational(value))
