"""
Places of Q, local squares and the Hilbert symbol.

The symbol is evaluated in closed form from valuations and unit parts
(Legendre symbols at odd primes, residues mod 8 at 2, signs at the real place).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Final, Literal, TypeAlias

from qflab.arith import (
    RationalLike,
    check_prime,
    legendre_symbol,
    padic_valuation,
    primes_dividing,
    require_nonzero,
    residue_mod,
    squarefree_integer,
    unit_part,
)
from qflab.logging_manager import get_logger

logger = get_logger(__name__)

HilbertValue: TypeAlias = Literal[-1, 1]


@dataclass(frozen=True)
class Place:
    """A completion of Q: `prime` is None for the real place."""

    prime: int | None = None

    def __post_init__(self) -> None:
        if self.prime is not None:
            check_prime(self.prime)

    @classmethod
    def real(cls) -> 'Place':
        return cls(None)

    @classmethod
    def finite(cls, prime: int) -> 'Place':
        return cls(prime)

    @property
    def is_real(self) -> bool:
        return self.prime is None

    def sort_key(self) -> tuple[int, int]:
        return (0, 0) if self.prime is None else (1, self.prime)

    def __lt__(self, other: 'Place') -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return 'real' if self.prime is None else str(self.prime)


REAL: Final = Place.real()
GLOBAL: Final = 'global'
# a place, or Q itself
Field: TypeAlias = Place | Literal['global']


def field_name(field: Field) -> str:
    if isinstance(field, str):
        return 'Q'
    return 'R' if field.is_real else f'Q_{field.prime}'


def sorted_places(places: set[Place] | frozenset[Place] | list[Place]) -> list[Place]:
    return sorted(places, key=Place.sort_key)


def support_places(*values: RationalLike) -> list[Place]:
    """The real place, 2, and every prime dividing a numerator or denominator of `values`."""
    primes = {2}
    for value in values:
        primes.update(primes_dividing(value))
    return [REAL, *(Place(p) for p in sorted(primes))]


def is_local_square(value: RationalLike, place: Place) -> bool:
    rational = require_nonzero(value, 'local square argument')
    if place.is_real:
        return rational > 0
    p = place.prime
    assert p is not None  # noqa: S101
    if padic_valuation(rational, p) % 2:
        return False
    unit = unit_part(rational, p)
    if p == 2:
        return residue_mod(unit, 8) == 1
    return legendre_symbol(residue_mod(unit, p), p) == 1


def _unit_legendre(unit: Fraction, p: int) -> int:
    return legendre_symbol(residue_mod(unit, p), p)


def _epsilon(unit_mod_8: int) -> int:
    return ((unit_mod_8 - 1) // 2) % 2


def _omega(unit_mod_8: int) -> int:
    return ((unit_mod_8 * unit_mod_8 - 1) // 8) % 2


def _hilbert_at_prime(a: Fraction, b: Fraction, p: int) -> HilbertValue:
    alpha, beta = padic_valuation(a, p), padic_valuation(b, p)
    u, w = unit_part(a, p), unit_part(b, p)
    if p == 2:
        u8, w8 = residue_mod(u, 8), residue_mod(w, 8)
        exponent = _epsilon(u8) * _epsilon(w8) + alpha * _omega(w8) + beta * _omega(u8)
        return -1 if exponent % 2 else 1
    sign = -1 if (alpha * beta * (p - 1) // 2) % 2 else 1
    value = sign * _unit_legendre(u, p) ** (beta % 2) * _unit_legendre(w, p) ** (alpha % 2)
    return -1 if value < 0 else 1


def hilbert_symbol(a: RationalLike, b: RationalLike, place: Place) -> HilbertValue:
    # the symbol only depends on square classes, small integers keep residues cheap
    a_class = squarefree_integer(require_nonzero(a, 'Hilbert symbol argument'))
    b_class = squarefree_integer(require_nonzero(b, 'Hilbert symbol argument'))
    if place.is_real:
        symbol: HilbertValue = -1 if a_class < 0 and b_class < 0 else 1
    else:
        assert place.prime is not None  # noqa: S101
        symbol = _hilbert_at_prime(Fraction(a_class), Fraction(b_class), place.prime)
    logger.debug('hilbert symbol', extra={'a': a_class, 'b': b_class, 'place': str(place), 'symbol': symbol})
    return symbol


def hilbert_support(a: RationalLike, b: RationalLike) -> frozenset[Place]:
    """Places where (a, b) may be -1; the symbol is +1 everywhere else."""
    require_nonzero(a, 'Hilbert symbol argument')
    require_nonzero(b, 'Hilbert symbol argument')
    return frozenset(place for place in support_places(a, b) if hilbert_symbol(a, b, place) == -1)


def local_square_classes(place: Place) -> tuple[int, ...]:
    """Integer representatives of every class of Q_v*/Q_v*^2."""
    if place.is_real:
        return (1, -1)
    p = place.prime
    assert p is not None  # noqa: S101
    if p == 2:
        return (1, 3, 5, 7, 2, 6, 10, 14)
    nonresidue = next(candidate for candidate in range(2, p) if legendre_symbol(candidate, p) == -1)
    return (1, nonresidue, p, nonresidue * p)
