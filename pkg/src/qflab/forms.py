"""
Diagonal quadratic forms over Q.

Local questions are answered from the classical invariants (rank, discriminant,
Hasse invariant, signature); global ones through Hasse-Minkowski, scanning the
real place and the finitely many primes dividing 2 times the entries.
"""

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from operator import mul
from typing import Final, Literal

from qflab.arith import RationalLike, SquareClass, as_rational, require_nonzero, squarefree_integer, squarefree_part
from qflab.errors import SearchExhaustedError, UnsupportedOperationError
from qflab.logging_manager import get_logger
from qflab.places import (
    Field,
    HilbertValue,
    Place,
    hilbert_symbol,
    is_local_square,
    local_square_classes,
    sorted_places,
    support_places,
)

logger = get_logger(__name__)

# bound on |candidate| when a global complement entry is searched among square-free integers
GLOBAL_CANDIDATE_BOUND: Final = 10_000


@dataclass(frozen=True)
class DiagonalForm:
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError('a diagonal form needs at least one entry')
        normalized = tuple(require_nonzero(entry, 'form entry') for entry in self.entries)
        object.__setattr__(self, 'entries', normalized)  # noqa: PLC2801

    @classmethod
    def of(cls, *entries: RationalLike) -> 'DiagonalForm':
        return cls(tuple(as_rational(entry) for entry in entries))

    @classmethod
    def hyperbolic(cls, planes: int) -> 'DiagonalForm':
        return cls.of(*([1, -1] * planes))

    @property
    def rank(self) -> int:
        return len(self.entries)

    @cached_property
    def determinant(self) -> Fraction:
        return reduce(mul, self.entries, Fraction(1))

    @property
    def signature(self) -> int:
        return sum(1 if entry > 0 else -1 for entry in self.entries)

    @property
    def signed_determinant(self) -> Fraction:
        """(-1)^(n(n-1)/2) * det, trivial exactly for forms in I^2 of even rank."""
        pairs = self.rank * (self.rank - 1) // 2
        return self.determinant * (-1) ** pairs

    def evaluate(self, vector: Sequence[RationalLike]) -> Fraction:
        if len(vector) != self.rank:
            raise ValueError(f'vector of length {len(vector)} for a form of rank {self.rank}')
        return sum((entry * as_rational(x) ** 2 for entry, x in zip(self.entries, vector, strict=True)), Fraction(0))

    def to_text(self) -> str:
        return ','.join(str(entry) for entry in self.entries)

    def __str__(self) -> str:
        return f'<{self.to_text()}>'

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.entries)


@dataclass(frozen=True)
class FormInvariants:
    rank: int
    disc: SquareClass
    signature: int
    # places with Hasse invariant -1, +1 implied elsewhere
    hasse: dict[Place, int] = field(default_factory=dict)

    def to_dict(self) -> dict[str, object]:
        return {
            'rank': self.rank,
            'disc': self.disc.representative,
            'signature': self.signature,
            'hasse': {str(place): value for place, value in self.hasse.items()},
        }


@dataclass(frozen=True)
class WittClass:
    anisotropic_kernel: DiagonalForm | None
    witt_index: int

    @property
    def is_hyperbolic(self) -> bool:
        return self.anisotropic_kernel is None

    def to_dict(self) -> dict[str, object]:
        kernel = None if self.anisotropic_kernel is None else self.anisotropic_kernel.to_text()
        return {'witt_index': self.witt_index, 'anisotropic_kernel': kernel}


def direct_sum(*forms: DiagonalForm) -> DiagonalForm:
    return DiagonalForm(tuple(entry for form in forms for entry in form.entries))


def tensor(first: DiagonalForm, second: DiagonalForm) -> DiagonalForm:
    return DiagonalForm(tuple(a * b for a in first.entries for b in second.entries))


def scale(factor: RationalLike, form: DiagonalForm) -> DiagonalForm:
    scalar = require_nonzero(factor, 'scale factor')
    return DiagonalForm(tuple(scalar * entry for entry in form.entries))


def canonical(form: DiagonalForm) -> DiagonalForm:
    """Entries replaced by square-free representatives and sorted, for display."""
    return DiagonalForm.of(*sorted(squarefree_integer(entry) for entry in form.entries))


def form_support(*forms: DiagonalForm) -> list[Place]:
    return support_places(*(entry for form in forms for entry in form.entries))


def hasse_invariant(form: DiagonalForm, place: Place) -> HilbertValue:
    value = 1
    for left, right in combinations(form.entries, 2):
        value *= hilbert_symbol(left, right, place)
    return -1 if value < 0 else 1


def invariants(form: DiagonalForm) -> FormInvariants:
    hasse = {place: -1 for place in form_support(form) if hasse_invariant(form, place) == -1}
    return FormInvariants(
        rank=form.rank,
        disc=squarefree_part(form.determinant),
        signature=form.signature,
        hasse=hasse,
    )


def _isotropic_at_prime(form: DiagonalForm, place: Place) -> bool:
    rank = form.rank
    if rank == 1:
        return False
    if rank == 2:
        return is_local_square(-form.determinant, place)
    if rank == 3:
        return hasse_invariant(form, place) == hilbert_symbol(-1, -form.determinant, place)
    if rank == 4:
        if not is_local_square(form.determinant, place):
            return True
        return hasse_invariant(form, place) == hilbert_symbol(-1, -1, place)
    return True


def is_isotropic(form: DiagonalForm, place: Place) -> bool:
    if place.is_real:
        isotropic = abs(form.signature) < form.rank
    else:
        isotropic = _isotropic_at_prime(_reduced(form), place)
    logger.debug('local isotropy', extra={'form': str(form), 'place': str(place), 'isotropic': isotropic})
    return isotropic


def is_isotropic_global(form: DiagonalForm) -> bool:
    reduced = _reduced(form)
    return all(is_isotropic(reduced, place) for place in form_support(reduced))


def is_isotropic_over(form: DiagonalForm, field: Field) -> bool:
    if isinstance(field, Place):
        return is_isotropic(form, field)
    return is_isotropic_global(form)


def _reduced(form: DiagonalForm) -> DiagonalForm:
    # isometric form with square-free integer entries
    return DiagonalForm.of(*(squarefree_integer(entry) for entry in form.entries))


def _isometric_at(first: DiagonalForm, second: DiagonalForm, place: Place) -> bool:
    if first.rank != second.rank:
        return False
    if place.is_real:
        return first.signature == second.signature
    if not is_local_square(first.determinant * second.determinant, place):
        return False
    return hasse_invariant(first, place) == hasse_invariant(second, place)


def is_isometric(first: DiagonalForm, second: DiagonalForm, field: Field) -> bool:
    if isinstance(field, Place):
        return _isometric_at(_reduced(first), _reduced(second), field)
    if first.rank != second.rank or first.signature != second.signature:
        return False
    if squarefree_part(first.determinant) != squarefree_part(second.determinant):
        return False
    left, right = _reduced(first), _reduced(second)
    return all(hasse_invariant(left, place) == hasse_invariant(right, place) for place in form_support(left, right))


def _local_kernel_rank(form: DiagonalForm, place: Place) -> int:
    rank = form.rank
    if place.is_real:
        return abs(form.signature)
    if rank % 2:
        planes = (rank - 1) // 2
        last = DiagonalForm.of((-1) ** planes * form.determinant)
        split_shape = direct_sum(DiagonalForm.hyperbolic(planes), last) if planes else last
        return 1 if _isometric_at(form, _reduced(split_shape), place) else 3
    if _isometric_at(form, DiagonalForm.hyperbolic(rank // 2), place):
        return 0
    return 4 if is_local_square(form.signed_determinant, place) else 2


def witt_index(form: DiagonalForm, field: Field) -> int:
    reduced = _reduced(form)
    places = [field] if isinstance(field, Place) else form_support(reduced)
    # over Q the index is the least of the local ones
    index = min((reduced.rank - _local_kernel_rank(reduced, place)) // 2 for place in places)
    logger.debug('witt index', extra={'form': str(form), 'field': str(field), 'witt_index': index})
    return index


def is_subform(sub: DiagonalForm, form: DiagonalForm, field: Field) -> bool:
    """sub is isometric to a subform of form: q = sub + r iff q - sub has sub's rank in hyperbolic planes."""
    if sub.rank > form.rank:
        return False
    return witt_index(direct_sum(form, scale(-1, sub)), field) >= sub.rank


def _candidate_values(field: Field, preferred: Iterable[Fraction]) -> Iterator[Fraction]:
    seen: set[int] = set()
    pool: Iterable[int]
    if isinstance(field, Place):
        pool = local_square_classes(field)
    else:
        pool = (sign * n for n in range(1, GLOBAL_CANDIDATE_BOUND + 1) for sign in (1, -1))
    for value in (*(squarefree_integer(entry) for entry in preferred), *pool):
        representative = squarefree_integer(value)
        if representative in seen:
            continue
        seen.add(representative)
        yield Fraction(representative)


def orthogonal_complement(sub: DiagonalForm | None, form: DiagonalForm, field: Field) -> DiagonalForm | None:
    """
    A diagonal r with form isometric to sub + r over `field`, None when the ranks are equal.

    Entries are picked greedily: each new value keeps `sub + <chosen>` a subform of `form`,
    and the last one is forced by the discriminant.
    """
    sub_rank = 0 if sub is None else sub.rank
    if sub is not None and not is_subform(sub, form, field):
        raise UnsupportedOperationError(f'{sub} is not a subform of {form} over {field}')
    missing = form.rank - sub_rank
    if missing == 0:
        return None
    chosen: list[Fraction] = []
    for _ in range(missing - 1):
        chosen.append(_next_complement_entry(sub, chosen, form, field))
    partial = _join(sub, chosen)
    last = form.determinant / partial.determinant if partial is not None else form.determinant
    chosen.append(Fraction(squarefree_integer(last)))
    rebuilt = _join(sub, chosen)
    assert rebuilt is not None  # noqa: S101
    if not is_isometric(rebuilt, form, field):
        raise SearchExhaustedError(f'no complement of {sub} in {form} over {field}')
    return DiagonalForm(tuple(chosen))


def _join(sub: DiagonalForm | None, chosen: Sequence[Fraction]) -> DiagonalForm | None:
    if not chosen:
        return sub
    tail = DiagonalForm(tuple(chosen))
    return tail if sub is None else direct_sum(sub, tail)


def _next_complement_entry(
    sub: DiagonalForm | None,
    chosen: Sequence[Fraction],
    form: DiagonalForm,
    field: Field,
) -> Fraction:
    for candidate in _candidate_values(field, form.entries):
        extended = _join(sub, [*chosen, candidate])
        assert extended is not None  # noqa: S101
        if is_subform(extended, form, field):
            return candidate
    raise SearchExhaustedError(f'no value extends the subform of {form} over {field}')


def hyperbolic_complement(form: DiagonalForm, field: Field) -> DiagonalForm | None:
    """Anisotropic kernel: r with form = (witt index) * H + r."""
    index = witt_index(form, field)
    hyperbolic_part = DiagonalForm.hyperbolic(index) if index else None
    return orthogonal_complement(hyperbolic_part, form, field)


def witt_decompose(form: DiagonalForm, field: Field) -> WittClass:
    index = witt_index(form, field)
    kernel = None if 2 * index == form.rank else hyperbolic_complement(form, field)
    return WittClass(anisotropic_kernel=kernel, witt_index=index)


def represents(form: DiagonalForm, value: RationalLike, field: Field) -> bool:
    target = require_nonzero(value, 'represented value')
    return is_isotropic_over(direct_sum(form, DiagonalForm.of(-target)), field)


def is_hyperbolic(form: DiagonalForm, field: Field) -> bool:
    return form.rank % 2 == 0 and witt_index(form, field) == form.rank // 2


def witt_invariant(form: DiagonalForm, place: Place) -> HilbertValue:
    """Hasse invariant corrected by rank mod 8, so that hyperbolic planes do not change it."""
    hasse = hasse_invariant(form, place)
    residue = form.rank % 8
    if residue in {1, 2}:
        return hasse
    if residue in {3, 4}:
        correction = hilbert_symbol(-1, -form.determinant, place)
    elif residue in {5, 6}:
        correction = hilbert_symbol(-1, -1, place)
    else:
        correction = hilbert_symbol(-1, form.determinant, place)
    return -1 if hasse * correction < 0 else 1


def in_fundamental_power(form: DiagonalForm, power: Literal[1, 2, 3]) -> bool:
    if power not in {1, 2, 3}:
        raise UnsupportedOperationError(f'fundamental ideal power {power} is not supported, use 1, 2 or 3')
    if form.rank % 2:
        return False
    if power == 1:
        return True
    if squarefree_part(form.signed_determinant) != SquareClass(1):
        return False
    if power == 2:
        return True
    if form.signature % 8:
        return False
    reduced = _reduced(form)
    return all(witt_invariant(reduced, place) == 1 for place in form_support(reduced) if not place.is_real)


def anisotropic_places(form: DiagonalForm) -> list[Place]:
    if form.rank <= 2:
        raise UnsupportedOperationError(
            f'rank {form.rank} forms can be anisotropic at infinitely many places, rank >= 3 is required'
        )
    reduced = _reduced(form)
    return sorted_places([place for place in form_support(reduced) if not is_isotropic(reduced, place)])


def local_isotropy_profile(form: DiagonalForm) -> dict[Place, bool]:
    reduced = _reduced(form)
    return {place: is_isotropic(reduced, place) for place in form_support(reduced)}

