"""
Pfister forms, their neighbors and norm groups.

For a Pfister form P the norm group N_P(k) is its set of nonzero values, and
x lies in it exactly when P * <1, -x> is isotropic (equivalently hyperbolic).
Neighbors and scalar multiples share the norm group of their ambient form.
"""

import enum
import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Final

from qflab.arith import RationalLike, as_rational, rational_sqrt, require_nonzero, squarefree_integer
from qflab.errors import InvariantViolationError, UnsupportedOperationError
from qflab.forms import (
    DiagonalForm,
    direct_sum,
    is_hyperbolic,
    is_isometric,
    is_isotropic_over,
    is_subform,
    orthogonal_complement,
    represents,
    scale,
    tensor,
)
from qflab.logging_manager import get_logger
from qflab.places import (
    GLOBAL,
    REAL,
    Field,
    Place,
    field_name,
    hilbert_symbol,
    is_local_square,
    sorted_places,
    support_places,
)

logger = get_logger(__name__)

MAX_NEIGHBOR_FOLD: Final = 3
WITNESS_MAX_RANK: Final = 4
WITNESS_MAX_HEIGHT: Final = 6


@dataclass(frozen=True)
class PfisterForm:
    """<<a1, ..., an>> = <1, a1> * ... * <1, an>."""

    slots: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.slots:
            raise ValueError('a Pfister form needs at least one slot')
        slots = tuple(require_nonzero(slot, 'Pfister slot') for slot in self.slots)
        object.__setattr__(self, 'slots', slots)  # noqa: PLC2801

    @classmethod
    def of(cls, *slots: RationalLike) -> 'PfisterForm':
        return cls(tuple(as_rational(slot) for slot in slots))

    @property
    def fold(self) -> int:
        return len(self.slots)

    @property
    def rank(self) -> int:
        return 2**self.fold

    def to_text(self) -> str:
        return '<<' + ','.join(str(slot) for slot in self.slots) + '>>'

    def __str__(self) -> str:
        return self.to_text()


def expand(pfister: PfisterForm) -> DiagonalForm:
    result = DiagonalForm.of(1)
    for slot in pfister.slots:
        result = direct_sum(result, scale(slot, result))
    return result


class MembershipAnswer(enum.Enum):
    MEMBER = 'member'
    NON_MEMBER = 'non-member'
    UNKNOWN = 'unknown'


@dataclass(frozen=True)
class ValueWitness:
    """form(vector) == value, checked exactly."""

    form: DiagonalForm
    vector: tuple[Fraction, ...]
    value: Fraction

    def verify(self) -> bool:
        return self.form.evaluate(self.vector) == self.value

    def to_dict(self) -> dict[str, object]:
        return {
            'form': self.form.to_text(),
            'vector': [str(x) for x in self.vector],
            'value': str(self.value),
        }


@dataclass(frozen=True)
class NormMembershipVerdict:
    answer: MembershipAnswer
    reason: str
    witness: ValueWitness | None = None

    def to_dict(self) -> dict[str, object]:
        return {
            'answer': self.answer.value,
            'reason': self.reason,
            'witness': None if self.witness is None else self.witness.to_dict(),
        }


@dataclass(frozen=True)
class NeighborCertificate:
    """scale * expand(pfister) is isometric to neighbor + complement over Q."""

    neighbor: DiagonalForm
    pfister: PfisterForm
    scale: Fraction
    complement: DiagonalForm | None


def _check_neighbor_request(neighbor: DiagonalForm, pfister: PfisterForm) -> None:
    if pfister.fold > MAX_NEIGHBOR_FOLD:
        raise UnsupportedOperationError(
            f'neighbor certification supports Pfister forms of fold <= {MAX_NEIGHBOR_FOLD}, got {pfister.fold}'
        )
    if neighbor.rank > pfister.rank:
        raise UnsupportedOperationError(f'rank {neighbor.rank} exceeds the rank {pfister.rank} of {pfister}')


def certify_neighbor(neighbor: DiagonalForm, pfister: PfisterForm) -> NeighborCertificate | None:
    _check_neighbor_request(neighbor, pfister)
    if neighbor.rank < pfister.rank // 2 + 1:
        return None
    # a subform of lambda * P represents its own first entry, and lambda * P is then similar to entry * P
    factor = neighbor.entries[0]
    ambient = scale(factor, expand(pfister))
    if not is_subform(neighbor, ambient, GLOBAL):
        return None
    complement = orthogonal_complement(neighbor, ambient, GLOBAL)
    logger.debug('neighbor certified', extra={'neighbor': str(neighbor), 'pfister': str(pfister)})
    return NeighborCertificate(neighbor=neighbor, pfister=pfister, scale=factor, complement=complement)


def is_pfister_neighbor(neighbor: DiagonalForm, pfister: PfisterForm) -> bool:
    return certify_neighbor(neighbor, pfister) is not None


def _similar_to(form: DiagonalForm, factor: Fraction, pfister: PfisterForm) -> bool:
    return is_isometric(form, scale(factor, expand(pfister)), GLOBAL)


def _slot_candidates(form: DiagonalForm) -> list[Fraction]:
    first = form.entries[0]
    ratios = {squarefree_integer(entry / first) for entry in form.entries[1:]}
    return [Fraction(ratio) for ratio in sorted(ratios, key=lambda r: (abs(r), r))]


def as_pfister(form: DiagonalForm) -> tuple[Fraction, PfisterForm] | None:
    """(lambda, P) with form isometric to lambda * P over Q, when form is similar to a Pfister form."""
    first = form.entries[0]
    if form.rank == 2:
        return first, PfisterForm((form.entries[1] / first,))
    if form.rank == 4:
        if squarefree_integer(form.determinant) != 1:
            return None
        pfister = PfisterForm((form.entries[1] / first, form.entries[2] / first))
        return (first, pfister) if _similar_to(form, first, pfister) else None
    if form.rank == 8:
        for slots in itertools.combinations_with_replacement(_slot_candidates(form), 3):
            pfister = PfisterForm(slots)
            if _similar_to(form, first, pfister):
                return first, pfister
    return None


def _pfister_for(form: DiagonalForm, ambient: PfisterForm | None) -> tuple[PfisterForm | None, str]:
    if ambient is not None:
        if certify_neighbor(form, ambient) is None:
            return None, f'{form} is not a certified neighbor of {ambient}'
        return ambient, f'neighbor of {ambient}'
    recognized = as_pfister(form)
    if recognized is None:
        return None, f'{form} is neither isotropic, similar to a Pfister form, nor given an ambient Pfister form'
    factor, pfister = recognized
    return pfister, f'{form} is similar to {factor}*{pfister}'


def norm_member(
    form: DiagonalForm,
    value: RationalLike,
    field: Field,
    *,
    ambient: PfisterForm | None = None,
    search_witness: bool = True,
) -> NormMembershipVerdict:
    x = require_nonzero(value, 'norm group candidate')
    if is_isotropic_over(form, field):
        reason = f'{form} is isotropic over {field_name(field)}: N_q = k*'
        return NormMembershipVerdict(MembershipAnswer.MEMBER, reason)
    pfister, provenance = _pfister_for(form, ambient)
    if pfister is None:
        return NormMembershipVerdict(MembershipAnswer.UNKNOWN, provenance)
    test_form = tensor(expand(pfister), DiagonalForm.of(1, -x))
    isotropic = is_isotropic_over(test_form, field)
    hyperbolic = is_hyperbolic(test_form, field)
    if isotropic != hyperbolic:
        raise InvariantViolationError(
            f'{test_form} over {field_name(field)}: isotropic={isotropic} but hyperbolic={hyperbolic}'
        )
    if not isotropic:
        reason = f'{provenance}; {test_form} is anisotropic over {field_name(field)}'
        return NormMembershipVerdict(MembershipAnswer.NON_MEMBER, reason)
    witness = None
    if search_witness and field == GLOBAL:
        witness = find_value_witness(expand(pfister), x)
    reason = f'{provenance}; {test_form} is isotropic (hence hyperbolic) over {field_name(field)}'
    return NormMembershipVerdict(MembershipAnswer.MEMBER, reason, witness)


def _shell(rank: int, height: int) -> Iterator[tuple[int, ...]]:
    # integer vectors of sup-norm exactly `height`, first nonzero coordinate positive
    for vector in itertools.product(range(-height, height + 1), repeat=rank):
        if max(abs(x) for x in vector) != height:
            continue
        leading = next(x for x in vector if x)
        if leading > 0:
            yield vector


def find_value_witness(
    form: DiagonalForm,
    value: RationalLike,
    *,
    max_rank: int = WITNESS_MAX_RANK,
    max_height: int = WITNESS_MAX_HEIGHT,
) -> ValueWitness | None:
    """Rational vector v with form(v) = value, found among rescaled small integer vectors."""
    target = require_nonzero(value, 'represented value')
    if form.rank > max_rank:
        return None
    for height in range(1, max_height + 1):
        for integer_vector in _shell(form.rank, height):
            raw = form.evaluate(integer_vector)
            if raw == 0:
                continue
            ratio = rational_sqrt(raw / target)
            if ratio is None:
                continue
            vector = tuple(Fraction(x) / ratio for x in integer_vector)
            witness = ValueWitness(form=form, vector=vector, value=target)
            if witness.verify():
                return witness
    logger.debug('no value witness found', extra={'form': str(form), 'value': str(target)})
    return None


def norm_group_closure_check(pfister: PfisterForm, samples: Sequence[RationalLike], field: Field) -> bool:
    form = expand(pfister)
    values = [as_rational(sample) for sample in samples if as_rational(sample) != 0]
    represented = [value for value in values if represents(form, value, field)]
    for left, right in itertools.combinations_with_replacement(represented, 2):
        verdict = norm_member(form, left * right, field, search_witness=False)
        if verdict.answer is not MembershipAnswer.MEMBER:
            logger.warning('norm group not closed', extra={'pfister': str(pfister), 'x': str(left), 'y': str(right)})
            return False
    return True


@dataclass(frozen=True)
class QuaternionAlgebra:
    """The quaternion algebra (a, b): i^2 = a, j^2 = b, ij = -ji."""

    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, 'a', require_nonzero(self.a, 'quaternion parameter'))  # noqa: PLC2801
        object.__setattr__(self, 'b', require_nonzero(self.b, 'quaternion parameter'))  # noqa: PLC2801

    @classmethod
    def of(cls, a: RationalLike, b: RationalLike) -> 'QuaternionAlgebra':
        return cls(as_rational(a), as_rational(b))

    def norm_form(self) -> PfisterForm:
        """Reduced norm <1, -a, -b, ab> = <<-a, -b>>."""
        return PfisterForm((-self.a, -self.b))

    def __str__(self) -> str:
        return f'({self.a},{self.b})'


def ramified_places(algebra: QuaternionAlgebra) -> list[Place]:
    ramified = [
        place for place in support_places(algebra.a, algebra.b) if hilbert_symbol(algebra.a, algebra.b, place) == -1
    ]
    if len(ramified) % 2:
        raise InvariantViolationError(f'{algebra} ramifies at an odd number of places: {ramified}')
    return sorted_places(ramified)


def reduced_norm_member(algebra: QuaternionAlgebra, value: RationalLike) -> bool:
    x = require_nonzero(value, 'reduced norm candidate')
    return x > 0 or REAL not in ramified_places(algebra)


@dataclass(frozen=True)
class CollapsedForm:
    form: DiagonalForm
    split: bool
    note: str


def adjoin_sqrt_collapse(form: DiagonalForm, d: RationalLike, field: Field) -> CollapsedForm:
    """Rewrite `form` over field(sqrt d), where the class of d becomes trivial."""
    root = require_nonzero(d, 'adjoined square')
    if isinstance(field, Place):
        already_square = is_local_square(root, field)
    else:
        already_square = squarefree_integer(root) == 1
    if already_square:
        return CollapsedForm(form, split=True, note=f'{root} is a square in {field_name(field)}: L_w = Q_v')
    entries = []
    for entry in form.entries:
        reduced = entry / root
        entries.append(reduced if abs(squarefree_integer(reduced)) < abs(squarefree_integer(entry)) else entry)
    collapsed = DiagonalForm(tuple(entries))
    note = f'square class of {root} collapsed over {field_name(field)}(sqrt {root})'
    return CollapsedForm(collapsed, split=False, note=note)

