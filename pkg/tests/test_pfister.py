import random
from fractions import Fraction

import pytest

from qflab.errors import UnsupportedOperationError, ZeroInputError
from qflab.forms import (
    DiagonalForm,
    form_support,
    is_hyperbolic,
    is_isometric,
    is_isotropic,
    is_isotropic_over,
    represents,
    scale,
    tensor,
)
from qflab.pfister import (
    MembershipAnswer,
    PfisterForm,
    QuaternionAlgebra,
    adjoin_sqrt_collapse,
    as_pfister,
    certify_neighbor,
    expand,
    find_value_witness,
    is_pfister_neighbor,
    norm_group_closure_check,
    norm_member,
    ramified_places,
    reduced_norm_member,
)
from qflab.places import GLOBAL, REAL, Place

SLOT_VALUES = (1, -1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10)
PROFILE_PFISTER = PfisterForm.of(-2, 3)


def random_pfister(rng: random.Random, folds: tuple[int, ...] = (1, 2, 3)) -> PfisterForm:
    return PfisterForm.of(*(rng.choice(SLOT_VALUES) for _ in range(rng.choice(folds))))


@pytest.mark.parametrize(
    ('pfister', 'expected'),
    [
        (PfisterForm.of(-2), DiagonalForm.of(1, -2)),
        (PROFILE_PFISTER, DiagonalForm.of(1, -2, 3, -6)),
        (PfisterForm.of(1, 3), DiagonalForm.of(1, 1, 3, 3)),
    ],
)
def test_expand(pfister: PfisterForm, expected: DiagonalForm) -> None:
    assert expand(pfister) == expected


def test_pfister_form_basics() -> None:
    pfister = PfisterForm.of(-1, Fraction(1, 2), 3)
    assert pfister.fold == 3
    assert pfister.rank == 8
    assert str(pfister) == '<<-1,1/2,3>>'
    with pytest.raises(ValueError, match='at least one slot'):
        PfisterForm(())
    with pytest.raises(ZeroInputError):
        PfisterForm.of(0)


@pytest.mark.parametrize(
    ('neighbor', 'pfister', 'expected'),
    [
        (DiagonalForm.of(1, -2, 3), PROFILE_PFISTER, True),
        (expand(PROFILE_PFISTER), PROFILE_PFISTER, True),
        (DiagonalForm.of(1, -2), PROFILE_PFISTER, False),
        (DiagonalForm.of(1, 1, 1), PROFILE_PFISTER, False),
        (DiagonalForm.of(5, -10, 15), PROFILE_PFISTER, True),
    ],
)
def test_is_pfister_neighbor(neighbor: DiagonalForm, pfister: PfisterForm, expected: bool) -> None:  # noqa: FBT001
    assert is_pfister_neighbor(neighbor, pfister) is expected


def test_neighbor_certificate_carries_complement() -> None:
    certificate = certify_neighbor(DiagonalForm.of(1, -2, 3), PROFILE_PFISTER)
    assert certificate is not None
    assert certificate.scale == 1
    assert certificate.complement == DiagonalForm.of(-6)


def test_neighbor_bounds() -> None:
    with pytest.raises(UnsupportedOperationError, match='fold'):
        certify_neighbor(DiagonalForm.of(1, 1, 1), PfisterForm.of(1, 1, 1, 1))
    with pytest.raises(UnsupportedOperationError, match='exceeds'):
        certify_neighbor(DiagonalForm.of(1, 1, 1, 1, 1), PROFILE_PFISTER)


def test_norm_member_sum_of_two_squares() -> None:
    verdict = norm_member(DiagonalForm.of(1, 1), 5, GLOBAL)
    assert verdict.answer is MembershipAnswer.MEMBER
    assert verdict.witness is not None
    assert verdict.witness.verify()
    assert verdict.to_dict()['answer'] == 'member'

    verdict = norm_member(DiagonalForm.of(1, 1), 3, GLOBAL)
    assert verdict.answer is MembershipAnswer.NON_MEMBER
    assert 'anisotropic' in verdict.reason


def test_norm_member_isotropic_form() -> None:
    verdict = norm_member(expand(PROFILE_PFISTER), 7, Place(5))
    assert verdict.answer is MembershipAnswer.MEMBER
    assert 'N_q = k*' in verdict.reason


def test_norm_member_local() -> None:
    assert norm_member(DiagonalForm.of(1, 1), 3, Place(5)).answer is MembershipAnswer.MEMBER
    assert norm_member(DiagonalForm.of(1, 1), 3, Place(3)).answer is MembershipAnswer.NON_MEMBER
    assert norm_member(DiagonalForm.of(1, 1), -1, REAL).answer is MembershipAnswer.NON_MEMBER


def test_norm_member_unrecognized_form_is_unknown() -> None:
    verdict = norm_member(DiagonalForm.of(1, 1, 1), 2, GLOBAL)
    assert verdict.answer is MembershipAnswer.UNKNOWN
    assert 'neither isotropic' in verdict.reason


def test_norm_member_through_ambient_pfister_form() -> None:
    neighbor = DiagonalForm.of(1, -2, 3)
    assert norm_member(neighbor, 2, GLOBAL).answer is MembershipAnswer.UNKNOWN
    verdict = norm_member(neighbor, 3, GLOBAL, ambient=PROFILE_PFISTER)
    assert verdict.answer is MembershipAnswer.MEMBER
    assert 'neighbor of <<-2,3>>' in verdict.reason
    verdict = norm_member(DiagonalForm.of(1, 1, 1), 3, GLOBAL, ambient=PROFILE_PFISTER)
    assert verdict.answer is MembershipAnswer.UNKNOWN


def test_norm_member_rejects_zero() -> None:
    with pytest.raises(ZeroInputError):
        norm_member(DiagonalForm.of(1, 1), 0, GLOBAL)


def test_as_pfister_recognizes_similar_forms() -> None:
    assert as_pfister(DiagonalForm.of(3, 6)) == (3, PfisterForm.of(2))
    assert as_pfister(DiagonalForm.of(2, -4, 6, -12)) == (2, PROFILE_PFISTER)
    assert as_pfister(DiagonalForm.of(1, 1, 1, 2)) is None
    recognized = as_pfister(expand(PfisterForm.of(-1, -1, -1)))
    assert recognized is not None
    assert is_isometric(expand(recognized[1]), expand(PfisterForm.of(-1, -1, -1)), GLOBAL)
    assert as_pfister(DiagonalForm.of(1, 1, 1)) is None


def test_find_value_witness() -> None:
    witness = find_value_witness(DiagonalForm.of(1, 1, 1), 6)
    assert witness is not None
    assert witness.verify()
    assert find_value_witness(DiagonalForm.of(1, 1, 1), 7) is None
    assert find_value_witness(DiagonalForm.of(1, 1, 1, 1, 1), 7) is None


@pytest.mark.parametrize(
    ('pfister', 'samples', 'field'),
    [
        (PfisterForm.of(1), [1, 2, 5], GLOBAL),
        (PfisterForm.of(-7), [1], Place(3)),
        (PROFILE_PFISTER, [1, -2, 3, -6, 5, 7, 10, -14, 15, 21], Place(7)),
    ],
)
def test_norm_group_closure_check(pfister: PfisterForm, samples: list[int], field: Place | str) -> None:
    assert norm_group_closure_check(pfister, samples, field)  # type: ignore[arg-type]


@pytest.mark.parametrize(
    ('a', 'b', 'expected'),
    [(-1, -1, [REAL, Place(2)]), (-1, -3, [REAL, Place(3)]), (1, 1, []), (2, 3, [Place(2), Place(3)])],
)
def test_ramified_places(a: int, b: int, expected: list[Place]) -> None:
    assert ramified_places(QuaternionAlgebra.of(a, b)) == expected


@pytest.mark.parametrize(
    ('a', 'b', 'x', 'expected'),
    [(-1, -1, 3, True), (-1, -1, -1, False), (1, 1, -7, True), (2, 3, -1, True)],
)
def test_reduced_norm_member(a: int, b: int, x: int, expected: bool) -> None:  # noqa: FBT001
    assert reduced_norm_member(QuaternionAlgebra.of(a, b), x) is expected


def test_quaternion_norm_form() -> None:
    algebra = QuaternionAlgebra.of(-1, -3)
    assert algebra.norm_form() == PfisterForm.of(1, 3)
    assert str(algebra) == '(-1,-3)'
    assert is_isometric(expand(algebra.norm_form()), DiagonalForm.of(1, -2, 3, -6), Place(3))


def test_adjoin_sqrt_collapse() -> None:
    collapsed = adjoin_sqrt_collapse(DiagonalForm.of(1, -2, 3, -30), 5, GLOBAL)
    assert not collapsed.split
    assert collapsed.form == DiagonalForm.of(1, -2, 3, -6)
    assert is_isometric(collapsed.form, tensor(DiagonalForm.of(1, -2), DiagonalForm.of(1, 3)), GLOBAL)

    unchanged = adjoin_sqrt_collapse(DiagonalForm.of(1, -2, 3, -24), 4, GLOBAL)
    assert unchanged.split
    assert unchanged.form == DiagonalForm.of(1, -2, 3, -24)

    local = adjoin_sqrt_collapse(DiagonalForm.of(1, -2, 3, -30), 5, Place(11))
    assert local.split
    assert 'Q_11' in local.note


def test_pfister_lemma_equivalence() -> None:
    rng = random.Random(4242)
    for _ in range(500):
        pfister = random_pfister(rng)
        x = rng.choice([-1, 1]) * rng.randint(1, 30)
        test_form = tensor(expand(pfister), DiagonalForm.of(1, -x))
        for field in (*form_support(test_form), GLOBAL):
            isotropic = is_isotropic_over(test_form, field)
            assert isotropic is is_hyperbolic(test_form, field), (pfister, x, field)
            assert isotropic is represents(expand(pfister), x, field), (pfister, x, field)


def test_value_set_is_multiplicative() -> None:
    rng = random.Random(777)
    checked = 0
    while checked < 200:
        pfister = random_pfister(rng, folds=(1, 2))
        place = rng.choice([REAL, Place(2), Place(3), Place(5), Place(7)])
        form = expand(pfister)
        x, y = (rng.choice([-1, 1]) * rng.randint(1, 50) for _ in range(2))
        if not (represents(form, x, place) and represents(form, y, place)):
            continue
        checked += 1
        assert represents(form, x * y, place), (pfister, x, y, place)


def test_reduced_norms_match_norm_groups() -> None:
    rng = random.Random(99)
    for _ in range(100):
        a, b = rng.choice(SLOT_VALUES), rng.choice(SLOT_VALUES)
        x = rng.choice([-1, 1]) * rng.randint(1, 40)
        algebra = QuaternionAlgebra.of(a, b)
        verdict = norm_member(expand(algebra.norm_form()), x, GLOBAL, search_witness=False)
        assert reduced_norm_member(algebra, x) is (verdict.answer is MembershipAnswer.MEMBER), (a, b, x)


def test_neighbors_share_isotropy() -> None:
    rng = random.Random(31337)
    for _ in range(50):
        pfister = random_pfister(rng, folds=(2, 3))
        factor = rng.choice(SLOT_VALUES)
        size = pfister.rank // 2 + 1
        neighbor = scale(factor, DiagonalForm(expand(pfister).entries[:size]))
        assert certify_neighbor(neighbor, pfister) is not None, (neighbor, pfister)
        for place in form_support(neighbor, expand(pfister)):
            assert is_isotropic(neighbor, place) is is_isotropic(expand(pfister), place), (neighbor, pfister, place)
