"""
Local-global checks for zero-cycle classes on constant quadric fibrations X = Q x C.

A class is represented through delta by a function g on C. Every place gets a verdict
backed by a certificate, and the proof of the constant-fiber theorem is replayed step by
step with each step tagged as machine-verified, cited or assumed.
"""

import enum
import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar, Final, TypeAlias

from qflab.arith import squarefree_integer
from qflab.curves import (
    BaseCurve,
    ClosedPoint,
    DeltaVerdict,
    HyperellipticCurve,
    delta_image_report,
    delta_image_test,
)
from qflab.errors import InvariantViolationError, UnsupportedOperationError
from qflab.forms import (
    DiagonalForm,
    anisotropic_places,
    form_support,
    is_isometric,
    is_isotropic,
    is_isotropic_global,
    is_isotropic_over,
    scale,
)
from qflab.functions import FunctionElement, coefficients, degree
from qflab.log_context import bind_log_context
from qflab.logging_manager import get_logger
from qflab.pfister import adjoin_sqrt_collapse
from qflab.places import GLOBAL, REAL, Field, Place, field_name, sorted_places

logger = get_logger(__name__)

INJECTIVITY_CITATION: Final = 'Arason-Elman-Jacob, Theorem 4: I^3 L(C) -> prod_w I^3 L_w(C) is injective'
INTERSECTION_CITATION: Final = 'Colliot-Thelene-Skorobogatov, Proposition 2.3: N_q(L(C)) & k(C)* = N_q(k(C))'
NONMEMBERSHIP_CITATION: Final = 'Parimala-Suresh, Proposition 6.1: x not in Q_3* N_q(Q_3(C))'

# coefficients tried for each linear polynomial a*x + b in the bounded witness search
WITNESS_COEFFICIENTS: Final = (0, 1, -1)


class LocalVerdict(enum.Enum):
    TRIVIAL = 'Trivial'
    NONTRIVIAL = 'Nontrivial'
    UNKNOWN = 'Unknown'


class GlobalVerdict(enum.Enum):
    CLASS_ZERO = 'ClassZero'
    CLASS_NONZERO = 'ClassNonzero'
    UNKNOWN = 'Unknown'
    REAL_MAP_NOT_INJECTIVE = 'RealMapNotInjective'


class StepStatus(enum.Enum):
    VERIFIED = 'verified'
    CITED = 'cited'
    ASSUMED = 'assumed'
    DERIVED = 'derived'
    FAILED = 'failed'
    SKIPPED = 'skipped'


@dataclass(frozen=True)
class FibrationInstance:
    """Constant fibration with generic fiber the quadric of `form`, over `curve`."""

    form: DiagonalForm
    curve: BaseCurve

    def __post_init__(self) -> None:
        if self.form.rank not in {3, 4}:
            raise UnsupportedOperationError(f'fiber forms of rank 3 or 4 are supported, got rank {self.form.rank}')

    def to_dict(self) -> dict[str, object]:
        return {'form': self.form.to_text(), 'curve': self.curve.to_text()}


@dataclass(frozen=True)
class ChowClassCandidate:
    element: FunctionElement
    provenance: DeltaVerdict

    @classmethod
    def from_function(cls, instance: FibrationInstance, element: FunctionElement) -> 'ChowClassCandidate':
        verdict = delta_image_test(instance.form, element, instance.curve)
        if verdict is DeltaVerdict.UNKNOWN:
            # g in k* N_q has the trivial class, which is delta(0)
            witness = find_representation_witness(instance.form, element)
            if witness is not None and witness.verify(instance.form, element, instance.curve):
                verdict = DeltaVerdict.IN_IMAGE
        return cls(element, verdict)


@dataclass(frozen=True)
class RepresentationWitness:
    """sum(a_i * vector_i^2) = scalar * g; this puts g in k* N_q."""

    vector: tuple[FunctionElement, ...]
    scalar: Fraction = Fraction(1)

    kind: ClassVar[str] = 'RepresentationWitness'

    def evaluate(self, form: DiagonalForm, curve: BaseCurve) -> FunctionElement:
        total = FunctionElement.constant(0)
        for entry, component in zip(form.entries, self.vector, strict=True):
            total += curve.multiply(component, component).scaled(entry)
        return total

    def verify(self, form: DiagonalForm, element: FunctionElement, curve: BaseCurve) -> bool:
        if len(self.vector) != form.rank or self.scalar == 0:
            return False
        return self.evaluate(form, curve) == element.scaled(self.scalar)

    def describe(self) -> str:
        components = ', '.join(str(component) for component in self.vector)
        return f'q({components}) = {self.scalar} * g'


@dataclass(frozen=True)
class ResidueObstruction:
    """For each sign of the constant mu, a point where q x <1, -mu*g> has an anisotropic second residue."""

    cases: tuple[tuple[int, ClosedPoint], ...]

    kind: ClassVar[str] = 'ResidueObstruction'

    @classmethod
    def of(cls, positive: ClosedPoint, negative: ClosedPoint) -> 'ResidueObstruction':
        return cls(((1, positive), (-1, negative)))

    def describe(self) -> str:
        return ', '.join(f'mu {"+" if sign > 0 else "-"}: {point}' for sign, point in self.cases)


@dataclass(frozen=True)
class ExternalFact:
    citation: str
    premises: tuple[str, ...] = ()
    premises_verified: bool = False

    kind: ClassVar[str] = 'ExternalFact'

    def describe(self) -> str:
        return self.citation


Certificate: TypeAlias = RepresentationWitness | ResidueObstruction | ExternalFact


@dataclass(frozen=True)
class PlaceVerdict:
    place: Place
    verdict: LocalVerdict
    certificate: Certificate | None = None
    machine_verified: bool = False
    note: str = ''

    def to_dict(self) -> dict[str, object]:
        return {
            'place': str(self.place),
            'verdict': self.verdict.value,
            'certificate-kind': self.certificate.kind if self.certificate is not None else None,
            'machine_verified': self.machine_verified,
        }


@dataclass(frozen=True)
class ProofStep:
    label: str
    statement: str
    status: StepStatus
    detail: str = ''

    def to_dict(self) -> dict[str, object]:
        return {'label': self.label, 'statement': self.statement, 'status': self.status.value, 'detail': self.detail}


@dataclass(frozen=True)
class ObstructionReport:
    instance: FibrationInstance
    candidate: ChowClassCandidate
    places: tuple[PlaceVerdict, ...]
    verdict: GlobalVerdict
    theorem_citations: tuple[str, ...] = ()
    assumed_facts: tuple[str, ...] = ()
    steps: tuple[ProofStep, ...] = ()
    support: tuple[Place, ...] = ()
    witness: RepresentationWitness | None = None
    # the map to the product of the local groups is injective; set only after the hypotheses are checked
    hasse_principle: bool = False

    def place_verdict(self, place: Place) -> PlaceVerdict | None:
        return next((entry for entry in self.places if entry.place == place), None)

    def to_dict(self) -> dict[str, object]:
        return {
            'instance': self.instance.to_dict(),
            'candidate': str(self.candidate.element),
            'places': [entry.to_dict() for entry in self.places],
            'global': {
                'verdict': self.verdict.value,
                'hasse_principle': self.hasse_principle,
                'theorem_citations': list(self.theorem_citations),
            },
            'assumed_facts': list(self.assumed_facts),
            'steps': [step.to_dict() for step in self.steps],
            'support': [str(place) for place in self.support],
        }

    def to_text(self) -> str:
        lines = [
            f'instance: q = {self.instance.form}, C: {self.instance.curve.to_text()}',
            f'candidate: g = {self.candidate.element} ({self.candidate.provenance.value})',
        ]
        for step in self.steps:
            detail = f' [{step.detail}]' if step.detail else ''
            lines.append(f'  ({step.label}) {step.status.value}: {step.statement}{detail}')
        for entry in self.places:
            kind = f' via {entry.certificate.kind}' if entry.certificate is not None else ''
            lines.append(f'  place {entry.place}: {entry.verdict.value}{kind}')
        if self.support:
            lines.append(f'support: {" ".join(str(place) for place in self.support)}')
        lines.extend(f'assumed: {fact}' for fact in self.assumed_facts)
        lines.extend(f'cited: {citation}' for citation in self.theorem_citations)
        if self.hasse_principle:
            lines.append('hasse principle: holds for this fibration')
        lines.append(f'verdict: {self.verdict.value}')
        return '\n'.join(lines)


def _log_step(step: ProofStep) -> ProofStep:
    logger.info('proof step', extra={'step': step.label, 'status': step.status.value, 'statement': step.statement})
    return step


def second_residue(entries: Sequence[FunctionElement], point: ClosedPoint, curve: BaseCurve) -> DiagonalForm | None:
    """
    Residue form at `point`: leading coefficients of the entries with odd valuation.

    None stands for the empty form. Points of residue degree > 1 raise UnsupportedOperationError.
    """
    residues = []
    for entry in entries:
        expansion = curve.local_expansion(entry, point)
        if expansion.valuation % 2:
            residues.append(expansion.leading)
    return DiagonalForm(tuple(residues)) if residues else None


def _twisted_entries(form: DiagonalForm, element: FunctionElement, sign: int) -> list[FunctionElement]:
    """Entries of q x <1, -sign*g>."""
    return [FunctionElement.constant(entry) for entry in form.entries] + [
        element.scaled(-sign * entry) for entry in form.entries
    ]


def verify_nonmembership_certificate(
    form: DiagonalForm,
    element: FunctionElement,
    certificate: ResidueObstruction,
    field: Field,
    curve: BaseCurve,
) -> bool:
    signs = sorted({sign for sign, _ in certificate.cases})
    if signs != [-1, 1]:
        logger.warning('certificate rejected', extra={'reason': 'both signs of mu must be covered', 'signs': signs})
        return False
    for sign, point in certificate.cases:
        try:
            residue = second_residue(_twisted_entries(form, element, sign), point, curve)
        except UnsupportedOperationError as exc:
            logger.warning('certificate rejected', extra={'reason': str(exc), 'point': str(point)})
            return False
        if residue is None:
            logger.warning('certificate rejected', extra={'reason': 'empty residue', 'point': str(point), 'sign': sign})
            return False
        if is_isotropic_over(residue, field):
            logger.warning(
                'certificate rejected',
                extra={
                    'reason': 'isotropic residue',
                    'point': str(point),
                    'residue': str(residue),
                    'field': field_name(field),
                },
            )
            return False
    logger.debug('nonmembership certificate verified', extra={'function': str(element), 'field': field_name(field)})
    return True


def local_triviality(
    instance: FibrationInstance,
    candidate: ChowClassCandidate,
    place: Place,
    certificate: Certificate | None = None,
) -> PlaceVerdict:
    if candidate.provenance is not DeltaVerdict.IN_IMAGE:
        raise UnsupportedOperationError(f'candidate {candidate.element} is {candidate.provenance.value}, not InImage')
    form, element, curve = instance.form, candidate.element, instance.curve
    with bind_log_context(place=str(place)):
        if is_isotropic(form, place):
            return PlaceVerdict(place, LocalVerdict.TRIVIAL, None, machine_verified=True, note='q isotropic')
        if isinstance(certificate, RepresentationWitness):
            if certificate.verify(form, element, curve):
                return PlaceVerdict(place, LocalVerdict.TRIVIAL, certificate, machine_verified=True)
            logger.warning('certificate rejected', extra={'reason': 'witness does not evaluate to g'})
        elif isinstance(certificate, ResidueObstruction):
            if verify_nonmembership_certificate(form, element, certificate, place, curve):
                return PlaceVerdict(place, LocalVerdict.NONTRIVIAL, certificate, machine_verified=True)
        elif isinstance(certificate, ExternalFact):
            if certificate.premises_verified:
                return PlaceVerdict(place, LocalVerdict.NONTRIVIAL, certificate, note='assumed external fact')
            logger.warning(
                'certificate rejected',
                extra={'reason': 'premises not verified', 'citation': certificate.citation},
            )
        return PlaceVerdict(place, LocalVerdict.UNKNOWN)


def _polynomial_target(element: FunctionElement) -> tuple[Fraction, ...] | None:
    upper, lower, denominator = element.integral_parts()
    if not lower.is_zero or degree(denominator) != 0 or degree(upper) > 2:
        return None
    return (Fraction(0),) * (2 - degree(upper)) + coefficients(upper)


def _proportional(values: tuple[Fraction, ...], target: tuple[Fraction, ...]) -> Fraction | None:
    position = next(index for index, coeff in enumerate(target) if coeff)
    ratio = values[position] / target[position]
    if ratio == 0:
        return None
    if any(value != ratio * coeff for value, coeff in zip(values, target, strict=True)):
        return None
    return ratio


def find_representation_witness(
    form: DiagonalForm,
    element: FunctionElement,
    *,
    sign: int | None = None,
) -> RepresentationWitness | None:
    """
    Vectors of linear polynomials a*x + b with a, b in {0, 1, -1} such that q(v) is a constant times g.

    With `sign`, only constants of that sign count, i.e. q(v) = mu * c * g with c > 0.
    """
    target = _polynomial_target(element)
    if target is None:
        return None
    linear_forms = list(itertools.product(WITNESS_COEFFICIENTS, repeat=2))
    for vector in itertools.product(linear_forms, repeat=form.rank):
        # q(v) = sum a_i (s_i x + t_i)^2, as coefficients of x^2, x, 1
        values = (
            sum((entry * s * s for entry, (s, _) in zip(form.entries, vector, strict=True)), Fraction(0)),
            sum((entry * 2 * s * t for entry, (s, t) in zip(form.entries, vector, strict=True)), Fraction(0)),
            sum((entry * t * t for entry, (_, t) in zip(form.entries, vector, strict=True)), Fraction(0)),
        )
        ratio = _proportional(values, target)
        if ratio is not None and (sign is None or ratio * sign > 0):
            components = tuple(
                FunctionElement.x().scaled(s) + FunctionElement.constant(t) for s, t in vector
            )
            return RepresentationWitness(components, ratio)
    return None


class _PipelineState:
    def __init__(self) -> None:
        self.steps: list[ProofStep] = []
        self.citations: list[str] = []
        self.assumed: list[str] = []

    def add(self, label: str, statement: str, status: StepStatus, detail: str = '') -> None:
        self.steps.append(_log_step(ProofStep(label, statement, status, detail)))


def _normalized_slots(form: DiagonalForm) -> tuple[DiagonalForm, int]:
    """q / a_1 = <1, a, b, (abd)> and the square-free d; rank 3 forms are read as neighbors of <<a, b>>."""
    normalized = scale(1 / form.entries[0], form)
    if normalized.rank == 3:
        return normalized, 1
    _, a, b, last = normalized.entries
    return normalized, squarefree_integer(last / (a * b))


def _select_sign(
    form: DiagonalForm,
    real_sign: int | None,
    witness: RepresentationWitness | None,
) -> tuple[int, StepStatus, str]:
    """The constant mu in {+1, -1}; mu*g has to match the real-place membership data."""
    if real_sign is not None:
        return real_sign, StepStatus.VERIFIED, 'supplied real-place data'
    if witness is not None:
        return (1 if witness.scalar > 0 else -1), StepStatus.DERIVED, 'sign of the witness constant'
    if is_isotropic(form, REAL):
        return 1, StepStatus.DERIVED, 'q isotropic over R, either sign matches'
    return 1, StepStatus.DERIVED, 'no real-place data'


def constant_fiber_pipeline(
    instance: FibrationInstance,
    candidate: ChowClassCandidate,
    *,
    real_sign: int | None = None,
    certificates: Mapping[Place, Certificate] | None = None,
    witness_search: bool = True,
) -> ObstructionReport:
    """Replay the injectivity proof for constant fibrations on one candidate class."""
    supplied = dict(certificates or {})
    if candidate.provenance is not DeltaVerdict.IN_IMAGE:
        raise UnsupportedOperationError(f'candidate {candidate.element} is {candidate.provenance.value}, not InImage')
    if real_sign not in {None, 1, -1}:
        raise ValueError(f'real_sign must be +1 or -1, got {real_sign}')
    form = instance.form
    state = _PipelineState()
    state.add('hypotheses', f'rank q = {form.rank}, q defined over Q, g in Im delta', StepStatus.VERIFIED)

    normalized, d = _normalized_slots(form)
    state.add('normalize', f'q ~ {normalized}, d = {d}', StepStatus.VERIFIED)
    embeddings = 1 if d == 1 else (2 if d > 0 else 0)
    extension = 'Q' if d == 1 else f'Q(sqrt({d}))'
    collapsed = adjoin_sqrt_collapse(normalized, d, GLOBAL)
    state.add(
        'extension',
        f'L = {extension} with {embeddings} real embeddings, q over L is {collapsed.form}',
        StepStatus.VERIFIED,
        collapsed.note,
    )
    witness = find_representation_witness(form, candidate.element, sign=real_sign) if witness_search else None
    if witness is not None and not witness.verify(form, candidate.element, instance.curve):
        raise InvariantViolationError(f'search returned a witness that does not evaluate to g: {witness.describe()}')
    mu, sign_status, sign_detail = _select_sign(form, real_sign, witness)
    state.add('sign', f'mu = {mu:+d}', sign_status, sign_detail)

    verdicts = []
    for place in form_support(form):
        verdict = local_triviality(instance, candidate, place, supplied.get(place))
        if verdict.verdict is LocalVerdict.UNKNOWN and witness is not None:
            verdict = local_triviality(instance, candidate, place, witness)
        verdicts.append(verdict)
    nontrivial = [entry for entry in verdicts if entry.verdict is LocalVerdict.NONTRIVIAL]
    unknown = [entry for entry in verdicts if entry.verdict is LocalVerdict.UNKNOWN]
    if witness is not None and nontrivial:
        raise InvariantViolationError(f'{witness.describe()} contradicts a nontrivial verdict at {nontrivial[0].place}')
    places_status = StepStatus.FAILED if unknown else StepStatus.VERIFIED
    state.add('places', 'local verdict at every place of the support of q', places_status)
    state.assumed.extend(
        entry.certificate.describe() for entry in verdicts if isinstance(entry.certificate, ExternalFact)
    )

    # rank, base field and g in Im delta were checked on entry
    state.citations.extend((INJECTIVITY_CITATION, INTERSECTION_CITATION))
    state.add(
        'injectivity',
        f'q x <1, {-mu:+d}*g> hyperbolic over every L_w(C) implies hyperbolic over {extension}(C), '
        'so CH_0(X/C) injects into the product of the local groups',
        StepStatus.CITED,
        'hypotheses checked',
    )
    state.add('intersection', 'N_q(L(C)) & k(C)* = N_q(k(C))', StepStatus.CITED)

    if is_isotropic_global(form):
        verdict = GlobalVerdict.CLASS_ZERO
        state.add('conclusion', 'q isotropic over Q, so N_q(k(C)) = k(C)* and delta is zero', StepStatus.VERIFIED)
    elif nontrivial:
        verdict = GlobalVerdict.CLASS_NONZERO
        state.add('conclusion', f'class detected at place {nontrivial[0].place}', StepStatus.DERIVED)
    elif witness is not None:
        verdict = GlobalVerdict.CLASS_ZERO
        state.add('witness', witness.describe(), StepStatus.VERIFIED)
        state.add('conclusion', 'g in k* N_q(k(C)), so the class is zero', StepStatus.VERIFIED)
    elif not unknown:
        verdict = GlobalVerdict.CLASS_ZERO
        skipped = 'search disabled' if not witness_search else 'no witness in the search box'
        state.add('witness', 'bounded representation search', StepStatus.SKIPPED, skipped)
        state.add(
            'conclusion',
            f'every local class is zero, so {mu:+d}*g in N_q(k(C)) and the class is zero',
            StepStatus.DERIVED,
        )
    else:
        verdict = GlobalVerdict.UNKNOWN
        undecided = ' '.join(str(entry.place) for entry in unknown)
        state.add('conclusion', 'local verdicts missing', StepStatus.FAILED, f'unknown at {undecided}')

    return ObstructionReport(
        instance=instance,
        candidate=candidate,
        places=tuple(verdicts),
        verdict=verdict,
        theorem_citations=tuple(state.citations),
        assumed_facts=tuple(state.assumed),
        steps=tuple(state.steps),
        support=tuple(anisotropic_places(form)),
        witness=witness,
        hasse_principle=True,
    )


def counterexample_instance() -> tuple[FibrationInstance, FunctionElement]:
    """q = <1,-2,3,-6> over the elliptic curve y^2 = -x(x+2)(x+3), with the class of x."""
    curve = HyperellipticCurve.from_coeffs(-1, -5, -6, 0)
    return FibrationInstance(DiagonalForm.of(1, -2, 3, -6), curve), FunctionElement.x()


def real_place_counterexample_report() -> ObstructionReport:
    """A nonzero class of CH_0(X/C) that dies over the reals, with provenance for every step."""
    instance, element = counterexample_instance()
    form, curve = instance.form, instance.curve
    state = _PipelineState()

    real_isotropic = is_isotropic(form, REAL)
    state.add(
        'a',
        f'q isotropic over R (signature {form.signature}), so N_q(R(C)) = R(C)* and the real local group is 0',
        StepStatus.VERIFIED if real_isotropic else StepStatus.FAILED,
    )

    delta = delta_image_report(form, element, curve)
    indices = ', '.join(str(entry.index.value) for entry in delta.indices)
    even = all(entry.multiplicity % 2 == 0 for entry in delta.indices)
    in_image = delta.verdict is DeltaVerdict.IN_IMAGE
    state.add(
        'b',
        f'div(x) = {delta.divisor}, fiber indices {indices}, so x is in Im delta',
        StepStatus.VERIFIED if in_image and even else StepStatus.FAILED,
    )
    candidate = ChowClassCandidate(element, delta.verdict)

    three = Place(3)
    split_model = DiagonalForm.of(1, 1, 3, 3)
    isometric = is_isometric(form, split_model, three)
    state.add('c', f'q isometric to {split_model} over Q_3', StepStatus.VERIFIED if isometric else StepStatus.FAILED)

    fact = ExternalFact(
        NONMEMBERSHIP_CITATION,
        premises=(f'q isometric to {split_model} over Q_3', f'div(x) = {delta.divisor} is even'),
        premises_verified=isometric and even,
    )
    state.add('d', 'x not in Q_3* N_q(Q_3(C))', StepStatus.ASSUMED, fact.citation)
    state.assumed.append(fact.citation)

    verdicts = tuple(
        local_triviality(instance, candidate, place, fact if place == three else None) for place in form_support(form)
    )
    real_verdict = next(entry for entry in verdicts if entry.place == REAL)
    three_verdict = next(entry for entry in verdicts if entry.place == three)
    not_injective = real_verdict.verdict is LocalVerdict.TRIVIAL and three_verdict.verdict is LocalVerdict.NONTRIVIAL
    state.add(
        'e',
        'the class of x is nonzero in CH_0(X/C) while its real image is 0, so the real map is not injective',
        StepStatus.DERIVED if not_injective else StepStatus.FAILED,
    )

    support = anisotropic_places(form)
    state.add('support', f'nonzero local summands only at {" ".join(str(p) for p in support)}', StepStatus.VERIFIED)

    pipeline = constant_fiber_pipeline(instance, candidate, certificates={three: fact}, witness_search=False)
    state.citations.extend((INJECTIVITY_CITATION, INTERSECTION_CITATION))
    state.add(
        'injectivity',
        'the map to the product over all places is injective for constant fibrations of rank 4',
        StepStatus.CITED,
        f'hypotheses checked, pipeline verdict {pipeline.verdict.value}',
    )

    if not (real_isotropic and in_image and isometric and not_injective):
        raise InvariantViolationError('the real-place counterexample failed a machine-checked step')
    return ObstructionReport(
        instance=instance,
        candidate=candidate,
        places=verdicts,
        verdict=GlobalVerdict.REAL_MAP_NOT_INJECTIVE,
        theorem_citations=tuple(state.citations),
        assumed_facts=tuple(state.assumed),
        steps=tuple(state.steps),
        support=tuple(sorted_places(support)),
        hasse_principle=pipeline.hasse_principle,
    )
