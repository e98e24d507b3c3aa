"""
Base curves of constant quadric fibrations: hyperelliptic curves y^2 = f(x) over Q and the projective line.

Closed points are described by the monic irreducible m(x) under them (None over x = infinity)
and by how the fiber of the x-line splits:

    RAMIFIED  m divides f, one point, y is a uniformizer
    SPLIT     one of two points, `branch` holds y mod m
    INERT     rational x0 with f(x0) not a square, one point of degree 2
    FIBER     deg m > 1 and the fiber was never separated: the sum of the points above m
    LINE      points of the projective line

Points at infinity are handled in the model t = 1/x, w = y * t^(g+1), w^2 = t^(2g+2) f(1/t).
"""

import abc
import enum
from collections import Counter
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import TypeAlias

from sympy import Poly

from qflab.arith import RationalLike, as_rational, rational_sqrt
from qflab.errors import InvariantViolationError, UnsupportedOperationError, ZeroInputError
from qflab.forms import DiagonalForm, is_isotropic_global
from qflab.functions import (
    FunctionElement,
    RationalFunction,
    coefficients,
    constant_poly,
    degree,
    evaluate,
    format_polynomial,
    irreducible_factors,
    is_squarefree,
    leading_coefficient,
    linear,
    poly_from_coeffs,
    reverse,
    shift_up,
    strip,
    valuation,
)
from qflab.logging_manager import get_logger

logger = get_logger(__name__)


class PointKind(enum.Enum):
    RAMIFIED = 'ramified'
    SPLIT = 'split'
    INERT = 'inert'
    FIBER = 'fiber'
    LINE = 'line'


@dataclass(frozen=True)
class ClosedPoint:
    modulus: tuple[Fraction, ...] | None
    kind: PointKind
    branch: tuple[Fraction, ...] = ()
    residue_degree: int = 1

    @property
    def is_infinite(self) -> bool:
        return self.modulus is None

    @property
    def is_rational(self) -> bool:
        return self.residue_degree == 1

    @property
    def x_coordinate(self) -> Fraction | None:
        if self.modulus is None or len(self.modulus) != 2:
            return None
        return -self.modulus[1]

    def modulus_poly(self) -> Poly:
        if self.modulus is None:
            raise ValueError('points at infinity have no modulus in x')
        return poly_from_coeffs(self.modulus)

    def sort_key(self) -> tuple[object, ...]:
        modulus = self.modulus or ()
        return (self.is_infinite, len(modulus), modulus, self.kind.value, self.branch)

    def __str__(self) -> str:
        if self.modulus is None:
            return f'(inf,{self.branch[0]})' if self.kind is PointKind.SPLIT else '(inf)'
        x0 = self.x_coordinate
        if x0 is not None and self.kind is not PointKind.INERT:
            if self.kind is PointKind.LINE:
                return f'({x0})'
            y0 = self.branch[0] if self.kind is PointKind.SPLIT else 0
            return f'({x0},{y0})'
        modulus_text = format_polynomial(self.modulus_poly())
        if self.kind is PointKind.SPLIT:
            return f'[{modulus_text}; y = {format_polynomial(poly_from_coeffs(self.branch))}]'
        return f'[{modulus_text}]'


@dataclass(frozen=True)
class Divisor:
    """Finite formal sum of closed points, kept sorted and without zero multiplicities."""

    terms: tuple[tuple[ClosedPoint, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: Mapping[ClosedPoint, int]) -> 'Divisor':
        merged = _merge_fibers(counts)
        terms = sorted(((point, mult) for point, mult in merged.items() if mult), key=lambda term: term[0].sort_key())
        return cls(tuple(terms))

    def as_dict(self) -> dict[ClosedPoint, int]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return sum(point.residue_degree * mult for point, mult in self.terms)

    @property
    def support(self) -> tuple[ClosedPoint, ...]:
        return tuple(point for point, _ in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def multiplicity(self, point: ClosedPoint) -> int:
        return self.as_dict().get(point, 0)

    def __iter__(self) -> Iterator[tuple[ClosedPoint, int]]:
        return iter(self.terms)

    def __add__(self, other: 'Divisor') -> 'Divisor':
        counts: Counter[ClosedPoint] = Counter(self.as_dict())
        for point, mult in other.terms:
            counts[point] += mult
        return Divisor.from_counts(counts)

    def __neg__(self) -> 'Divisor':
        return Divisor.from_counts({point: -mult for point, mult in self.terms})

    def __sub__(self, other: 'Divisor') -> 'Divisor':
        return self + (-other)

    def __str__(self) -> str:
        if not self.terms:
            return '0'
        pieces: list[str] = []
        for point, mult in self.terms:
            body = str(point) if abs(mult) == 1 else f'{abs(mult)}*{point}'
            if not pieces:
                pieces.append(f'-{body}' if mult < 0 else body)
            else:
                pieces.append(f'- {body}' if mult < 0 else f'+ {body}')
        return ' '.join(pieces)

    def to_dict(self) -> dict[str, object]:
        return {
            'divisor': str(self),
            'degree': self.degree,
            'points': [
                {'point': str(point), 'multiplicity': mult, 'residue_degree': point.residue_degree}
                for point, mult in self.terms
            ],
        }


def _negated(branch: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    return tuple(-c for c in branch)


def _merge_fibers(counts: Mapping[ClosedPoint, int]) -> dict[ClosedPoint, int]:
    """Rewrite FIBER(m) next to SPLIT points over m as FIBER*k + the excess on one branch."""
    merged: dict[ClosedPoint, int] = {}
    groups: dict[tuple[Fraction, ...], list[tuple[ClosedPoint, int]]] = {}
    for point, mult in counts.items():
        if point.modulus is not None and len(point.modulus) > 2 and point.kind in {PointKind.FIBER, PointKind.SPLIT}:
            groups.setdefault(point.modulus, []).append((point, mult))
        else:
            merged[point] = merged.get(point, 0) + mult
    for modulus, members in groups.items():
        fiber = sum(mult for point, mult in members if point.kind is PointKind.FIBER)
        splits: dict[tuple[Fraction, ...], int] = {}
        for point, mult in members:
            if point.kind is PointKind.SPLIT:
                splits[point.branch] = splits.get(point.branch, 0) + mult
        degree_m = len(modulus) - 1
        fiber_point = ClosedPoint(modulus, PointKind.FIBER, (), 2 * degree_m)
        if not splits:
            merged[fiber_point] = fiber
            continue
        branch = min(splits)
        opposite = _negated(branch)
        if set(splits) - {branch, opposite}:
            raise InvariantViolationError(f'more than two branches above {modulus}')
        alpha, beta = fiber + splits.get(branch, 0), fiber + splits.get(opposite, 0)
        common = min(alpha, beta)
        merged[fiber_point] = common
        merged[ClosedPoint(modulus, PointKind.SPLIT, branch, degree_m)] = alpha - common
        merged[ClosedPoint(modulus, PointKind.SPLIT, opposite, degree_m)] = beta - common
    return merged


@dataclass(frozen=True)
class LocalExpansion:
    """g = leading * pi^valuation + higher order terms, for the chosen uniformizer pi at a rational point."""

    valuation: int
    leading: Fraction


_PointShape: TypeAlias = tuple[PointKind, tuple[Fraction, ...], int]


def _optional_valuation(poly: Poly, modulus: Poly) -> int | None:
    return None if poly.is_zero else valuation(poly, modulus)


def _branch_of(residue: Poly, modulus: Poly) -> tuple[Fraction, ...]:
    coeffs = coefficients(residue.rem(modulus))
    width = degree(modulus)
    return (Fraction(0),) * (width - len(coeffs)) + coeffs


def _fiber_valuations(upper: Poly, lower: Poly, equation: Poly, modulus: Poly) -> dict[_PointShape, int]:
    """
    Valuations of upper + lower*w at the points of w^2 = equation above the irreducible `modulus`.

    Only points with nonzero valuation are returned.
    """
    width = degree(modulus)
    upper_val, lower_val = _optional_valuation(upper, modulus), _optional_valuation(lower, modulus)
    if equation.rem(modulus).is_zero:
        options = []
        if upper_val is not None:
            options.append(2 * upper_val)
        if lower_val is not None:
            options.append(2 * lower_val + 1)
        return {(PointKind.RAMIFIED, (), width): min(options)}
    common = min(val for val in (upper_val, lower_val) if val is not None)
    upper_unit = strip(upper, modulus, common) if upper_val is not None else upper
    lower_unit = strip(lower, modulus, common) if lower_val is not None else lower
    residual = upper_unit**2 - lower_unit**2 * equation
    if residual.rem(modulus).is_zero:
        # upper_unit + lower_unit*w vanishes on exactly one branch: w = -upper_unit/lower_unit mod m
        extra = valuation(residual, modulus)
        root = (-upper_unit * lower_unit.invert(modulus)).rem(modulus)
        shapes = {
            (PointKind.SPLIT, _branch_of(root, modulus), width): common + extra,
            (PointKind.SPLIT, _branch_of(-root, modulus), width): common,
        }
        return {shape: mult for shape, mult in shapes.items() if mult}
    if common == 0:
        return {}
    if width == 1:
        x0 = -coefficients(modulus)[1]
        root_value = rational_sqrt(evaluate(equation, x0))
        if root_value is None:
            return {(PointKind.INERT, (), 2): common}
        return {(PointKind.SPLIT, (root_value,), 1): common, (PointKind.SPLIT, (-root_value,), 1): common}
    return {(PointKind.FIBER, (), 2 * width): common}


def _expansion_on_model(
    upper: Poly,
    lower: Poly,
    equation: Poly,
    x0: Fraction,
    point: ClosedPoint,
) -> tuple[int, Fraction]:
    """Valuation and leading coefficient of upper + lower*w at the rational point of w^2 = equation over x0."""
    modulus = linear(x0)
    if point.kind is PointKind.RAMIFIED:
        # x - x0 = w^2 / cofactor, with cofactor(x0) != 0
        cofactor = evaluate(equation.exquo(modulus), x0)
        options: list[tuple[int, Fraction]] = []
        if not upper.is_zero:
            power = valuation(upper, modulus)
            options.append((2 * power, evaluate(strip(upper, modulus, power), x0) * cofactor ** (-power)))
        if not lower.is_zero:
            power = valuation(lower, modulus)
            options.append((2 * power + 1, evaluate(strip(lower, modulus, power), x0) * cofactor ** (-power)))
        return min(options, key=lambda option: option[0])
    if point.kind is not PointKind.SPLIT:
        raise UnsupportedOperationError(f'no rational expansion at {point}')
    y0 = point.branch[0]
    valuations = (_optional_valuation(upper, modulus), _optional_valuation(lower, modulus))
    vals = [val for val in valuations if val is not None]
    common = min(vals)
    upper_unit = strip(upper, modulus, common) if not upper.is_zero else upper
    lower_unit = strip(lower, modulus, common) if not lower.is_zero else lower
    at_point = evaluate(upper_unit, x0) + evaluate(lower_unit, x0) * y0
    if at_point != 0:
        return common, at_point
    residual = upper_unit**2 - lower_unit**2 * equation
    extra = valuation(residual, modulus)
    conjugate_value = evaluate(upper_unit, x0) - evaluate(lower_unit, x0) * y0
    return common + extra, evaluate(strip(residual, modulus, extra), x0) / conjugate_value


class BaseCurve(abc.ABC):
    """Surface shared by the hyperelliptic curves and the projective line."""

    @abc.abstractmethod
    def principal_divisor(self, element: FunctionElement) -> Divisor: ...

    @abc.abstractmethod
    def local_expansion(self, element: FunctionElement, point: ClosedPoint) -> LocalExpansion: ...

    @abc.abstractmethod
    def multiply(self, left: FunctionElement, right: FunctionElement) -> FunctionElement: ...

    @abc.abstractmethod
    def to_text(self) -> str: ...

    @abc.abstractmethod
    def infinity_points(self) -> tuple[ClosedPoint, ...]: ...

    def power(self, element: FunctionElement, exponent: int) -> FunctionElement:
        if exponent < 0:
            raise ValueError('negative powers go through inverse()')
        result = FunctionElement.constant(1)
        for _ in range(exponent):
            result = self.multiply(result, element)
        return result

    def _checked(self, divisor: Divisor, element: FunctionElement) -> Divisor:
        if divisor.degree != 0:
            raise InvariantViolationError(f'div({element}) = {divisor} has degree {divisor.degree} on {self.to_text()}')
        logger.debug(
            'principal divisor',
            extra={'curve': self.to_text(), 'function': str(element), 'divisor': str(divisor)},
        )
        return divisor

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True, eq=True)
class HyperellipticCurve(BaseCurve):
    """y^2 = f(x) with f square-free of degree >= 3."""

    f: Poly

    def __post_init__(self) -> None:
        equation = poly_from_coeffs(coefficients(self.f))
        if equation.is_zero or degree(equation) < 3:
            raise ValueError(f'y^2 = {format_polynomial(equation)}: f must have degree >= 3')
        if not is_squarefree(equation):
            raise ValueError(f'y^2 = {format_polynomial(equation)}: f must be square-free')
        object.__setattr__(self, 'f', equation)  # noqa: PLC2801

    @classmethod
    def from_coeffs(cls, *coeffs: RationalLike) -> 'HyperellipticCurve':
        return cls(poly_from_coeffs(coeffs))

    @property
    def genus(self) -> int:
        return (degree(self.f) - 1) // 2

    def to_text(self) -> str:
        return f'y^2 = {format_polynomial(self.f)}'

    def infinity_model(self) -> Poly:
        """F(t) = t^(2g+2) f(1/t)."""
        return shift_up(reverse(self.f), 2 * self.genus + 2 - degree(self.f))

    def infinity_points(self) -> tuple[ClosedPoint, ...]:
        lead = leading_coefficient(self.f)
        if degree(self.f) % 2:
            return (ClosedPoint(None, PointKind.RAMIFIED),)
        root = rational_sqrt(lead)
        if root is None:
            return (ClosedPoint(None, PointKind.INERT, (), 2),)
        return (ClosedPoint(None, PointKind.SPLIT, (root,)), ClosedPoint(None, PointKind.SPLIT, (-root,)))

    def rational_points_over(self, x0: RationalLike) -> tuple[ClosedPoint, ...]:
        point_x = as_rational(x0)
        value = evaluate(self.f, point_x)
        modulus = coefficients(linear(point_x))
        if value == 0:
            return (ClosedPoint(modulus, PointKind.RAMIFIED),)
        root = rational_sqrt(value)
        if root is None:
            return ()
        return (ClosedPoint(modulus, PointKind.SPLIT, (root,)), ClosedPoint(modulus, PointKind.SPLIT, (-root,)))

    def multiply(self, left: FunctionElement, right: FunctionElement) -> FunctionElement:
        equation = RationalFunction.polynomial(self.f)
        return FunctionElement(
            left.u * right.u + left.v * right.v * equation,
            left.u * right.v + left.v * right.u,
        )

    def conjugate(self, element: FunctionElement) -> FunctionElement:
        return FunctionElement(element.u, -element.v)

    def norm(self, element: FunctionElement) -> RationalFunction:
        return element.u * element.u - element.v * element.v * RationalFunction.polynomial(self.f)

    def inverse(self, element: FunctionElement) -> FunctionElement:
        if element.is_zero:
            raise ZeroInputError('the zero function has no inverse')
        norm = self.norm(element)
        conjugate = self.conjugate(element)
        return FunctionElement(conjugate.u / norm, conjugate.v / norm)

    def _to_infinity(self, upper: Poly, lower: Poly) -> tuple[Poly, Poly, int]:
        """(U~, V~, K) with t^K * (upper + lower*y) = U~(t) + V~(t)*w."""
        shift = self.genus + 1
        degrees = []
        if not upper.is_zero:
            degrees.append(degree(upper))
        if not lower.is_zero:
            degrees.append(degree(lower) + shift)
        top = max(degrees)
        upper_t = shift_up(reverse(upper), top - degree(upper)) if not upper.is_zero else upper
        lower_t = shift_up(reverse(lower), top - shift - degree(lower)) if not lower.is_zero else lower
        return upper_t, lower_t, top

    def _t_valuation(self) -> int:
        return 2 if degree(self.f) % 2 else 1

    def _polynomial_divisor(self, upper: Poly, lower: Poly) -> Counter[ClosedPoint]:
        counts: Counter[ClosedPoint] = Counter()
        norm = upper**2 - lower**2 * self.f
        for modulus, _ in irreducible_factors(norm):
            for (kind, branch, residue_degree), mult in _fiber_valuations(upper, lower, self.f, modulus).items():
                counts[ClosedPoint(coefficients(modulus), kind, branch, residue_degree)] += mult
        upper_t, lower_t, top = self._to_infinity(upper, lower)
        at_infinity = _fiber_valuations(upper_t, lower_t, self.infinity_model(), linear(0))
        for point in self.infinity_points():
            shape = (point.kind, point.branch, point.residue_degree)
            counts[point] += at_infinity.get(shape, 0) - top * self._t_valuation()
        return counts

    def principal_divisor(self, element: FunctionElement) -> Divisor:
        if element.is_zero:
            raise ZeroInputError('the zero function has no divisor')
        upper, lower, denominator = element.integral_parts()
        counts = self._polynomial_divisor(upper, lower)
        counts.subtract(self._polynomial_divisor(denominator, constant_poly(0)))
        return self._checked(Divisor.from_counts(counts), element)

    def _polynomial_expansion(self, upper: Poly, lower: Poly, point: ClosedPoint) -> tuple[int, Fraction]:
        if point.modulus is not None:
            x0 = point.x_coordinate
            assert x0 is not None  # noqa: S101
            return _expansion_on_model(upper, lower, self.f, x0, point)
        upper_t, lower_t, top = self._to_infinity(upper, lower)
        model = self.infinity_model()
        val, lead = _expansion_on_model(upper_t, lower_t, model, Fraction(0), point)
        if point.kind is PointKind.RAMIFIED:
            # t = w^2 / (F/t)(0)
            t_lead = 1 / evaluate(model.exquo(linear(0)), 0)
            return val - 2 * top, lead / t_lead**top
        return val - top, lead

    def local_expansion(self, element: FunctionElement, point: ClosedPoint) -> LocalExpansion:
        if element.is_zero:
            raise ZeroInputError('the zero function has no expansion')
        if not point.is_rational:
            raise UnsupportedOperationError(f'{point} has residue degree {point.residue_degree}, expansions need 1')
        upper, lower, denominator = element.integral_parts()
        top_val, top_lead = self._polynomial_expansion(upper, lower, point)
        bottom_val, bottom_lead = self._polynomial_expansion(denominator, constant_poly(0), point)
        return LocalExpansion(top_val - bottom_val, top_lead / bottom_lead)


@dataclass(frozen=True)
class ProjectiveLine(BaseCurve):
    """P^1 over Q with function field Q(x)."""

    def to_text(self) -> str:
        return 'P1'

    def infinity_points(self) -> tuple[ClosedPoint, ...]:
        return (ClosedPoint(None, PointKind.LINE),)

    def _require_rational_function(self, element: FunctionElement) -> RationalFunction:
        if element.has_y:
            raise UnsupportedOperationError(f'{element} involves y, which does not exist on P1')
        return element.u

    def multiply(self, left: FunctionElement, right: FunctionElement) -> FunctionElement:
        return FunctionElement.of(self._require_rational_function(left) * self._require_rational_function(right))

    def principal_divisor(self, element: FunctionElement) -> Divisor:
        function = self._require_rational_function(element)
        if function.is_zero:
            raise ZeroInputError('the zero function has no divisor')
        counts: Counter[ClosedPoint] = Counter()
        for sign, poly in ((1, function.num), (-1, function.den)):
            for modulus, exponent in irreducible_factors(poly):
                counts[ClosedPoint(coefficients(modulus), PointKind.LINE, (), degree(modulus))] += sign * exponent
        counts[self.infinity_points()[0]] += degree(function.den) - degree(function.num)
        return self._checked(Divisor.from_counts(counts), element)

    def local_expansion(self, element: FunctionElement, point: ClosedPoint) -> LocalExpansion:
        function = self._require_rational_function(element)
        if function.is_zero:
            raise ZeroInputError('the zero function has no expansion')
        if point.modulus is None:
            return LocalExpansion(
                degree(function.den) - degree(function.num),
                leading_coefficient(function.num) / leading_coefficient(function.den),
            )
        x0 = point.x_coordinate
        if x0 is None:
            raise UnsupportedOperationError(f'{point} has residue degree {point.residue_degree}, expansions need 1')
        modulus = linear(x0)
        top, bottom = valuation(function.num, modulus), valuation(function.den, modulus)
        lead = evaluate(strip(function.num, modulus, top), x0) / evaluate(strip(function.den, modulus, bottom), x0)
        return LocalExpansion(top - bottom, lead)

    def point_at(self, x0: RationalLike) -> ClosedPoint:
        return ClosedPoint(coefficients(linear(as_rational(x0))), PointKind.LINE)


Curve: TypeAlias = HyperellipticCurve | ProjectiveLine


def principal_divisor(curve: BaseCurve, element: FunctionElement) -> Divisor:
    return curve.principal_divisor(element)


class FiberIndex(enum.Enum):
    ONE = 1
    TWO = 2
    UNKNOWN = 'unknown'


class DeltaVerdict(enum.Enum):
    IN_IMAGE = 'InImage'
    NOT_IN_IMAGE = 'NotInImage'
    UNKNOWN = 'Unknown'


def fiber_index(form: DiagonalForm, point: ClosedPoint) -> FiberIndex:
    """Index of the degree map on zero-cycles of the fiber quadric over k(P)."""
    if is_isotropic_global(form):
        return FiberIndex.ONE
    if point.is_rational:
        return FiberIndex.TWO
    return FiberIndex.UNKNOWN


@dataclass(frozen=True)
class PointIndex:
    point: ClosedPoint
    multiplicity: int
    index: FiberIndex

    def to_dict(self) -> dict[str, object]:
        return {'point': str(self.point), 'multiplicity': self.multiplicity, 'fiber_index': self.index.value}


@dataclass(frozen=True)
class DeltaImageReport:
    verdict: DeltaVerdict
    divisor: Divisor
    indices: tuple[PointIndex, ...]

    def to_dict(self) -> dict[str, object]:
        return {
            'verdict': self.verdict.value,
            'divisor': str(self.divisor),
            'points': [index.to_dict() for index in self.indices],
        }


def delta_image_report(form: DiagonalForm, element: FunctionElement, curve: BaseCurve) -> DeltaImageReport:
    divisor = curve.principal_divisor(element)
    indices = tuple(PointIndex(point, mult, fiber_index(form, point)) for point, mult in divisor)
    verdict = DeltaVerdict.IN_IMAGE
    for entry in indices:
        if entry.multiplicity % 2 == 0 or entry.index is FiberIndex.ONE:
            continue
        if entry.index is FiberIndex.TWO:
            verdict = DeltaVerdict.NOT_IN_IMAGE
            break
        verdict = DeltaVerdict.UNKNOWN
    return DeltaImageReport(verdict, divisor, indices)


def delta_image_test(form: DiagonalForm, element: FunctionElement, curve: BaseCurve) -> DeltaVerdict:
    return delta_image_report(form, element, curve).verdict


class DnAnswer(enum.Enum):
    YES = 'Yes'
    UNKNOWN = 'Unknown'


@dataclass(frozen=True)
class PointCertificate:
    """element = unit at `point` times an element of N_q, for the stated reason."""

    point: ClosedPoint
    multiplicity: int
    reason: str


@dataclass(frozen=True)
class DnSubgroupResult:
    answer: DnAnswer
    certificates: tuple[PointCertificate, ...]
    uncertified: tuple[ClosedPoint, ...] = ()


def dn_subgroup_test(form: DiagonalForm, element: FunctionElement, curve: BaseCurve) -> DnSubgroupResult:
    divisor = curve.principal_divisor(element)
    isotropic = is_isotropic_global(form)
    certificates: list[PointCertificate] = []
    uncertified: list[ClosedPoint] = []
    for point, mult in divisor:
        if isotropic:
            certificates.append(PointCertificate(point, mult, 'q isotropic over Q: N_q(k(C)) = k(C)*'))
        elif mult % 2 == 0:
            certificates.append(PointCertificate(point, mult, f'even multiplicity: unit * (uniformizer^{mult // 2})^2'))
        else:
            uncertified.append(point)
    answer = DnAnswer.UNKNOWN if uncertified else DnAnswer.YES
    return DnSubgroupResult(answer, tuple(certificates), tuple(uncertified))
