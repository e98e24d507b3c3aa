from fractions import Fraction

import pytest

from qflab.functions import (
    FunctionElement,
    RationalFunction,
    coefficients,
    degree,
    evaluate,
    format_polynomial,
    irreducible_factors,
    is_squarefree,
    linear,
    poly_from_coeffs,
    reverse,
    shift_up,
    strip,
    valuation,
)

CUBIC = poly_from_coeffs([-1, -5, -6, 0])


def test_polynomial_helpers() -> None:
    assert coefficients(CUBIC) == (-1, -5, -6, 0)
    assert degree(CUBIC) == 3
    assert evaluate(CUBIC, -2) == 0
    assert evaluate(CUBIC, Fraction(1, 2)) == Fraction(-1, 8) - Fraction(5, 4) - 3
    assert coefficients(reverse(poly_from_coeffs([1, 2, 3]))) == (3, 2, 1)
    assert coefficients(shift_up(poly_from_coeffs([1, 1]), 2)) == (1, 1, 0, 0)
    with pytest.raises(ValueError, match='zero polynomial'):
        degree(poly_from_coeffs([0]))


def test_factoring() -> None:
    factors = irreducible_factors(CUBIC)
    assert [(coefficients(factor), exponent) for factor, exponent in factors] == [
        ((1, 0), 1),
        ((1, 2), 1),
        ((1, 3), 1),
    ]
    assert is_squarefree(CUBIC)
    assert not is_squarefree(poly_from_coeffs([1, 2, 1]))


def test_valuation_and_strip() -> None:
    square = poly_from_coeffs([1, 4, 4]) * linear(1)
    assert valuation(square, linear(-2)) == 2
    assert valuation(square, linear(3)) == 0
    assert strip(square, linear(-2), 2) == linear(1)


@pytest.mark.parametrize(
    ('coeffs', 'expected'),
    [
        ([-1, -5, -6, 0], '-x^3 - 5*x^2 - 6*x'),
        ([1, 0, 1], 'x^2 + 1'),
        ([Fraction(1, 2), -1], '1/2*x - 1'),
        ([0], '0'),
        ([7], '7'),
    ],
)
def test_format_polynomial(coeffs: list[int | Fraction], expected: str) -> None:
    assert format_polynomial(poly_from_coeffs(coeffs)) == expected


def test_rational_function_normalization() -> None:
    x = RationalFunction.x()
    one = RationalFunction.constant(1)
    ratio = (x * x - one) / (x * RationalFunction.constant(2) - RationalFunction.constant(2))
    assert ratio == (x + one).scaled(Fraction(1, 2))
    assert ratio.is_polynomial
    assert str((one / x)) == '(1)/(x)'
    assert (one / x).evaluate(0) is None
    assert (x**-2).evaluate(2) == Fraction(1, 4)
    assert RationalFunction.constant(3).constant_value() == 3
    with pytest.raises(ZeroDivisionError):
        one / RationalFunction.constant(0)


def test_function_elements() -> None:
    x, y = FunctionElement.x(), FunctionElement.y()
    element = x.scaled(2) + y
    assert element.has_y
    assert not element.is_constant
    assert str(element) == '2*x + y'
    assert str(-y) == '(-1)*y'
    assert (element - element).is_zero
    assert FunctionElement.constant(5).is_constant

    half = FunctionElement(
        RationalFunction.x() / RationalFunction.constant(2),
        RationalFunction.constant(1) / RationalFunction.x(),
    )
    upper, lower, denominator = half.integral_parts()
    assert coefficients(upper) == (Fraction(1, 2), 0, 0)
    assert coefficients(lower) == (1,)
    assert coefficients(denominator) == (1, 0)
