"""Tests for overflow-safe scaled arithmetic."""

import math

import numpy as np
import pytest

from src.common.exceptions import ConditioningError
from src.numeric.scaled import ScaledComplex, ScaledVector


def test_mantissa_is_normalized():
    """Test the mantissa range after construction."""
    value = ScaledComplex(12.0, 3)
    assert 0.5 <= abs(value.mantissa) < 1.0
    assert float(value) == pytest.approx(96.0)


def test_zero_representation():
    """Test zero keeps exponent 0."""
    zero = ScaledComplex.of(0.0)
    assert zero.is_zero()
    assert zero.exponent == 0
    assert (zero + 3.0).to_float() == 3.0


def test_product_beyond_double_range():
    """Test that 1000! / 999! survives intermediate overflow."""
    factorial = ScaledComplex.one()
    for i in range(1, 1001):
        factorial = factorial * i
    assert factorial.log10() == pytest.approx(math.lgamma(1001) / math.log(10), rel=1e-12)
    smaller = factorial / 1000
    assert (factorial / smaller).to_float() == pytest.approx(1000.0, rel=1e-12)


def test_to_complex_overflow():
    """Test strict and lenient conversion of huge values."""
    huge = ScaledComplex(1.0, 5000)
    with pytest.raises(ConditioningError):
        huge.to_complex()
    assert math.isinf(huge.to_float(strict=False))


def test_negligible_addend():
    """Test that a vastly smaller operand vanishes in a sum."""
    big = ScaledComplex(1.0, 2000)
    assert big + ScaledComplex(1.0, -2000) == big


def test_integer_powers():
    """Test powers by squaring, negative powers included."""
    base = ScaledComplex.of(1.5)
    assert (base ** 10).to_float() == pytest.approx(1.5 ** 10, rel=1e-14)
    assert (base ** -3).to_float() == pytest.approx(1.5 ** -3, rel=1e-14)
    assert (base ** 0).to_float() == 1.0
    assert (ScaledComplex.of(10.0) ** 400).log10() == pytest.approx(400.0, rel=1e-12)


def test_non_integer_power_rejected():
    with pytest.raises(TypeError):
        ScaledComplex.of(2.0) ** 0.5


def test_complex_arithmetic():
    """Test complex products and conjugates."""
    z = ScaledComplex.of(3 + 4j)
    assert abs(z) == pytest.approx(5.0)
    assert (z * z.conjugate()).to_complex() == pytest.approx(25.0)
    assert (1 - z).to_complex() == pytest.approx(-2 - 4j)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ScaledComplex.one() / 0.0


def test_non_finite_rejected():
    with pytest.raises(ConditioningError):
        ScaledComplex(float("nan"), 0)


def test_vector_cumulative_product():
    """Test running products with len(ratios)+1 entries."""
    vector = ScaledVector.cumulative_product([2.0, 3.0, 4.0], start=0.5)
    assert len(vector) == 4
    np.testing.assert_allclose(vector.to_array(), [0.5, 1.0, 3.0, 12.0])


def test_vector_total_of_huge_entries():
    """Test sums of entries that overflow on their own."""
    vector = ScaledVector.cumulative_product([1e200, 1e200, 1e-300])
    total = vector.total()
    assert total.log10() == pytest.approx(400.0, rel=1e-12)
    relative = vector.relative_to(total)
    assert relative[2] == pytest.approx(1.0, rel=1e-12)
    assert relative[0] == 0.0


def test_vector_arithmetic():
    """Test elementwise products, sums and dot products."""
    left = ScaledVector([1.0, 2.0, 3.0])
    right = ScaledVector([4.0, 0.0, 0.25], [0, 0, 4])
    np.testing.assert_allclose((left * right).to_array(), [4.0, 0.0, 12.0])
    np.testing.assert_allclose((left + right).to_array(), [5.0, 2.0, 7.0])
    assert left.dot(right).to_float() == pytest.approx(16.0)
    np.testing.assert_allclose((left * ScaledComplex(1.0, 10)).to_array(), [1024.0, 2048.0, 3072.0])


def test_vector_indexing():
    """Test scalar and slice access."""
    vector = ScaledVector.from_scalars([1.0, ScaledComplex(1.0, 100), 3.0])
    assert isinstance(vector[1], ScaledComplex)
    assert vector[1].log10() == pytest.approx(100 * math.log10(2))
    assert len(vector[1:]) == 2
    assert [v.to_float() for v in vector[::2]] == [1.0, 3.0]


def test_all_zero_vector_peak():
    assert ScaledVector(np.zeros(3)).peak_exponent() == 0
