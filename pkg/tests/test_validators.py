"""
Tests for validation functions.
"""
import math

import numpy as np
import pytest

from engulfing.helpers.error_handlers import DimensionMismatchError, InvalidParameterError
from engulfing.helpers.validators import (require_constant_above_one, require_positive_height, require_unit_vector,
                                          require_vector, validate_constant, validate_positive_real)


@pytest.mark.unit
class TestPositiveReal:
    """Test positive real validation"""

    @pytest.mark.parametrize('value', [1, 0.5, '2.5', 1e-12])
    def test_valid(self, value):
        assert validate_positive_real(value, 't') == (True, "")

    def test_not_a_number(self):
        is_valid, message = validate_positive_real('abc', 't')
        assert not is_valid
        assert message == "Field 't' must be a number"

    @pytest.mark.parametrize('value', [0, -1.0, math.inf, math.nan])
    def test_not_positive_finite(self, value):
        is_valid, message = validate_positive_real(value, 't')
        assert not is_valid
        assert 'positive finite' in message

    def test_require_positive_height(self):
        assert require_positive_height('3') == 3.0
        with pytest.raises(InvalidParameterError) as exc_info:
            require_positive_height(None, 'h')
        assert exc_info.value.field == 'h'


@pytest.mark.unit
class TestConstant:
    """Test engulfing constant validation"""

    def test_valid(self):
        assert validate_constant(1.001)[0]
        assert require_constant_above_one('4') == 4.0

    @pytest.mark.parametrize('value', [1.0, 0.0, -3.0, math.inf, math.nan, 'K'])
    def test_invalid(self, value):
        assert not validate_constant(value)[0]
        with pytest.raises(InvalidParameterError):
            require_constant_above_one(value)


@pytest.mark.unit
class TestVectors:
    """Test vector coercion"""

    def test_vector(self):
        vector = require_vector([1, 2], 2)
        assert vector.dtype == float
        assert vector.tolist() == [1.0, 2.0]
        assert not vector.flags.writeable

    def test_scalar_for_dimension_one(self):
        assert require_vector(3.0, 1).tolist() == [3.0]

    def test_input_not_aliased(self):
        source = np.array([1.0, 2.0])
        require_vector(source, 2)
        source[0] = 5.0
        assert source.flags.writeable

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError) as exc_info:
            require_vector([1.0, 2.0, 3.0], 2, 'x0')
        assert (exc_info.value.expected, exc_info.value.actual) == (2, 3)

    @pytest.mark.parametrize('value', [[1.0, math.nan], [math.inf, 0.0], ['a', 'b']])
    def test_invalid_entries(self, value):
        with pytest.raises(InvalidParameterError):
            require_vector(value, 2)

    def test_unit_vector(self):
        assert require_unit_vector([0.6, 0.8], 2).tolist() == [0.6, 0.8]
        with pytest.raises(InvalidParameterError):
            require_unit_vector([1.0, 1.0], 2)
