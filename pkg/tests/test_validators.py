import pytest

from src.exceptions import ValidationError
from src.validators import (
    validate_anneal,
    validate_episodes,
    validate_gamma,
    validate_learning_rate,
    validate_positive_int,
    validate_preset_shape,
    validate_target,
)


class TestValidation:
    """Test input validation functions"""

    def test_validate_gamma_valid(self):
        """Test discount factors in [0, 1]"""
        assert validate_gamma(0.99) == 0.99
        assert validate_gamma(0) == 0.0
        assert validate_gamma(1) == 1.0

    def test_validate_gamma_out_of_range(self):
        """Test a negative discount factor"""
        with pytest.raises(ValidationError, match="Discount factor must be in \\[0, 1\\], got -0.1"):
            validate_gamma(-0.1)

    def test_validate_gamma_not_a_number(self):
        """Test strings and booleans are not numbers"""
        with pytest.raises(ValidationError, match="must be a number"):
            validate_gamma("0.9")
        with pytest.raises(ValidationError):
            validate_gamma(True)

    def test_validate_positive_int(self):
        """Test integers at or above the minimum"""
        assert validate_positive_int(3, "Layer count") == 3
        assert validate_positive_int(0, "Max rounds", minimum=0) == 0

    def test_validate_positive_int_below_minimum(self):
        """Test integers below the minimum"""
        with pytest.raises(ValidationError, match="Layer count must be at least 1, got 0"):
            validate_positive_int(0, "Layer count")

    def test_validate_positive_int_type(self):
        """Test floats are not integers"""
        with pytest.raises(ValidationError, match="must be an integer"):
            validate_positive_int(2.5, "Layer count")

    def test_validate_learning_rate(self):
        """Test the learning rate must be positive"""
        assert validate_learning_rate(0.01) == 0.01
        with pytest.raises(ValidationError, match="Learning rate must be positive, got -1"):
            validate_learning_rate(-1)

    def test_validate_target(self):
        """Test valid target and window"""
        assert validate_target(0.8, 50) == (0.8, 50)
        assert validate_target(1, 1) == (1.0, 1)

    def test_validate_target_invalid(self):
        """Test target above 1 and a zero window"""
        with pytest.raises(ValidationError, match="Target reward must be in \\(0, 1\\], got 1.2"):
            validate_target(1.2, 50)
        with pytest.raises(ValidationError, match="Target window"):
            validate_target(0.8, 0)

    def test_validate_preset_shape(self):
        """Test preset depths and agent counts"""
        validate_preset_shape(7, 4)
        with pytest.raises(ValidationError, match="Preset layer count"):
            validate_preset_shape(5, 1)
        with pytest.raises(ValidationError, match="Preset agent count"):
            validate_preset_shape(3, 3)

    def test_validate_episodes(self):
        """Test evaluation episode counts"""
        assert validate_episodes(10) == 10
        for bad in (0, -1, 1.5, True):
            with pytest.raises(ValidationError, match="at least one episode"):
                validate_episodes(bad)

    def test_validate_anneal(self):
        """Test annealing factor and floor in (0, 1]"""
        assert validate_anneal(0.9, 1e-3) == (0.9, 1e-3)
        assert validate_anneal(1, 1) == (1.0, 1.0)

    @pytest.mark.parametrize(
        "factor, floor, message",
        [
            (0.0, 0.1, "Anneal factor must be in"),
            (1.1, 0.1, "Anneal factor must be in"),
            ("0.9", 0.1, "Anneal factor must be a number"),
            (0.9, -0.5, "Anneal floor must be in"),
            (0.9, True, "Anneal floor must be a number"),
        ],
    )
    def test_validate_anneal_invalid(self, factor, floor, message):
        """Test out-of-range or non-numeric annealing settings"""
        with pytest.raises(ValidationError, match=message):
            validate_anneal(factor, floor)
