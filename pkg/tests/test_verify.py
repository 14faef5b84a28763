from unittest.mock import Mock, patch

import numpy as np
import pytest

from src.exceptions import ValidationError
from src.qsim import init_quantum_params
from src.verify import (
    SUITES,
    dense_ansatz_unitary,
    max_abs_error,
    max_floored_rel_error,
    run_suites,
)


def _failed(results):
    return [f"[{r.suite}] {r.name}: {r.max_error:.3e}" for r in results if not r.passed]


class TestSuites:
    """Test the self-check suites"""

    def test_oracle_suite_passes(self):
        """Test the simulator matches the dense reference"""
        results = run_suites(["oracle"])
        assert len(results) == 3
        assert _failed(results) == []

    def test_env_suite_passes(self):
        """Test the environment checks pass"""
        results = run_suites(["env"])
        assert {r.suite for r in results} == {"env"}
        assert _failed(results) == []

    def test_gradient_suite_passes(self):
        """Test every finite-difference check passes"""
        results = run_suites(["gradient"])
        assert len(results) == 7
        assert _failed(results) == []

    def test_all_expands_once(self):
        """Test all runs each suite once"""
        mocks = {name: Mock(return_value=[]) for name in SUITES}
        with patch.dict(SUITES, mocks):
            assert run_suites(["all", "env"]) == []
        for mock in mocks.values():
            mock.assert_called_once_with()

    def test_unknown_suite(self):
        """Test an unknown suite name is rejected"""
        with pytest.raises(ValidationError, match="Unknown verify suite 'bogus'"):
            run_suites(["bogus"])

    def test_sign_error_in_shift_rule_is_caught(self):
        """Test a flipped shift sign fails the gradient checks"""
        with patch("src.qsim.SHIFT", -np.pi / 2):
            results = {r.name: r for r in run_suites(["gradient"])}
        assert not results["qsim shift rule"].passed
        assert not results["qt-gen composed Jacobian"].passed


class TestHelpers:
    """Test error measures and the dense reference"""

    def test_error_measures(self):
        """Test absolute and floored-relative errors"""
        assert max_abs_error(np.array([1.0, 2.0]), np.array([1.5, 2.0])) == 0.5
        assert max_floored_rel_error(np.array([10.5]), np.array([10.0])) == pytest.approx(0.05)
        assert max_floored_rel_error(np.array([0.5]), np.array([0.0])) == 0.5
        assert max_abs_error(np.array([]), np.array([])) == 0.0

    def test_dense_unitary_is_unitary(self, rng):
        """Test the dense reference is unitary"""
        u = dense_ansatz_unitary(init_quantum_params(3, 2, rng))
        np.testing.assert_allclose(u.conj().T @ u, np.eye(8), atol=1e-12)
