import logging

import numpy as np
import pytest

from src.exceptions import DimensionError, ValidationError
from src.models import OptimizerKind
from src.optimizers import AdaptiveMoment, PlainAscent, TargetAnnealing, make_optimizer


class TestPlainAscent:
    """Test the plain gradient-ascent rule"""

    def test_step(self):
        """Test Θ + η g"""
        out = PlainAscent(0.1).step(np.zeros(2), np.array([2.0, 2.0]))
        np.testing.assert_allclose(out, [0.2, 0.2])

    def test_zero_gradient_is_a_no_op(self):
        """Test a zero gradient leaves parameters alone"""
        params = np.array([1.0, -2.0, 3.0])
        np.testing.assert_array_equal(PlainAscent(0.5).step(params, np.zeros(3)), params)

    def test_does_not_mutate_input(self):
        """Test the input array is not updated in place"""
        params = np.ones(3)
        PlainAscent(1.0).step(params, np.ones(3))
        np.testing.assert_array_equal(params, 1.0)

    def test_learning_rate(self):
        """Test η must be positive"""
        with pytest.raises(ValidationError):
            PlainAscent(0.0)

    def test_shape_mismatch(self):
        """Test gradient and parameter shapes must agree"""
        with pytest.raises(DimensionError, match="does not match"):
            PlainAscent(0.1).step(np.zeros(3), np.zeros(2))


class TestAdaptiveMoment:
    """Test the bias-corrected moment rule"""

    def test_first_step_moves_by_learning_rate(self):
        """Test the first step moves each coordinate by about η"""
        opt = AdaptiveMoment(0.01)
        out = opt.step(np.zeros(3), np.array([5.0, -0.2, 1e-3]))
        np.testing.assert_allclose(out, [0.01, -0.01, 0.01], rtol=1e-4)
        assert opt.t == 1

    def test_ascends(self):
        """Test a constant gradient climbs η per step"""
        opt = AdaptiveMoment(0.1)
        params = np.zeros(1)
        for _ in range(10):
            params = opt.step(params, np.array([1.0]))
        assert params[0] == pytest.approx(1.0, rel=1e-6)

    def test_zero_gradient_on_fresh_optimizer(self):
        """Test a zero gradient before any step changes nothing"""
        opt = AdaptiveMoment(0.01)
        params = np.array([0.5, -1.0])
        np.testing.assert_array_equal(opt.step(params, np.zeros(2)), params)
        assert opt.t == 0
        assert opt.m is None

    def test_zero_gradient_does_not_coast(self):
        """Test momentum does not move parameters on a zero gradient"""
        opt = AdaptiveMoment(0.1)
        params = np.zeros(2)
        for _ in range(5):
            params = opt.step(params, np.array([1.0, -1.0]))
        m, v, t = opt.m.copy(), opt.v.copy(), opt.t
        after = opt.step(params, np.zeros(2))
        np.testing.assert_array_equal(after, params)
        np.testing.assert_array_equal(opt.m, m)
        np.testing.assert_array_equal(opt.v, v)
        assert opt.t == t

    def test_decay_rates_checked(self):
        """Test moment decay rates must lie in [0, 1)"""
        with pytest.raises(ValidationError, match="decay"):
            AdaptiveMoment(0.01, beta1=1.0)


class TestTargetAnnealing:
    """Test learning-rate annealing once the target is held"""

    def test_below_target_keeps_rate(self):
        """Test the rate is unchanged while the average is below target"""
        opt = PlainAscent(0.01)
        schedule = TargetAnnealing(opt, 0.8, window=10)
        assert schedule.update(50, 0.79) == 0.01

    def test_partial_window_keeps_rate(self):
        """Test the rate is unchanged before a full window"""
        opt = PlainAscent(0.01)
        schedule = TargetAnnealing(opt, 0.8, window=10)
        assert schedule.update(9, 0.95) == 0.01

    def test_anneals_at_target(self):
        """Test each round at target multiplies the rate by the factor"""
        opt = AdaptiveMoment(0.01)
        schedule = TargetAnnealing(opt, 0.8, window=10, factor=0.5)
        schedule.update(10, 0.8)
        schedule.update(11, 0.9)
        assert opt.learning_rate == pytest.approx(0.0025)

    def test_rate_is_not_restored(self):
        """Test dropping below target does not raise the rate again"""
        opt = PlainAscent(0.01)
        schedule = TargetAnnealing(opt, 0.8, window=1, factor=0.5)
        schedule.update(1, 0.9)
        assert schedule.update(2, 0.1) == pytest.approx(0.005)

    def test_floor(self):
        """Test the rate never drops below floor times its start"""
        opt = PlainAscent(0.01)
        schedule = TargetAnnealing(opt, 0.8, window=1, factor=0.5, floor=0.1)
        for round_index in range(1, 30):
            schedule.update(round_index, 1.0)
        assert opt.learning_rate == pytest.approx(0.001)

    def test_factor_one_disables(self):
        """Test a factor of 1 leaves the rate alone"""
        opt = PlainAscent(0.01)
        schedule = TargetAnnealing(opt, 0.8, window=1, factor=1.0)
        for round_index in range(1, 10):
            schedule.update(round_index, 1.0)
        assert opt.learning_rate == 0.01

    def test_logs_change(self, caplog):
        """Test a rate change is logged at debug level"""
        schedule = TargetAnnealing(PlainAscent(0.01), 0.8, window=1)
        with caplog.at_level(logging.DEBUG, logger="src.optimizers"):
            schedule.update(3, 0.9)
        assert "Round 3: learning rate" in caplog.text

    @pytest.mark.parametrize("factor, floor", [(0.0, 0.1), (1.5, 0.1), (0.9, 0.0), (0.9, 2.0)])
    def test_invalid_settings(self, factor, floor):
        """Test factor and floor must lie in (0, 1]"""
        with pytest.raises(ValidationError, match="Anneal"):
            TargetAnnealing(PlainAscent(0.01), 0.8, 10, factor, floor)


class TestFactory:
    """Test optimizer selection"""

    def test_kinds(self):
        """Test each kind maps to its rule"""
        assert isinstance(make_optimizer(OptimizerKind.PLAIN_ASCENT, 0.1), PlainAscent)
        assert isinstance(make_optimizer(OptimizerKind.ADAPTIVE_MOMENT, 0.1), AdaptiveMoment)
