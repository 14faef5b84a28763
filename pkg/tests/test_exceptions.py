import pytest

from src.exceptions import (
    AgentFailureError,
    CapacityError,
    CheckpointError,
    CompressionError,
    ContractViolationError,
    DimensionError,
    InvalidGateError,
    PoisonedPacketError,
    ProtocolError,
    QTRLError,
    QubitIndexError,
    ValidationError,
)


class TestExceptions:
    """Test custom exception hierarchy"""

    @pytest.mark.parametrize(
        "error_cls",
        [
            ValidationError,
            DimensionError,
            QubitIndexError,
            InvalidGateError,
            CapacityError,
            CompressionError,
            ContractViolationError,
            PoisonedPacketError,
            ProtocolError,
            CheckpointError,
        ],
    )
    def test_inherits_from_base(self, error_cls):
        """Test every error derives from QTRLError"""
        error = error_cls("test message")
        assert isinstance(error, QTRLError)
        assert str(error) == "test message"

    def test_dimension_error_is_value_error(self):
        """Test DimensionError is a ValueError"""
        with pytest.raises(ValueError):
            raise DimensionError("bad shape")

    def test_qubit_index_error_is_index_error(self):
        """Test QubitIndexError is an IndexError"""
        with pytest.raises(IndexError):
            raise QubitIndexError("qubit 5")

    def test_agent_failure_carries_context(self):
        """Test agent failures keep the agent and round"""
        error = AgentFailureError("Agent 3 failed", agent_index=3, round_index=12)
        assert isinstance(error, QTRLError)
        assert error.agent_index == 3
        assert error.round_index == 12
        assert str(error) == "Agent 3 failed"

    def test_base_exception(self):
        """Test the base error can be raised"""
        with pytest.raises(QTRLError):
            raise QTRLError("base error")
