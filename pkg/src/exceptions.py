"""Custom exception classes for the distributed QTRL simulator."""


class QTRLError(Exception):
    """Base exception for simulator, training and harness errors."""

    pass


class ValidationError(QTRLError):
    """Raised when a configuration or argument value is invalid."""

    pass


class DimensionError(QTRLError, ValueError):
    """Raised when vector or matrix dimensions do not line up."""

    pass


class QubitIndexError(QTRLError, IndexError):
    """Raised when a gate addresses a qubit outside the register."""

    pass


class InvalidGateError(QTRLError):
    """Raised when a two-qubit gate uses the same qubit twice."""

    pass


class CapacityError(QTRLError):
    """Raised when more generated parameters are requested than basis states exist."""

    pass


class CompressionError(QTRLError):
    """Raised when a model would not compress its generated parameters."""

    pass


class ContractViolationError(QTRLError):
    """Raised when an environment is stepped after its episode ended."""

    pass


class PoisonedPacketError(QTRLError):
    """Raised when a gradient packet contains non-finite entries."""

    pass


class ProtocolError(QTRLError):
    """Raised when the synchronization protocol receives unusable input."""

    pass


class AgentFailureError(QTRLError):
    """Raised when an agent fails during a synchronization round."""

    def __init__(self, message: str, agent_index: int, round_index: int):
        super().__init__(message)
        self.agent_index = agent_index
        self.round_index = round_index


class CheckpointError(QTRLError):
    """Raised when a checkpoint cannot be written or does not validate."""

    pass
