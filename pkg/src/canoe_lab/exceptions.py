"""
Exceptions and warnings raised across canoe_lab.
"""

from typing import Optional


class CanoeLabError(Exception):
    """
    Root of every error raised by canoe_lab.
    """
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class ContractViolationError(CanoeLabError):
    """
    Raised when an operation is called with inputs that break its preconditions
    (mismatched widths, empty inputs, unnormalised states...).
    """


class HamiltonianParseError(CanoeLabError):
    """
    Raised when a line of a Pauli-term file cannot be parsed.
    """
    def __init__(self, message: str, line_number: int) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class HamiltonianFormatError(CanoeLabError):
    """
    Raised when a Pauli-term file parses but is not a valid Hamiltonian
    (inconsistent string widths, non-Hermitian coefficients, empty file).
    """


class DeterminantFileError(CanoeLabError):
    """
    Raised when a determinant-list file is malformed.
    """
    def __init__(self, message: str, line_number: Optional[int] = None) -> None:
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line_number = line_number


class SizeLimitError(CanoeLabError):
    """
    Raised when a dense oracle or a sweep is asked for more qubits than allowed.
    """


class ConfigurationError(CanoeLabError):
    """
    Raised for invalid experiment configuration. ``location`` is the dotted key path.
    """
    def __init__(self, message: str, location: Optional[str] = None) -> None:
        text = f"{location}: {message}" if location else message
        super().__init__(text)
        self.location = location


class DataError(CanoeLabError):
    """
    Raised when matrices contain non-finite entries.
    """


class ShadowReferenceError(CanoeLabError):
    """
    Raised when the shadow reference string overlaps a quantum basis state.
    """


class SolverBreakdownError(CanoeLabError):
    """
    Raised when an iterative solver cannot continue: the Rayleigh-Ritz basis of
    LOBPCG collapses to rank 0, or Lanczos propagation exhausts its step splitting.
    """


class IndefiniteOverlapError(CanoeLabError):
    """
    Raised when the current LOBPCG iterate has non-positive overlap norm.
    Callers restart from a fresh random vector.
    """


class ExtrapolationError(CanoeLabError):
    """
    Raised when the shot extrapolation has too few usable systems.
    """


class MissingDependencyError(CanoeLabError):
    """
    Raised when a command needs outputs produced by another command first.
    """
    def __init__(self, message: str, command: str) -> None:
        super().__init__(f"{message} (run `canoe {command}` first)")
        self.command = command


class NonConvergenceWarning(UserWarning):
    """
    Warning emitted when LOBPCG stops at maxiter without meeting the tolerance.
    """
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class ThresholdOrderingWarning(UserWarning):
    """
    Warning emitted when a qualitative threshold-ordering check is not reproduced.
    """
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message
