"""Exception hierarchy shared by every module."""

from __future__ import annotations


class DickeSynthError(Exception):
    """Base class for all library errors."""


class InvalidGate(DickeSynthError):
    pass


class InvalidCircuit(DickeSynthError):
    pass


class MacroNotExpanded(DickeSynthError):
    pass


class CompositionError(DickeSynthError):
    pass


class DimensionError(DickeSynthError):
    pass


class InvalidRegister(DickeSynthError):
    pass


class NoSolution(DickeSynthError):
    pass


class ResourceLimit(DickeSynthError):
    """Raised when a construction or simulation would exceed the qubit cap.

    ``estimate`` carries whatever breakdown the caller could compute, so the
    message can cite an exact qubit budget.
    """

    def __init__(self, message: str, estimate: dict | None = None):
        super().__init__(message)
        self.estimate = dict(estimate or {})


class ConfigMismatch(DickeSynthError):
    pass


class Unsupported(DickeSynthError):
    pass
