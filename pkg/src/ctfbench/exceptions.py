"""Exception types shared across the package."""


class CTFBenchError(Exception):
    """Base class for all ctfbench errors."""


class DivergenceError(CTFBenchError):
    """An integrator produced a non-finite state."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"solution diverged (non-finite state) at step {step}")


class MatrixFormatError(CTFBenchError):
    """A matrix file is malformed or inconsistent with its header."""


class PackValidationError(CTFBenchError):
    """A dataset pack violates its layout or manifest invariants."""


class MetricError(CTFBenchError):
    """A score is undefined for the given inputs (e.g. zero-norm reference)."""
