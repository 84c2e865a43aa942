"""
Error definitions for the entropy calculus toolkit.
"""
from typing import Optional


class EntropyCalculusError(Exception):
    """Base class for all errors raised by this package."""
    exit_code = 1


class ValidationError(EntropyCalculusError):
    """Invalid value, state, table, or input file."""
    exit_code = 1


class UsageError(ValidationError):
    """An operation or command was called with an invalid shape of arguments."""


class LabelError(UsageError):
    """A variable or subsystem label does not exist."""


class DomainError(ValidationError):
    """An argument lies outside the mathematical domain of a function."""


class StepSizeError(ValidationError):
    """An evaporation step is too large for the first-order balance equations."""


class InvariantViolation(EntropyCalculusError):
    """A checked invariant did not hold."""
    exit_code = 1


class ModelDomainError(EntropyCalculusError):
    """The physical model is inconsistent for the requested parameters."""
    exit_code = 2


class FormationError(ModelDomainError):
    """Proto black hole entropy is smaller than the Bekenstein-Hawking entropy."""

    def __init__(self, temperature: float, mass: float, sigma: float, s_bh: float,
                 message: Optional[str] = None):
        self.temperature = temperature
        self.mass = mass
        self.sigma = sigma
        self.s_bh = s_bh
        super().__init__(
            message or
            f"Sigma={sigma:.6g} < S_BH={s_bh:.6g} at (T={temperature:.6g}, M={mass:.6g}); "
            f"formation latent heat would be negative"
        )
