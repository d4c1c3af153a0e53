"""
Exception hierarchy for the curved oscillator toolkit.

Invalid inputs raise subclasses of ValueError, numerical failures raise
subclasses of RuntimeError. Each class carries the process exit code the
command-line front end reports for it.
"""


class OscillatorError(Exception):
    """Root of every error raised by the toolkit."""

    exit_code: int = 3


class ConfigError(OscillatorError, ValueError):
    """A run configuration could not be read or failed validation."""

    exit_code = 2


class DomainError(OscillatorError, ValueError):
    """A coordinate or parameter lies outside the region where a formula holds."""

    exit_code = 3


class PoleError(DomainError):
    """The kappa-cosine vanished where it is used as a divisor."""


class ScatteringRegimeError(DomainError):
    """2*kappa*H_xi <= 0, so cal_E and the functions built on it are not real."""


class FlatCurvatureError(DomainError):
    """A quantity that only exists for kappa != 0 was requested at kappa = 0."""


class NotHyperbolicError(DomainError):
    """A hyperboloid-only quantity was requested for kappa >= 0."""


class QuantumNumberRangeError(DomainError):
    """A quantum number lies outside the bound-state range."""


class UnknownQuantityError(OscillatorError, KeyError):
    """A conserved-quantity log name is not present in a trajectory."""

    exit_code = 3

    def __str__(self) -> str:
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ""


class NumericalError(OscillatorError, RuntimeError):
    """A numerical procedure failed to produce a trustworthy result."""

    exit_code = 4


class NewtonDivergenceError(NumericalError):
    """The implicit step did not converge within the iteration budget."""


class WallProximityError(NumericalError):
    """An integrated state came too close to a coordinate wall."""


class EigensolveError(NumericalError):
    """The tridiagonal eigensolver failed or a requested eigenpair is missing."""

