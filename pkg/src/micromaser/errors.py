"""Exception types shared across the package, plus the CLI exit-code map."""

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TRUNCATION = 3
EXIT_STABILITY = 4
EXIT_DIVERGENCE = 5


class MicromaserError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(MicromaserError, ValueError):
    """Operand dimensions do not match the operation's contract."""


class SymmetryError(MicromaserError, ValueError):
    """A Hermitian input was required but not supplied."""


class DimensionLimitError(MicromaserError, ValueError):
    """A tensor product or atom count would exceed the configured size cap."""


class DomainError(MicromaserError, ValueError):
    """A physical parameter lies outside its admissible range."""


class GainRegimeError(MicromaserError, ValueError):
    """Reservoir populations amplify the field instead of thermalizing it."""


class SettingsError(MicromaserError, ValueError):
    """Integrator settings violate an accuracy or consistency bound."""


class ConfigError(MicromaserError, ValueError):
    """A configuration document failed schema validation."""


class TruncationError(MicromaserError, RuntimeError):
    """Fock truncation too small for the requested temperatures."""

    def __init__(self, message: str, suggested_dim: int | None = None):
        super().__init__(message)
        self.suggested_dim = suggested_dim


class DivergenceError(MicromaserError, RuntimeError):
    """The integrator produced non-finite values."""


class FitError(MicromaserError, RuntimeError):
    """A time series does not support the requested regression."""


class UndefinedCorrelationError(MicromaserError, RuntimeError):
    """g2(0) requested for a state with mean photon number below the floor."""


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit-code contract."""
    if isinstance(exc, TruncationError):
        return EXIT_TRUNCATION
    if isinstance(exc, GainRegimeError):
        return EXIT_STABILITY
    if isinstance(exc, DivergenceError):
        return EXIT_DIVERGENCE
    return EXIT_VALIDATION
