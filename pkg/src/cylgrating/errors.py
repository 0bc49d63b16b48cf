"""Exception hierarchy and CLI exit codes.

Every failure mode that callers are expected to handle gets its own class so
the CLI can map it to a stable exit code and tests can assert on the type.
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_WOOD_ANOMALY = 3
EXIT_SINGULAR = 4
EXIT_NO_CONVERGENCE = 5


class EngineError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class DomainError(EngineError, ValueError):
    """Argument outside the supported domain (bad order, x <= 0, NaN, ...)."""

    exit_code = EXIT_CONFIG


class RangeOverflowError(EngineError, ArithmeticError):
    """A special-function value exceeded double range inside the envelope."""

    exit_code = EXIT_CONFIG


class ConfigError(EngineError, ValueError):
    """A problem statement violates one of its invariants."""

    exit_code = EXIT_CONFIG


class EvanescentInteriorError(ConfigError):
    """eps_r * mu_r <= cos^2(theta_i): interior wave evanescent, out of scope."""


class ResonanceError(EngineError, ArithmeticError):
    """A physical-resonance denominator fell below the singularity threshold."""

    exit_code = EXIT_SINGULAR


class WoodAnomalyError(EngineError):
    """Grating order at grazing: the lattice sums do not converge."""

    exit_code = EXIT_WOOD_ANOMALY


class NonConvergenceError(EngineError):
    """Requested tolerance could not be reached within the term budget."""

    exit_code = EXIT_NO_CONVERGENCE

    def __init__(self, message: str, est_error: float | None = None,
                 terms_used: int | None = None):
        super().__init__(message)
        self.est_error = est_error
        self.terms_used = terms_used


class LatticeTableError(NonConvergenceError):
    """One or more lattice-sum orders failed; carries the failing orders."""

    def __init__(self, message: str, failed_orders: list[int]):
        super().__init__(message)
        self.failed_orders = failed_orders


class SingularSystemError(EngineError, ArithmeticError):
    """Truncated grating system numerically singular (grating resonance)."""

    exit_code = EXIT_SINGULAR

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class DivergenceError(EngineError, ArithmeticError):
    """Neumann iteration outside the contraction regime (ratio >= 1)."""

    exit_code = EXIT_SINGULAR

    def __init__(self, message: str, ratio: float | None = None):
        super().__init__(message)
        self.ratio = ratio
