"""Typed failure modes.

Numerical failures carry a short machine-readable ``name`` so the CLI can
report one stable diagnostic token per failure class.
"""


class ConfigParseError(Exception):
    """Config file is syntactically unreadable."""


class ConfigValidationError(Exception):
    """Config file parses but a field is missing, unknown, or out of range."""


class NumericalFailure(Exception):
    name = "numerical-failure"


class ResonanceError(NumericalFailure):
    """Periodic Laplacian has an eigenvalue too close to -12 for this grid."""

    name = "resonance"


class SingularJacobianError(NumericalFailure):
    """Linearized operator is numerically singular."""

    name = "singular-jacobian"


class NewtonDivergenceError(NumericalFailure):
    """Newton iteration did not reach tolerance within the iteration budget."""

    name = "newton-divergence"


class IncommensuratePeriodError(NumericalFailure):
    """Grid period is not an integer multiple of the wave period."""

    name = "incommensurate-period"


class UnitarityBlowupError(NumericalFailure):
    """Frame integration lost unitarity beyond the hard threshold."""

    name = "unitarity-blowup"


class InvalidFrameError(NumericalFailure):
    """Frame field does not satisfy its orthonormality contract."""

    name = "invalid-frame"


class DegenerateMetricError(NumericalFailure):
    """Induced metric is singular or indefinite beyond tolerance."""

    name = "degenerate-metric"
