"""Exception hierarchy used across the package."""


class RydbergWError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(RydbergWError, ValueError):
    """Operands have incompatible dimensions."""


class SizingError(RydbergWError, ValueError):
    """A composite space would exceed the configured maximum dimension."""


class DecompositionError(RydbergWError):
    """An eigendecomposition could not separate the requested eigenspaces."""


class DerivationError(RydbergWError):
    """Two independent constructions of the same operator disagree."""


class UnsupportedRegimeError(RydbergWError, ValueError):
    """A closed-form expression was requested outside its validity regime."""


class OracleInconclusiveError(RydbergWError):
    """A numerical oracle failed to extract a clean signal."""


class NonUniqueSteadyStateError(RydbergWError):
    """The Liouvillian has more than one stationary state.

    Attributes
    ----------
    null_dim : int or None
        Estimated dimension of the null space, if it could be computed.
    """

    def __init__(self, message, null_dim=None):
        super().__init__(message)
        self.null_dim = null_dim


class StiffnessError(RydbergWError):
    """Explicit time integration failed because the step size underflowed."""


class PositivityError(RydbergWError, ValueError):
    """A density matrix violates positivity beyond tolerance."""


class ConfigError(RydbergWError, ValueError):
    """An experiment configuration is malformed."""
