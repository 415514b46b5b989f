"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A domain/experiment configuration violates a precondition."""


class ContractError(ValueError):
    """An operation was called outside its contract (wrong geometry, bad shapes)."""


class ParameterError(ValueError):
    """A regularization or scheme parameter is outside its admissible range."""


class NumericsError(RuntimeError):
    """A numerical step failed (factorization breakdown, non-finite values)."""


class ResonanceError(NumericsError):
    """The forward operator is singular: the potential admits a zero Dirichlet eigenvalue."""
