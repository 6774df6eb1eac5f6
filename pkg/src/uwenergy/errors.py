class DomainError(ValueError):
    """An argument lies outside the domain where the model is defined."""


class BracketError(RuntimeError):
    """A root-finding bracket does not contain a sign change."""


class StationarityError(RuntimeError):
    """A claimed interior stationary point fails the numerical gradient check."""
