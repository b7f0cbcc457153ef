"""Exception types shared across the library."""


class IllConditioned(ValueError):
    """A coupling matrix failed the eigenvalue conditioning gate.

    Raised instead of silently regularizing: near-singular coupling is
    physical (vanishing radiation resistance), and results computed past
    the gate would be numerically meaningless. Retry with a nonzero
    ohmic-loss ratio to regularize on purpose.
    """


class SingularNetwork(ValueError):
    """A network linear solve hit a (numerically) singular matrix."""


class SchemaError(ValueError):
    """A sweep configuration failed validation; the message names the key."""
