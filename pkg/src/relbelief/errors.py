"""Exception hierarchy.

Two families: :class:`ValidationError` for malformed inputs (bad models,
bad arguments) and :class:`NumericalError` for well-formed inputs on which
a quantity is undefined (zero predictive, zero prior mass, ...).  The CLI
maps the first family to exit status 2 and the second to exit status 3.
"""


class EvidenceError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(EvidenceError, ValueError):
    """An input violates a type invariant or a precondition on arguments."""


class NumericalError(EvidenceError, ArithmeticError):
    """A requested quantity is undefined for the given (valid) inputs."""


class ZeroPredictive(NumericalError):
    """The observed point has prior predictive probability zero."""


class ZeroPriorMass(NumericalError):
    """An event or marginal value carries no prior mass."""


class DegeneratePriorMass(NumericalError):
    """An event has prior probability 0 or 1, so odds are undefined."""


class DegenerateNormalizer(NumericalError):
    """A contaminated prior cannot be normalized."""


class DegenerateData(NumericalError):
    """Sufficient statistics make a closed form undefined."""


class GridTooCoarse(NumericalError):
    """A discretization grid captures too little prior mass."""


class GammaTooLarge(ValidationError):
    """Requested credible content exceeds the plausible region's content."""


class InvalidEpsilon(ValidationError):
    """A contamination weight lies outside [0, 1)."""
