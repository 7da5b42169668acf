"""Exception types shared across the package."""


class NilprogError(Exception):
    """Base class for all package errors."""


class SpecMismatch(NilprogError, ValueError):
    """Two elements from different group presentations were combined."""


class DimensionOverflow(NilprogError, ValueError):
    """A requested presentation exceeds the configured size caps."""


class ValidationMismatch(NilprogError):
    """Values disagree with the normal form extracted from them."""


class WeightViolation(NilprogError):
    """An extracted coefficient lies below its guaranteed filtration level."""


class CommutationUnsafe(NilprogError):
    """The element handed to a power decomposition is not deep enough."""


class DepthExceeded(NilprogError):
    """Subalgebra closure did not stabilize within the allowed depth."""


class ClosedFormMismatch(NilprogError):
    """Stepwise iteration disagrees with a registered closed form."""


class DomainViolation(NilprogError):
    """An orbit left the domain on which a torus map is single valued."""


class ConfigInvalid(NilprogError, ValueError):
    """A suite configuration is malformed or out of range."""
