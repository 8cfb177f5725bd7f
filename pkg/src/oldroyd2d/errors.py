"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Raised when fields or arrays do not live on the expected grid."""


class PartitionValidationError(ValueError):
    """Raised when a dyadic partition fails its partition-of-unity checks."""


class UnsupportedConfigurationError(ValueError):
    """Raised when an operation is asked to run outside its supported regime."""


class BlowUpError(RuntimeError):
    """Raised when a simulation leaves the resolvable range.

    Carries the last valid time and whatever diagnostics were recorded up to
    that point, so a caller can persist the partial trajectory.
    """

    def __init__(self, message, time=None, records=None, state=None, metadata=None):
        super().__init__(message)
        self.time = time
        self.records = records if records is not None else []
        self.state = state
        self.metadata = metadata
