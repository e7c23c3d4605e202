"""Exception types shared by all modules."""


class CircUnitsError(Exception):
    pass


class InvalidInput(CircUnitsError, ValueError):
    pass


class Unsupported(CircUnitsError):
    pass


class ResourceLimitError(CircUnitsError):
    pass


class Unresolved(CircUnitsError):
    """Exact verification refuted a numerically suggested relation."""

    def __init__(self, message, vector=None):
        super().__init__(message)
        self.vector = vector


class InternalConsistencyError(CircUnitsError):
    pass
