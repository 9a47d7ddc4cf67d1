"""Exception taxonomy for the scorer service."""


class ServiceError(Exception):
    """Base class for all scorer-service errors."""


class DataError(ServiceError):
    """Bad training data or artifact contents."""


class RequestError(ServiceError):
    """Malformed scoring request; reported to the caller, never a crash."""
