class BigSslException(Exception):
    pass


class InvalidInputError(BigSslException, ValueError):
    pass


class NumericalAccuracyError(BigSslException):
    pass


class ResourceLimitError(BigSslException):
    pass


class UndefinedBandwidthError(BigSslException):
    pass


class InfeasibleCutoffError(BigSslException):
    pass


class DisconnectedGraphError(BigSslException):
    pass


class VariantInconsistencyError(BigSslException):
    pass


class EmptyStatsError(BigSslException):
    pass
