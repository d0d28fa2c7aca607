class QkzException(Exception):
    pass


class PoleError(QkzException):
    pass


class DomainError(QkzException):
    pass


class DivergentIntegralError(QkzException):
    pass


class NoConvergenceError(QkzException):
    pass


class ClassViolationError(QkzException):
    pass


class GenericityError(QkzException):
    pass


class ShapeError(QkzException):
    pass


class FitError(QkzException):
    pass


class ConfigError(QkzException):
    pass


class IoError(QkzException):
    pass


class ConditioningWarning(UserWarning):
    pass
