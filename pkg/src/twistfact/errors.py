"""Exception types raised by twistfact."""


class TwistfactError(Exception):
    """Base class for all package errors."""


class InvalidParameter(TwistfactError, ValueError):
    pass


class Unsupported(TwistfactError, NotImplementedError):
    pass


class PrecisionError(TwistfactError, ArithmeticError):
    """Working precision was exhausted before an answer was certified."""


class InfiniteValuation(TwistfactError, ArithmeticError):
    pass


class RecognitionFailure(TwistfactError, ArithmeticError):
    """Complex approximations could not be matched to an algebraic integer."""


class InternalArithmeticError(TwistfactError, ArithmeticError):
    pass


class AmbiguityError(TwistfactError, ValueError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class FixtureError(TwistfactError, ValueError):
    """Fixture data is missing or contradicts a checkable invariant."""


class WrongRoutine(TwistfactError, ValueError):
    pass


class ConsistencyError(TwistfactError, ArithmeticError):
    pass


class SearchRadiusError(TwistfactError, LookupError):
    pass


class NonIndependenceError(FixtureError):
    pass


class InconsistencyError(TwistfactError, ValueError):
    pass


class ConfigurationError(TwistfactError, ValueError):
    pass


class SchemaError(TwistfactError, ValueError):
    pass
