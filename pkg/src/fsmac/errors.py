"""Exception hierarchy shared by all fsmac modules."""


class FsMacError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(FsMacError, ValueError):
    """A model, policy or parameter set violates its invariants."""


class NonStochasticRow(ValidationError):
    pass


class NegativeProbability(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class EnumerationLimitExceeded(ValidationError):
    pass


class InvalidDistribution(ValidationError):
    pass


class AxisOverlap(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class ScenarioMismatch(ValidationError):
    pass


class ParseError(ValidationError):
    """A channel file is malformed or does not follow the schema."""


class SchemaVersionMismatch(ParseError):
    pass


class ConsistencyError(FsMacError, ArithmeticError):
    """A numerical result is off by more than floating-point noise."""


class OracleBudgetExceeded(FsMacError):
    pass


class BudgetExceeded(FsMacError):
    pass


class VerificationFailed(FsMacError):
    def __init__(self, report):
        super().__init__(report.to_text())
        self.report = report


class NotConverged(RuntimeWarning):
    """Emitted (as a warning) when an ascent hits its iteration cap."""


class NonFinitePoint(ValidationError):
    pass


class ZeroProbabilitySequence(FsMacError):
    """A sequence hits a zero-probability cell; decoders treat it as atypical."""
