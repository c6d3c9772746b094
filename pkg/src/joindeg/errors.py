"""Exception hierarchy.

Every error raised by the library derives from :class:`JoinDegError`, so callers
(and the report assembler) can catch one type and record ``type(err).__name__``.
"""


class JoinDegError(Exception):
    """Base class for all library errors."""


# exact_fields
class DivisionByZero(JoinDegError, ZeroDivisionError):
    pass


class MixedFields(JoinDegError, TypeError):
    pass


class ExhaustedField(JoinDegError):
    pass


class NotPrime(JoinDegError, ValueError):
    pass


# poly
class ArityMismatch(JoinDegError, ValueError):
    pass


class BothZero(JoinDegError, ValueError):
    pass


class ZeroPolynomial(JoinDegError, ValueError):
    pass


class BothConstant(JoinDegError, ValueError):
    pass


class SingularMatrix(JoinDegError, ValueError):
    pass


class PolynomialSyntaxError(JoinDegError, ValueError):
    pass


class NotHomogeneous(JoinDegError, ValueError):
    pass


class DegreeCapExceeded(JoinDegError, ValueError):
    pass


# bivar_solver
class NotZeroDimensional(JoinDegError):
    pass


class ShearDisagreement(JoinDegError):
    pass


# proj_geom
class CoincidentPoints(JoinDegError, ValueError):
    pass


class AmbientMismatch(JoinDegError, ValueError):
    pass


class CenterPoint(JoinDegError, ValueError):
    pass


class ZeroVector(JoinDegError, ValueError):
    pass


# variety
class BasePointFound(JoinDegError):
    pass


class NonBirationalParam(JoinDegError):
    pass


class DegenerateForms(JoinDegError):
    pass


class SingularParameter(JoinDegError):
    pass


class LineInsideVariety(JoinDegError):
    pass


class PositiveDimensionalSection(JoinDegError):
    pass


# join_engine
class InvalidInstance(JoinDegError, ValueError):
    pass


class PreconditionError(JoinDegError):
    pass


class CoincidentSample(JoinDegError):
    pass


class GeneralPositionUncertain(JoinDegError):
    pass


class TrialDisagreement(JoinDegError):
    pass


class ChartFailure(JoinDegError):
    pass


class JoinDefective(JoinDegError):
    pass


class NonIntegralRatio(JoinDegError):
    pass


class CensusIdentityViolation(JoinDegError):
    pass


class OracleInconclusive(JoinDegError):
    pass


class CheckFailure(JoinDegError):
    pass


class ZeroWeights(JoinDegError, ValueError):
    pass


# ff_oracle
class FieldMismatch(JoinDegError):
    pass


class EnumerationBudgetExceeded(JoinDegError):
    pass


class NoJoinLineThroughZ(JoinDegError):
    pass
