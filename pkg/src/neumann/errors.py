"""Exception hierarchy shared by the library and the CLI."""


class NeumannError(Exception):
    """Base class for every error raised by this package."""


# ratpoly
class DegreeTooHigh(NeumannError, ValueError):
    pass


class DuplicatePole(NeumannError, ValueError):
    pass


class ZeroPolynomial(NeumannError, ValueError):
    pass


# phase
class InvalidPotential(NeumannError, ValueError):
    pass


class DuplicateEigenvalue(InvalidPotential):
    pass


class NonpositiveEigenvalue(InvalidPotential):
    pass


class EmptySpec(InvalidPotential):
    pass


class DimensionMismatch(NeumannError, ValueError):
    pass


class ZeroPosition(NeumannError, ValueError):
    pass


class ConstraintViolation(NeumannError, ValueError):
    """A phase point is off T*S^n.

    ``which`` names the constraint ("<q,q>=1" or "<q,p>=0") and ``magnitude``
    is the absolute violation.
    """

    def __init__(self, which, magnitude):
        self.which = which
        self.magnitude = magnitude
        super().__init__(f"constraint {which} violated by {magnitude}")


# laxflow / spectral
class FormViolation(NeumannError, ArithmeticError):
    pass


class FactorizationMismatch(NeumannError, ArithmeticError):
    def __init__(self, location, lhs, rhs):
        self.location = location
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(
            f"coefficient of lambda^{location[0]} mu^{location[1]}: "
            f"det(mu-L) has {lhs}, factored form has {rhs}"
        )


class ZeroBranchPolynomial(NeumannError, ValueError):
    pass


# dynamics
class IntegrationFailure(NeumannError, RuntimeError):
    pass


class MultiplierNoRealRoot(IntegrationFailure):
    """The position-constraint quadratic has no real root; reduce the step."""


# cli
class ConfigError(NeumannError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = f" (line {line})" if line is not None else ""
        where += f" (field {field})" if field is not None else ""
        super().__init__(message + where)


class SchemaError(ConfigError):
    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")
