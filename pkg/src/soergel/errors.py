"""Exception hierarchy shared by every layer of the engine."""

from __future__ import annotations


class SoergelError(Exception):
    """Base class for all engine errors."""


class ContextMismatch(SoergelError):
    pass


class NonzeroConstantTerm(SoergelError):
    pass


class NotDivisible(SoergelError):
    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"not divisible (fails at x-degree {degree})")


class NotAUnit(SoergelError):
    pass


class NonIntegral(SoergelError):
    """A computation over the integers produced a non-integral scalar."""


class TruncationTooLow(SoergelError):
    pass


class MissingParameter(SoergelError):
    pass


class IntegralBase(SoergelError):
    pass


class AxiomViolation(SoergelError):
    def __init__(self, axiom, degree):
        self.axiom = axiom
        self.degree = degree
        super().__init__(f"formal group law axiom '{axiom}' fails at x-degree {degree}")


class IndexOutOfRange(SoergelError):
    pass


class NotFree(SoergelError):
    pass


class NotEquivariant(SoergelError):
    def __init__(self, label, var, degree):
        self.label = label
        self.var = var
        self.degree = degree
        super().__init__(
            f"right action of x{var} not preserved on basis label {label} "
            f"(first difference at x-degree {degree})"
        )


class RankMismatch(SoergelError):
    pass


class UnsupportedTwist(SoergelError):
    pass


class VerificationFailed(SoergelError):
    def __init__(self, relation, degree=None, payload=None):
        self.relation = relation
        self.degree = degree
        self.payload = payload
        where = "" if degree is None else f" at x-degree {degree}"
        super().__init__(f"verification of '{relation}' failed{where}")


class NotInvertible(SoergelError):
    pass


class SquareDoesNotCommute(SoergelError):
    pass


class PivotNotInvertible(SoergelError):
    pass


class BrokenDifferential(SoergelError):
    pass


class ConfigError(SoergelError):
    pass


class ParseError(SoergelError):
    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} at position {position}")
