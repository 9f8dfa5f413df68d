"""Typed failures raised by the algebra, consistency and solver layers."""


class CspError(Exception):
    pass


class FormatError(CspError):
    """Malformed input file or CLI payload."""


class NotACongruence(CspError):
    pass


class NotASubuniverse(CspError):
    pass


class EmptySubuniverse(CspError):
    pass


class EmptyDomain(CspError):
    pass


class Cd3Violation(CspError):
    """The designated ternary pair does not satisfy the required identities."""


class NotCd3(Cd3Violation):
    """An instance domain failed the ternary-pair check at ingestion."""


class NotAnIdeal(CspError):
    pass


class NotSubdirect(CspError):
    pass


class InvarianceViolation(CspError):
    """A constraint relation is not preserved by the domain operations."""


class LemmaViolation(CspError):
    """A theorem-guaranteed shape failed to hold; input or pipeline is bad."""
