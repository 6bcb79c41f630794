"""Exception hierarchy for cyclic_relclass.

Domain errors come from bad input and map to CLI exit code 2.
Internal inconsistencies mean an exactness check failed (a bug, or a
falsified identity) and map to exit code 1.

Every constructor takes the message first so instances survive the
round trip through a process pool.
"""

from typing import Optional


class RelclassError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


# Domain errors

class DomainError(RelclassError, ValueError):
    exit_code = 2


class NonUnit(DomainError):
    pass


class DegreeMismatch(DomainError):
    pass


class InvalidAutomorphism(DomainError):
    pass


class MalformedInput(DomainError):
    pass


class NoSuchField(DomainError):
    pass


class InvalidPrime(DomainError):
    pass


class UnknownFormat(DomainError):
    pass


class ConfigError(DomainError):
    pass


# Internal inconsistencies

class InternalInconsistency(RelclassError, ArithmeticError):
    exit_code = 1


class NotDivisible(InternalInconsistency):
    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index

    def __reduce__(self):
        return (type(self), (self.args[0], self.index))


class NonIntegralResult(InternalInconsistency):
    pass


class ZeroLValue(InternalInconsistency):
    pass


class OracleMismatch(InternalInconsistency):
    pass


class FactorizationIncomplete(InternalInconsistency):
    pass


class FieldFailure(InternalInconsistency):
    """An exactness failure tagged with the field it happened on."""

    def __init__(self, message: str, conductor: Optional[int] = None,
                 degree: Optional[int] = None, label: Optional[str] = None):
        super().__init__(message)
        self.conductor = conductor
        self.degree = degree
        self.label = label

    def __reduce__(self):
        return (type(self), (self.args[0], self.conductor, self.degree, self.label))


class CacheCorrupted(RelclassError, RuntimeError):
    exit_code = 1
