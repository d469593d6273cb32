"""Exception hierarchy.

Every error carries a CLI exit code so the command-line front end can map
failures to its documented codes without a lookup table.
"""

from __future__ import annotations


class PersilatError(Exception):
    exit_code = 1


class InputError(PersilatError):
    """Malformed or inconsistent user input (exit code 1)."""

    def __init__(self, message: str, *, where: str | None = None):
        self.where = where
        super().__init__(f"{message} [{where}]" if where else message)


class SchemaError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class PrimeMismatch(InputError):
    pass


class CycleDetected(InputError):
    pass


class DisconnectedDiagram(InputError):
    pass


class NonCommutativeDiagram(InputError):
    pass


class MutualReachabilityWithoutIso(InputError):
    pass


class UnknownElement(InputError):
    pass


class FaceClosureError(InputError):
    pass


class DuplicateSimplex(InputError):
    pass


class UnassignedVariable(InputError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable {name!r} has no assigned value")


class FormulaSyntaxError(InputError):
    pass


class NoSolution(PersilatError):
    """The right-hand side lies outside the image of the matrix."""


class NoCommonTarget(PersilatError):
    pass


class NoCommonSource(PersilatError):
    pass


class NonDistributiveLattice(PersilatError):
    exit_code = 2

    def __init__(self, message: str, witness: tuple | None = None):
        self.witness = witness
        super().__init__(message)


class BudgetExceeded(PersilatError):
    exit_code = 3


class VarBudgetExceeded(BudgetExceeded):
    pass


class InternalCheckFailure(PersilatError):
    exit_code = 4
