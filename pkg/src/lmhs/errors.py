"""Exception hierarchy. Every error carries a short machine-readable code."""

from __future__ import annotations


class LmhsError(Exception):
    code = "ERROR"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.context = context

    def to_json(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.context:
            out["context"] = {k: str(v) for k, v in sorted(self.context.items())}
        return out


class InputError(LmhsError):
    """Malformed or inconsistent input data."""

    code = "INPUT_ERROR"


class DimensionMismatch(InputError):
    code = "DIMENSION_MISMATCH"


class NotNilpotent(InputError):
    code = "NOT_NILPOTENT"


class NotInLieAlgebra(InputError):
    code = "NOT_IN_LIE_ALGEBRA"


class NonCommuting(InputError):
    code = "NON_COMMUTING"


class SingularMatrix(LmhsError):
    code = "SINGULAR"


class MathFailure(LmhsError):
    """A well-posed question whose answer is negative."""

    code = "MATH_FAILURE"


class ConeNotPure(MathFailure):
    code = "CONE_NOT_PURE"


class NotMHS(MathFailure):
    code = "NOT_MHS"


class WeightMismatch(MathFailure):
    code = "WEIGHT_MISMATCH"


class NoSolution(MathFailure):
    code = "NO_SOLUTION"


class NonUnique(MathFailure):
    code = "NON_UNIQUE"


class NotInCI(MathFailure):
    code = "NOT_IN_CI"


class NotUnipotentResidue(MathFailure):
    code = "NOT_UNIPOTENT_RESIDUE"


class NotInCell(MathFailure):
    code = "NOT_IN_CELL"


class XNotCentral(MathFailure):
    code = "X_NOT_CENTRAL"


class ClosureViolation(MathFailure):
    code = "CLOSURE_VIOLATION"


class NotInWt(MathFailure):
    code = "NOT_IN_WT"


class GammaNotUnipotentRadical(MathFailure):
    code = "GAMMA_NOT_UNIPOTENT_RADICAL"


class NonHermitian(MathFailure):
    code = "NON_HERMITIAN"


class NotRational(MathFailure):
    code = "NOT_RATIONAL"
