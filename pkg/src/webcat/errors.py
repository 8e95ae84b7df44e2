"""Error types shared across modules.  Each carries a stable code for the CLI."""
from __future__ import annotations


class WebcatError(Exception):
    code = "error"

    def __init__(self, message: str = "", location=None):
        super().__init__(message)
        self.message = message
        self.location = location

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "location": self.location}


class TypeMismatch(WebcatError):
    code = "type_mismatch"


class SingularMatrix(WebcatError):
    code = "singular_matrix"


class UndefinedAtQ(WebcatError):
    code = "undefined_at_q"


class DimensionCap(WebcatError):
    code = "dimension_cap"


class TraceConditionFailed(WebcatError):
    code = "trace_condition_failed"


class UnpairedEigenvalues(WebcatError):
    code = "unpaired_eigenvalues"


class NoSolution(WebcatError):
    code = "no_solution"


class BadDims(WebcatError):
    code = "bad_dims"


class IrrationalSingularPoint(WebcatError):
    code = "irrational_singular_point"


class Inconclusive(WebcatError):
    code = "inconclusive"


class UnsupportedExact(WebcatError):
    code = "unsupported_exact"
