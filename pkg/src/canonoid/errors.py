"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` so front ends can
report failures without parsing messages.
"""


class CanonoidError(Exception):
    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"code": self.code, "message": str(self)}
        out.update({k: v for k, v in self.details.items() if v is not None})
        return out


class SpaceMismatch(CanonoidError):
    code = "space_mismatch"


class DimensionError(CanonoidError):
    code = "dimension_mismatch"


class WrongDegree(CanonoidError):
    code = "wrong_degree"


class ContractScalar(CanonoidError):
    code = "contract_scalar"


class NotInvertible(CanonoidError):
    """A PolyMap whose claimed inverse does not compose to the identity."""

    code = "not_invertible"


class NonconstantOmega(CanonoidError):
    code = "nonconstant_omega"


class DegenerateOmega(CanonoidError):
    code = "degenerate_omega"


class PostconditionFailed(CanonoidError):
    code = "postcondition_failed"


class IterationBudgetExceeded(CanonoidError):
    code = "iteration_budget_exceeded"


class InternalInconsistency(CanonoidError):
    """Two independent computation routes disagreed. Always a bug."""

    code = "internal_inconsistency"


class DegreeMismatch(CanonoidError):
    code = "degree_mismatch"


class NotCanonoid(CanonoidError):
    code = "not_canonoid"


class GaugeNotFixed(CanonoidError):
    code = "gauge_not_fixed"


class NotDecomposition(CanonoidError):
    code = "not_decomposition"


# front-end errors

class ParseError(CanonoidError):
    code = "syntax_error"

    def __init__(self, message="", line=None, column=None, **details):
        super().__init__(message, line=line, column=column, **details)
        self.line = line
        self.column = column

    def __str__(self):
        msg = super().__str__()
        if self.line is not None:
            return f"line {self.line}, col {self.column}: {msg}"
        return msg


class UnknownIdentifier(ParseError):
    code = "unknown_identifier"


class UnknownBinding(ParseError):
    code = "unknown_binding"


class TypeMismatch(ParseError):
    code = "type_mismatch"


class ParseDimensionError(ParseError):
    code = "dimension_mismatch"


class UsageError(ParseError):
    code = "usage_error"


class NotSymplectic(ParseError):
    code = "not_symplectic"


class LimitExceeded(ParseError):
    """Input would blow past a fixed size limit (nesting, exponent, degree)."""

    code = "limit_exceeded"
