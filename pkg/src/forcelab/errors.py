"""Exception hierarchy shared by every forcelab module."""


class LabError(Exception):
    pass


class ArityError(LabError, ValueError):
    """Operands disagree on the number of input variables or string lengths."""


class WrongKindError(LabError, TypeError):
    pass


class ScaleError(LabError):
    """A request exceeds the configured desk-scale limits."""


class BudgetExceeded(LabError):
    pass


class FormatError(LabError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(LabError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class UnboundVariableError(ParseError):
    pass


class ClassError(LabError, ValueError):
    """A formula is outside the class an operation requires."""


class InconsistentSetError(LabError):
    pass


class ProofError(LabError):
    """A proof line failed verification."""

    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class UnresolvedError(LabError):
    """A randomized circuit falls in the threshold gap at some assignment."""

    def __init__(self, assignment, message=None):
        self.assignment = tuple(assignment)
        bits = "".join(map(str, self.assignment))
        super().__init__(message or f"eval_R undefined at assignment {bits}")
