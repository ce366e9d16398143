"""Exception hierarchy shared by every module."""


class CdmError(Exception):
    """Base class for all library errors."""


class ParamError(CdmError, ValueError):
    """Invalid primes, labels, or mismatched parameter sets."""


class LabelError(CdmError, KeyError):
    """A vertex, edge, or extra label that does not exist."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown label"


class BudgetError(CdmError):
    """A computation would exceed its configured size guard."""


class ContractError(CdmError, ValueError):
    """A precondition of an operation was violated."""


class ClosureError(CdmError):
    """A lattice operation left the declared subgroup family."""


class ParseError(CdmError, ValueError):
    """Malformed graph text or formula text.

    ``line`` is 1-based for graph files; ``pos`` is a 0-based character
    offset for formulas.
    """

    def __init__(self, message, line=None, pos=None):
        self.message = message
        self.line = line
        self.pos = pos
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif pos is not None:
            where = f"position {pos}: "
        super().__init__(where + message)
