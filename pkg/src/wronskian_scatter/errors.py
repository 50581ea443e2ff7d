"""Exception hierarchy.

Every domain failure derives from :class:`ScatterError`.  Errors that a scan
records instead of aborting carry a ``status`` tag matching the CLI's status
column.
"""


class ScatterError(Exception):
    status = "error"


class InvalidParams(ScatterError, ValueError):
    pass


class InvalidInput(ScatterError, ValueError):
    pass


class ParseError(ScatterError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class InvalidGrid(ParseError):
    pass


class TailMismatch(ParseError):
    pass


class NumericalOverflow(ScatterError, ArithmeticError):
    status = "overflow"


class EmptySide(ScatterError):
    pass


class NoPlateau(ScatterError):
    status = "no_plateau"

    def __init__(self, message, side=None, series=None):
        self.side = side
        self.series = series
        super().__init__(message)


class DeterminantDrift(ScatterError):
    status = "no_plateau"


class ZeroIncident(ScatterError):
    pass


class EvanescentChannel(ScatterError, ValueError):
    status = "evanescent"


class AllPointsFailed(ScatterError):
    pass


class BracketLost(ScatterError):
    def __init__(self, message, bracket=None):
        self.bracket = bracket
        super().__init__(message)
