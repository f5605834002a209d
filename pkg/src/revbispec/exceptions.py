"""Exception types raised by revbispec."""


class InsufficientLengthError(ValueError):
    """The series is too short for the requested lags or estimation plan."""


class GridTooCoarseError(ValueError):
    """The frequency grid cannot resolve the requested quadrature exactly."""


class InsufficientGridError(ValueError):
    """Too few valid grid points remain after masking."""


class InternalInconsistencyError(RuntimeError):
    """Two independent verdict pathways contradicted each other."""


class ModelFileError(ValueError):
    """A model description could not be parsed.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(self, message, key=None, line=None, column=None):
        self.key = key
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(f"{message}{where}")
