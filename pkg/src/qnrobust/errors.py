"""Exception hierarchy shared by the library and the CLI."""


class QNRobustError(Exception):
    """Base class for all library errors."""


class DataError(QNRobustError, ValueError):
    """Input data (graph, config, node ids) is invalid."""


class GraphFormatError(DataError):
    """A graph file could not be parsed.

    ``line`` is 1-based; ``field`` names the offending token when known.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class ConfigError(DataError):
    """A sweep configuration failed validation."""


class NumericalError(QNRobustError, ArithmeticError):
    """A quantity is mathematically undefined for the given input."""
