"""Exception hierarchy shared by every module."""


class StreamSubError(Exception):
    pass


class ParameterError(StreamSubError, ValueError):
    """Bad algorithm parameter (k < 1, v <= 0, epsilon outside (0, 1], ...)."""


class InputError(StreamSubError, ValueError):
    """Malformed instance data: bad ids, dimension mismatch, bad costs."""


class ParseError(InputError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class ValidationError(InputError):
    """Instance parsed fine but violates a mathematical requirement."""


class SizeError(StreamSubError, ValueError):
    """Brute-force routine asked to enumerate more than it is allowed to."""


class ContractError(StreamSubError, ValueError):
    """Caller broke a precondition (e.g. marginal of an element already in S)."""


class StreamError(StreamSubError, RuntimeError):
    """The element source misbehaved (duplicate ids)."""
