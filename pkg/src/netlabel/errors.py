"""Exception hierarchy shared by every module."""


class NetlabelError(Exception):
    """Base class for all package errors."""


class InputError(NetlabelError, ValueError):
    """An argument violates an operation's precondition."""


class EmptyInputError(InputError):
    pass


class DensityTooLowError(InputError):
    """The requested density yields fewer than one edge per node (or none at all)."""


class UndefinedBiasError(InputError):
    """Network-label bias has no evaluable positive node."""


class ConfigError(NetlabelError):
    pass


class ParseError(NetlabelError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
