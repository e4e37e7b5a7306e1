"""Exception hierarchy shared by the modules of :mod:`tpntwin`."""


class TpnError(Exception):
    """Base class for every error raised by tpntwin."""


class NotEnabled(TpnError):
    pass


class NotFirable(TpnError):
    pass


class NotSynchronizable(TpnError):
    pass


class IdentifierCollision(TpnError):
    def __init__(self, clashes):
        self.clashes = sorted(clashes)
        super().__init__("identifiers used by both nets: " + ", ".join(self.clashes))


class UnknownVariable(TpnError, KeyError):
    pass


class NotCanonical(TpnError):
    pass


class InvalidPath(TpnError):
    pass


class TruncatedGraph(TpnError):
    pass


class NoObservables(TpnError):
    pass


class InconsistentSystem(TpnError):
    pass


class NetFormatError(TpnError, ValueError):
    """Problem in a ``.net`` source; carries the position when known."""

    def __init__(self, message, filename="<string>", line=None, column=None):
        self.message = message
        self.filename = filename
        self.line = line
        self.column = column
        where = filename
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


class NetSyntaxError(NetFormatError):
    pass


class NetSemanticError(NetFormatError):
    pass


class UnsupportedFeature(NetFormatError):
    pass
