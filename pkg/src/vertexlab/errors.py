"""Exception types raised across the package."""


class VertexLabError(Exception):
    pass


class CutoffExceeded(VertexLabError):
    """A requested state or operation lies above the instance weight cutoff."""


class JetOrderInsufficient(VertexLabError):
    """A Taylor jet longer than the configured jet order was required."""


class DeltaPreconditionViolated(VertexLabError):
    def __init__(self, condition, witness=None):
        self.condition = condition
        self.witness = witness
        super().__init__(f"{condition}" + (f" (witness: {witness})" if witness is not None else ""))


class NonIntegralEigenvalue(DeltaPreconditionViolated):
    pass


class NotLocallyNilpotent(VertexLabError):
    pass


class CommutativityUnverified(VertexLabError):
    pass


class DeltaUnverified(VertexLabError):
    pass


class NotSemisimple(VertexLabError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class NonIntegralExponent(VertexLabError):
    pass


class UnknownSymbol(VertexLabError):
    pass


class ConfigError(VertexLabError):
    pass


class ParseError(SyntaxError):
    """Syntax error in a scalar or vector expression; ``position`` is a 0-based offset."""

    def __init__(self, message, text="", position=0):
        self.position = position
        self.source = text
        super().__init__(f"{message} at position {position}: {text!r}")
