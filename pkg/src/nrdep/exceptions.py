"""Exception hierarchy. Every error raised on bad input derives from ``NrdepError``."""


class NrdepError(ValueError):
    pass


class RowCountMismatch(NrdepError):
    pass


class NonFiniteValue(NrdepError):
    pass


class TooFewSamples(NrdepError):
    pass


class DegenerateView(NrdepError):
    """A view whose samples are all identical, so no bandwidth can be derived."""


class DimensionMismatch(NrdepError):
    pass


class LengthMismatch(NrdepError):
    pass


class ZeroVector(NrdepError):
    pass


class RankDeficiency(NrdepError):
    pass


class KTooLarge(NrdepError):
    pass


class ParseError(NrdepError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class RaggedRows(ParseError):
    pass
