"""Exception hierarchy.

Every error raised by the library derives from :class:`SpanError`, which is a
``ValueError`` so that callers who only care about "bad input" can catch that.
The optional ``field`` names the offending argument, leg or file field; the CLI
uses it in diagnostics.
"""


class SpanError(ValueError):
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def __str__(self):
        msg = super().__str__()
        if self.field is not None:
            return f"{self.field}: {msg}"
        return msg


class OutOfRange(SpanError):
    pass


class LengthMismatch(SpanError):
    pass


class DomainMismatch(SpanError):
    pass


class SpaceMismatch(SpanError):
    pass


class ShapeMismatch(SpanError):
    pass


class InvalidSize(SpanError):
    pass


class FilterTooLarge(SpanError):
    pass


class InvalidTrials(SpanError):
    pass
