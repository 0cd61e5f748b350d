"""Exception hierarchy shared by all subpackages."""


class PdbError(Exception):
    """Base class for every error raised by pdbrep."""


class FormulaSyntaxError(PdbError):
    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


class SchemaError(PdbError):
    """Unknown relation, arity mismatch or malformed schema."""


class ModelError(PdbError):
    """Ill-formed probabilistic database (range violation, duplicate fact, ...)."""


class GuardExceeded(PdbError):
    """An enumeration would exceed the configured world budget."""


class NullEventError(PdbError):
    """Conditioning on an event of probability zero."""


class NotApplicable(PdbError):
    """A bound or construction does not apply to the given input."""
