"""Exception hierarchy shared by every stage of the pipeline."""


class StalError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(StalError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class UndeclaredNameError(ParseError):
    pass


class ArityError(ParseError):
    pass


class AlgebraError(StalError):
    """Raised when algebra data is malformed or two algebras are mixed."""


class DualMissingError(StalError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"cyclic defined concept {name!r} has no dual in the TBox")


class TBoxError(StalError):
    """A TBox failed the weak-cyclicity restrictions."""

    def __init__(self, message, axioms=()):
        self.axioms = tuple(axioms)
        super().__init__(message)


class ExpansionError(StalError):
    """Acyclic expansion re-entered a name it was already expanding."""


class NameCollisionError(StalError):
    pass


class WeaknessError(StalError):
    """A built automaton violates the partial-order property."""


class InstanceTooLargeError(StalError):
    pass
