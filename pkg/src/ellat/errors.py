"""Exception hierarchy shared by all modules."""


class EllatError(Exception):
    """Base class for every error raised by the library."""


class ParseError(EllatError):
    def __init__(self, message: str, position: int = -1, expected=()):
        self.position = position
        self.expected = tuple(expected)
        detail = message
        if position >= 0:
            detail = f"{message} at position {position}"
        if self.expected:
            detail += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(detail)


class UnknownNameError(EllatError):
    pass


class BottomError(EllatError):
    """An operation that is undefined for the unsatisfiable concept got one."""


class NotCycleRestrictedError(EllatError):
    pass


class CyclicDefinitionError(EllatError):
    pass


class BudgetExceeded(EllatError):
    """A resource limit was hit. Never a wrong answer, just no answer."""
