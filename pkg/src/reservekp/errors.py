"""Exception hierarchy shared by every module of the package."""


class ReserveKPError(Exception):
    """Base class for all errors raised by reservekp."""


class SizeOutOfRange(ReserveKPError, ValueError):
    def __init__(self, index, value):
        super().__init__(f"item {index} has size {value}, expected 0 < size <= 1")
        self.index = index
        self.value = value


class CapacityExceeded(ReserveKPError):
    pass


class AlreadyStopped(ReserveKPError):
    pass


class InvalidAction(ReserveKPError):
    """An action that is not legal in the current state (e.g. a bogus selection)."""


class PolicyFault(ReserveKPError):
    """A policy produced an illegal action. This is a bug in the policy, not the input."""


class InputTooLarge(ReserveKPError, ValueError):
    pass


class OutOfDomain(ReserveKPError, ValueError):
    pass


class OutOfRange(OutOfDomain):
    pass


class DeltaOutOfRange(OutOfDomain):
    pass


class PrecisionExhausted(ReserveKPError, ArithmeticError):
    """Two enclosures still overlap at the finest precision we are willing to use."""


class NotApplicable(ReserveKPError):
    pass
