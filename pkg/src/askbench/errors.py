"""Exception types shared across the package."""


class BenchError(Exception):
    """Base class for all askbench errors."""


class SpecError(BenchError):
    """A task, space, plan or parameter definition is invalid."""


class DomainError(BenchError):
    """An input lies outside the domain an operation is defined on."""


class FidelityError(DomainError):
    """A fidelity value lies outside the task's budget range."""


class ProtocolError(BenchError):
    """The ask/tell contract was violated (unknown or double tell)."""


class BudgetExhausted(BenchError):
    """Signal raised by ask() once the trial budget is spent."""


class CapacityError(BenchError):
    """An exact computation would exceed its size guard."""


class CompletenessError(BenchError):
    """A (task, optimizer, seed) grid has missing cells."""


class RecordParseError(BenchError):
    """A run-record file is malformed; the message names the line."""
