"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ElicitError(Exception):
    """Base class for all errors raised by this package."""


class InvalidEventError(ElicitError):
    """Event refers to atoms outside the sample space."""


class InvalidGambleError(ElicitError):
    """Gamble branches overlap, fail to cover the space, or are empty."""


class UtilityDomainError(ElicitError):
    """Money amount outside the utility function's domain."""


class UnknownOutcomeError(ElicitError):
    """Labeled outcome has no entry in the utility table."""


class MonotonicityViolationError(ElicitError):
    """Oracle answers contradict strict preference between the prize endpoints.

    Raised when the agent still prefers the binary gamble over the best prize
    for certain (or the worst prize over the gamble), which no consistent
    rank-dependent maximizer can do.
    """


class InconsistentAnswersError(ElicitError):
    """Measured decision weights violate strict monotonicity.

    The answering agent either is not a rank-dependent maximizer or answered
    with noise exceeding the measurement tolerance.
    """


class InvalidPartitionError(ElicitError):
    """The given events do not partition the sample space."""


class FairnessUnavailableError(ElicitError):
    """No candidate partition passed the fairness check for some denominator."""

    def __init__(self, denominators: list[int]):
        self.denominators = list(denominators)
        noun = "denominator" if len(self.denominators) == 1 else "denominators"
        super().__init__(
            f"no fair lottery found for {noun} " + ", ".join(map(str, self.denominators))
        )


class ReplayDivergenceError(ElicitError):
    """Replay produced a query that does not match the recorded transcript."""

    def __init__(self, step: int, reason: str):
        self.step = step
        super().__init__(f"replay diverged at step {step}: {reason}")


class SessionStateError(ElicitError):
    """Operation not allowed in the session's current state."""


class QueryMismatchError(ElicitError):
    """Submitted answer names a query id that is not the pending query."""


class SessionClosedError(ElicitError):
    """The live session was closed while a query was still pending."""


class AnswerTimeoutError(ElicitError):
    """No answer arrived within the configured timeout."""


class ConfigError(ElicitError):
    """Invalid experiment, agent, or session configuration."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")
