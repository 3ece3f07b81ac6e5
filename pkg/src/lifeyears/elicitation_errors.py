"""Errors raised by the elicitation state machine."""


class BadBracketError(ValueError):
    """The search bracket is empty or outside the legal range."""


class InvalidQualityWeightError(ValueError):
    """A mixing-weight session needs a quality weight in (0, 1]."""


class SessionFinishedError(RuntimeError):
    """The session has already converged or been marked inconsistent."""


class NotConvergedError(RuntimeError):
    """No estimate exists before the session converges."""


class UnsupportedTruthFamilyError(ValueError):
    """Simulated respondents are defined for the QALY-PALY mix only."""


class EmptyInputError(ValueError):
    """An aggregate needs at least one estimate."""
