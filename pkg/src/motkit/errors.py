"""Exception hierarchy.

``HypothesisViolation`` marks inputs that legitimately fail a hypothesis of the
construction (the CLI maps it to exit code 2); ``VerificationError`` means a
computed result failed its own postcondition (exit code 1).
"""


class MotkitError(Exception):
    pass


class HypothesisViolation(MotkitError):
    pass


class StructureError(HypothesisViolation):
    """A split Chow structure failed validation."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ModelFormatError(HypothesisViolation):
    """Malformed model or run-config file; message carries the location."""


class VerificationError(MotkitError):
    pass
