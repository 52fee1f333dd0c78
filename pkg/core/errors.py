"""
Exception types shared by the core modules and the CLI.
"""


class SymMatchError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SymMatchError, ValueError):
    """Invalid input: out-of-range indices, mismatched groups, malformed files."""


class InfeasibleError(SymMatchError):
    """No perfect matching exists up to the largest tested threshold."""

    def __init__(self, message: str, largest_tested=None):
        super().__init__(message)
        self.largest_tested = largest_tested
