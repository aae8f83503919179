"""Shared exception types.

Exit-code mapping in the CLI: ContractError -> 1, ParseError/OSError -> 2.
"""


class ContractError(ValueError):
    """An operation was called outside its contract (bad shape, bad value)."""


class ParseError(ValueError):
    """A resource or input file is malformed.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateConstellationError(ContractError):
    """All encoder outputs collapsed to one point; normalization undefined."""


class CheckpointError(ValueError):
    """Checkpoint file is unreadable, version-mismatched, or inconsistent."""


class TrainingDivergedError(RuntimeError):
    """Loss or gradients became non-finite during training."""
