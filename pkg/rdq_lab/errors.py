"""Custom exception classes for RDQ Lab."""

from typing import List, Optional, Tuple


class LabBaseError(Exception):
    """Base class for all custom exceptions in RDQ Lab."""

    pass


class ConfigurationError(LabBaseError):
    """Raised when a configuration file, level layout or novelty kind is invalid."""

    pass


class UsageError(LabBaseError):
    """Raised when an operation is called outside its contract.

    Examples: stepping a terminal state, asking for the region of a zero
    offset, or feeding a vector of the wrong size to a network.
    """

    pass


class RuleFileError(LabBaseError):
    """
    Raised when a rule file cannot be parsed.

    Carries every rejected line as a ``(line_number, reason)`` pair so a
    human editing the file sees all problems at once.
    """

    def __init__(self, path: str, diagnostics: List[Tuple[int, str]]):
        self.path = path
        self.diagnostics = diagnostics
        lines = "\n".join(f"  • line {no}: {reason}" for no, reason in diagnostics)
        super().__init__(f"Rule file '{path}' has {len(diagnostics)} invalid line(s):\n{lines}")


class TrainingError(LabBaseError):
    """
    Raised when optimization produces non-finite losses or gradients.
    """

    def __init__(
        self,
        message: str,
        step: Optional[int] = None,
        checkpoint_path: Optional[str] = None,
    ):
        self.detail = message
        self.step = step
        self.checkpoint_path = checkpoint_path

        full_msg = "Training error"
        if step is not None:
            full_msg += f" (step: {step})"
        full_msg += f": {message}"
        if checkpoint_path:
            full_msg += f" (diagnostic checkpoint: {checkpoint_path})"
        super().__init__(full_msg)


class ShieldViolationError(LabBaseError):
    """Raised when the shield returns an action forbidden by the active rules."""

    def __init__(self, action_name: str, safe_names: List[str]):
        message = (
            f"Shield returned unsafe action '{action_name}' while safe actions "
            f"{safe_names} were available."
        )
        super().__init__(message)


class CheckpointError(LabBaseError):
    """Raised when a checkpoint cannot be read or does not match the configuration."""

    pass
