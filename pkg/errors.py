"""Exception hierarchy shared by every package.

Argument errors on library operations are plain ``ValueError``; the classes
here cover the failures the command line maps to distinct exit codes.
"""


class EquiInvError(Exception):
    """Base class for all project errors"""


class ConfigError(EquiInvError, ValueError):
    """Invalid configuration key, value or preset name"""


class DataFormatError(EquiInvError):
    """Malformed dataset file or inconsistent dataset"""

    def __init__(self, message: str, offset: int = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class CheckpointError(EquiInvError):
    """Base class for checkpoint failures"""


class CheckpointVersionError(CheckpointError):
    """Checkpoint written by an incompatible format version"""


class CheckpointShapeError(CheckpointError):
    """Checkpoint tensors do not match the model configuration"""


class CheckpointIOError(CheckpointError):
    """Checkpoint could not be read or written, or is truncated"""


class NumericAbortError(EquiInvError):
    """Training produced a non-finite loss"""

    def __init__(self, message: str, dump_path: str = None):
        super().__init__(message)
        self.dump_path = dump_path
