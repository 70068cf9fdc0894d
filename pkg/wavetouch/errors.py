# wavetouch/errors.py
"""
Exception hierarchy.

Library code raises these; only the command line turns them into exit codes.
"""


class WaveTouchError(ValueError):
    """Base class for every error raised by the toolkit."""

    exit_code = 1


class ConfigError(WaveTouchError):
    """Invalid configuration (chirp parameters, bands, flags, env vars)."""

    exit_code = 2


class InputError(WaveTouchError):
    """Invalid data handed to an operation."""

    exit_code = 1


class FitError(InputError):
    """The classifier cannot be trained on the given samples."""


class TrialFormatError(InputError):
    """A trial or model file could not be parsed."""

    def __init__(self, message: str, path=None, line: int = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
