"""Exception taxonomy shared across the package.

Decryption failures (the crypto bottom) are kept distinct from
input-validation problems so that callers -- in particular the CLI's exit
codes -- can tell a malformed artifact from a legitimate crypto rejection.
"""


class BlindTmError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(BlindTmError):
    """An artifact, parameter set, or argument failed validation."""


class FingerprintError(ValidationError):
    """Two artifacts disagree on their group-parameter fingerprint."""


class GenerationError(BlindTmError):
    """A randomized search (parameters, hash-to-group) exceeded its cap."""


class DecryptionError(BlindTmError):
    """A ciphertext was rejected (tag check, commitment mismatch, parse)."""


class TmParseError(ValidationError):
    """Machine description text failed to parse; carries a line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TmRunError(BlindTmError):
    """A plaintext machine run failed (e.g. stepping a halted machine)."""


class TmStuckError(TmRunError):
    """No transition is defined for the current (state, symbol) pair."""


class BlindRunError(BlindTmError):
    """The encrypted executor failed; messages never include plaintext."""
