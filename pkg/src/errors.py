"""
Halin Weight Certifier - Error Types

CONTEXT:
Every failure raised by the library derives from CertifierError. The CLI maps
the subclasses onto its stable exit codes:

- InputError       -> exit 2 (malformed input or violated precondition)
- ScaleGuardError  -> exit 3 (instance too large for an exhaustive oracle)
- ConsistencyError -> exit 1 (a proven identity failed: bug signal)

FallbackNeeded never escapes `certify`; it tells the dispatcher that a
constructive path could not finish and the exhaustive search must take over.
"""


class CertifierError(Exception):
    """Base class for all certifier failures."""


class InputError(CertifierError, ValueError):
    """Malformed input or a violated operation precondition."""


class ScaleGuardError(CertifierError):
    """An exhaustive oracle was asked to run above its size guard."""

    def __init__(self, what: str, size: int, limit: int):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: size {size} exceeds guard {limit}")


class ConsistencyError(CertifierError):
    """An internal identity that must hold did not."""


class FallbackNeeded(CertifierError):
    """A constructive certificate path could not be completed."""
