"""Exception hierarchy shared across the harness.

The CLI maps these onto exit codes: usage problems exit 1, data problems
(unreadable or malformed inputs) exit 2, runtime failures exit 3.
"""


class MirthError(Exception):
    """Base class for harness failures."""


class DataError(MirthError):
    """Malformed or inconsistent input data (files, schemas, corpora)."""


class TrainingDiverged(MirthError):
    """A training run produced a non-finite loss and was aborted."""
