"""Exception types shared across the toolkit.

Every error raised on a user-facing path derives from ToolkitError and
carries a short category used by the CLI to prefix its diagnostics.
"""


class ToolkitError(Exception):
    category = "error"


class ConfigError(ToolkitError):
    """Bad or inconsistent configuration (missing paths, invalid params)."""

    category = "config"


class DataError(ToolkitError):
    """Malformed or inconsistent input data."""

    category = "data"


class ConlluError(DataError):
    """CoNLL-U parse failure; message names file and line."""


class BracketError(DataError):
    """Bracketed-tree parse failure; message names line and offset."""


class EmbeddingError(DataError):
    """Embedding or dictionary file failure."""


class NumericError(ToolkitError):
    """Non-finite value produced by a kernel or a Gram computation."""

    category = "numeric"


class TrainingError(ToolkitError):
    """Training cannot proceed (degenerate labels and the like)."""

    category = "train"


class ModelError(ToolkitError):
    """Model file unreadable, wrong version, or incompatible with config."""

    category = "model"
