"""Exception types shared across the package."""


class DraftlabError(Exception):
    """Base class for all package errors."""


class CatalogError(DraftlabError):
    """Malformed champion catalog (dimension mismatch, duplicates, degenerate data)."""


class UnknownChampionError(DraftlabError):
    """A champion id is not present in the similarity space."""


class UnusableHistoryError(DraftlabError):
    """A player history is empty or otherwise unusable for metric computation."""


class IllegalActionError(DraftlabError):
    """A draft action is not legal in the current state."""


class TrainingError(DraftlabError):
    """Win-model training cannot proceed (single class, too few rows, non-convergence)."""


class DataError(DraftlabError):
    """Corpus or artifact files are missing, malformed, or version-incompatible."""


class ProviderError(DraftlabError):
    """Match-history provider failure (auth, rate-limit exhaustion)."""
