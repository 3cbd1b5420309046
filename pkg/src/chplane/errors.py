"""Exception types raised across the toolkit.

Every error that callers are expected to catch lives here so that the
pipeline driver can distinguish per-item failures (skip and log) from
fatal configuration problems.
"""


class ChplaneError(Exception):
    """Base class for all toolkit errors."""


# --- image decoding / manifests -------------------------------------------

class DecodeError(ChplaneError):
    """Image byte stream is malformed or truncated."""


class UnsupportedFormat(ChplaneError):
    """Image stream is valid but not PNG or JPEG."""


class ManifestError(ChplaneError):
    """Malformed manifest row; carries the 1-based row number."""

    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")


# --- ordinal-pattern analysis ----------------------------------------------

class MatrixTooSmall(ChplaneError):
    """Matrix cannot hold a single embedding window."""


class LengthMismatch(ChplaneError):
    """Two vectors that must be conformable are not."""


# --- SIFT -------------------------------------------------------------------

class ImageTooSmall(ChplaneError):
    """Image below the 16x16 minimum for keypoint detection."""


# --- embeddings / similarity -------------------------------------------------

class InsufficientRows(ChplaneError):
    """Not enough rows to fit the requested number of components."""


class DimensionMismatch(ChplaneError):
    """Feature dimensions disagree with the fitted model."""


class ZeroVector(ChplaneError):
    """Cosine similarity is undefined for an all-zero vector."""


class TooFewItems(ChplaneError):
    """Fewer than two items after subsampling."""


class NotEnoughRecords(ChplaneError):
    """Requested subsample exceeds the population."""


# --- C-H atlas ----------------------------------------------------------------

class BadGridSpec(ChplaneError):
    """Non-positive bin steps or inverted ranges."""


class DegenerateCovariance(ChplaneError):
    """Covariance matrix is singular; no ellipse exists."""


class TooFewYears(ChplaneError):
    """A trajectory needs at least two years."""


class TooFewPerClass(ChplaneError):
    """Stratified folds need at least `folds` samples per class."""


# --- econometrics ---------------------------------------------------------------

class SingularDesign(ChplaneError):
    """Regressor matrix is rank deficient."""


class NonStationaryParams(ChplaneError):
    """AR polynomial has a root on or inside the unit circle."""


class SeriesTooShort(ChplaneError):
    """Series too short for the requested lag order."""


class DegenerateVariance(ChplaneError):
    """Series has no variation; the statistic is undefined."""
