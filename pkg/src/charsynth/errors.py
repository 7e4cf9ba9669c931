"""Typed errors raised across the synthesis pipeline."""


class CharsynthError(Exception):
    """Base class for all package errors."""


class MalformedFont(CharsynthError):
    """Font binary is truncated or structurally invalid."""


class UnsupportedOutlineFormat(CharsynthError):
    """Font uses outline or character-map data this package does not handle."""


class MissingGlyph(CharsynthError):
    """Requested code point has no glyph in the font."""


class RecursionLimit(CharsynthError):
    """Composite glyph nesting exceeded the allowed depth."""


class DegenerateOutline(CharsynthError):
    """A vector transform collapsed a contour to zero area."""


class EmptyRendering(CharsynthError):
    """Rasterization produced an all-zero coverage bitmap."""


class DegenerateCorrespondence(CharsynthError):
    """Homography correspondences are collinear or singular."""


class SamplingExhausted(CharsynthError):
    """Rejection sampling failed to satisfy its constraint."""


class TextureTooSmall(CharsynthError):
    """Requested crop does not fit inside the texture image."""


class OutOfBounds(CharsynthError):
    """Foreground placement falls outside the background."""


class NonConvergence(CharsynthError):
    """Iterative solve ended above tolerance (result may still be usable)."""


class ConfigRangeError(CharsynthError):
    """Configuration interval is empty, inverted, or a key is unknown."""


class DuplicateName(CharsynthError):
    """Two dataset records share an image name."""


class TooFewClasses(CharsynthError):
    """Class split requested on fewer than three classes."""


class UnknownPreset(CharsynthError):
    """Preset name is not registered."""


class InsufficientExamples(CharsynthError):
    """A class has too few examples for the requested episode."""


class MissingMetadata(CharsynthError):
    """Episode construction referenced absent metadata columns."""


class SchemaError(CharsynthError):
    """Dataset on disk violates the expected layout or CSV schema."""


class MissingImage(CharsynthError):
    """A CSV record references an image file that does not exist."""


class ManifestError(CharsynthError):
    """Episode manifest is inconsistent with the dataset."""
