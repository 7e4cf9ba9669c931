"""charsynth: synthetic printed-character image generation.

Parses TrueType outlines, distorts them in vector space, rasterizes with
anti-aliasing, applies pixel-space transforms and blending, and emits
ML-ready datasets with complete nuisance metadata plus few-shot episodes.
"""

__version__ = "0.1.0"
