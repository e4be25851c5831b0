"""The 26-feature character-statistics block computed on one string."""

from __future__ import annotations

import numpy as np

from .. import kernels

SPECIAL_CHARS = "_-?!,.@#%&=+;:/"

STRING_FEATURE_COUNT = 26

# Templates in canonical block order; {c} is the component display name.
STRING_FEATURE_TEMPLATES = (
    ["Length Of {c}",
     "Consonant-Vowel Change Ratio Of {c}",
     "Max. Occurrence Ratio Of Character In {c}",
     "Max. Occurrence Ratio Of Digits In {c}",
     "Max. Occurrence Ratio Of Upper Case In {c}",
     "Max. Occurrence Ratio Of Lower Case In {c}",
     "Max. Length Of Stream Of Lower Case In {c}",
     "Max. Length Of Stream Of Upper Case In {c}",
     "Max. Length Of Stream Of Digits In {c}"]
    + [f"Number Of Occurrences Of '{ch}' In {{c}}" for ch in SPECIAL_CHARS]
    + ["Number Of Non-Base64 Characters In {c}",
       "Non Letter Ratio Of {c}"]
)


def as_bytes(s) -> bytes:
    """Feature strings are analyzed as raw UTF-8 bytes."""
    if isinstance(s, bytes):
        return s
    return s.encode("utf-8", "surrogateescape")


def string_features(s) -> np.ndarray:
    """Compute the 26-feature block; the empty string yields all zeros."""
    return kernels.active().string_block(as_bytes(s))


def string_feature_names(component: str) -> list:
    return [t.format(c=component) for t in STRING_FEATURE_TEMPLATES]
