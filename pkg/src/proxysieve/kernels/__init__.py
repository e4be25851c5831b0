"""Kernel backend selection: compiled Cython core with pure-Python fallback.

Both backends expose the same functions (string_block, repetitive_flag,
prepare_trigrams, trigram_hists, prepare_forest, forest_votes) and produce
bit-identical float64 results; the compiled one is just fast. The compiled
backend is selected at import when available.
"""

from . import _pykernels

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

_active_name = "compiled" if _ckernels is not None else "python"
_active = _BACKENDS[_active_name]


def available() -> tuple:
    return tuple(sorted(_BACKENDS))


def active():
    return _active


def active_name() -> str:
    return _active_name


def get(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available()}"
        ) from None


def use(name: str) -> None:
    """Switch the process-wide backend (used by tests and the benchmark)."""
    global _active, _active_name
    _active = get(name)
    _active_name = name
