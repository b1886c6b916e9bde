"""String-similarity kernels: 3-gram character shingles and Jaccard index.

Backs entity resolution and mitigation deduplication. A compiled
extension is used when present; setting ``MCPINTEL_PURE_PYTHON=1``
forces the pure-Python fallback. ``IMPLEMENTATION`` reports which one
is active.
"""

import os

from . import _pure

if os.environ.get("MCPINTEL_PURE_PYTHON"):
    _impl = _pure
    IMPLEMENTATION = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        IMPLEMENTATION = "cython"
    except ImportError:
        _impl = _pure
        IMPLEMENTATION = "python"

canonicalize = _impl.canonicalize
shingles = _impl.shingles
jaccard = _impl.jaccard
jaccard_sets = _impl.jaccard_sets
max_jaccard = _impl.max_jaccard

__all__ = [
    "IMPLEMENTATION",
    "canonicalize",
    "shingles",
    "jaccard",
    "jaccard_sets",
    "max_jaccard",
]
