"""Pure-Python shingle/Jaccard kernels.

Reference implementation; semantics must stay identical to the compiled
extension in ``_kernels.pyx``. Selected at import time by
``mcpintel.similarity`` when the extension is unavailable or disabled.
"""

from __future__ import annotations


def canonicalize(s: str) -> str:
    """Lowercase, collapse whitespace runs to single spaces, trim."""
    return " ".join(s.lower().split())


def shingles(s: str, k: int = 3) -> set[str]:
    """Set of contiguous k-character substrings of the canonical form.

    Non-empty strings shorter than k yield the singleton set containing
    the whole canonical string; an empty canonical form yields the
    empty set.
    """
    if k < 1:
        raise ValueError(f"shingle size must be >= 1, got {k}")
    canon = canonicalize(s)
    n = len(canon)
    if n == 0:
        return set()
    if n < k:
        return {canon}
    return {canon[i : i + k] for i in range(n - k + 1)}


def jaccard_sets(sa: set[str], sb: set[str]) -> float:
    """Jaccard index of two shingle sets; both empty -> 1.0 by convention."""
    if not sa and not sb:
        return 1.0
    if not sa or not sb:
        return 0.0
    inter = len(sa & sb)
    return inter / (len(sa) + len(sb) - inter)


def jaccard(a: str, b: str, k: int = 3) -> float:
    """Jaccard similarity of two strings over k-gram character shingles."""
    return jaccard_sets(shingles(a, k), shingles(b, k))


def max_jaccard(label: str, candidates: list[str], k: int = 3) -> tuple[int, float]:
    """Index and similarity of the best-matching candidate.

    Ties resolve to the earliest candidate. Returns (-1, 0.0) when
    ``candidates`` is empty.
    """
    target = shingles(label, k)
    best_idx = -1
    best_j = 0.0
    for i, cand in enumerate(candidates):
        j = jaccard_sets(target, shingles(cand, k))
        if j > best_j or best_idx < 0:
            best_idx = i
            best_j = j
    return best_idx, best_j
