# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled shingle/Jaccard kernels.

Semantics are pinned to ``mcpintel.similarity._pure``; the test suite
asserts parity between the two implementations.
"""

from cpython.unicode cimport Py_UNICODE_ISSPACE


def canonicalize(s: str) -> str:
    """Lowercase, collapse whitespace runs to single spaces, trim."""
    cdef str lowered = s.lower()
    cdef Py_ssize_t n = len(lowered)
    cdef Py_ssize_t i
    cdef list parts = []
    cdef Py_ssize_t start = -1
    for i in range(n):
        if Py_UNICODE_ISSPACE(lowered[i]):
            if start >= 0:
                parts.append(lowered[start:i])
                start = -1
        elif start < 0:
            start = i
    if start >= 0:
        parts.append(lowered[start:n])
    return " ".join(parts)


def shingles(s: str, k: int = 3) -> set:
    """Set of contiguous k-character substrings of the canonical form."""
    if k < 1:
        raise ValueError(f"shingle size must be >= 1, got {k}")
    cdef str canon = canonicalize(s)
    cdef Py_ssize_t n = len(canon)
    cdef Py_ssize_t kk = k
    cdef set out = set()
    cdef Py_ssize_t i
    if n == 0:
        return out
    if n < kk:
        out.add(canon)
        return out
    for i in range(n - kk + 1):
        out.add(canon[i:i + kk])
    return out


def jaccard_sets(sa: set, sb: set) -> float:
    """Jaccard index of two shingle sets; both empty -> 1.0 by convention."""
    cdef Py_ssize_t la = len(sa)
    cdef Py_ssize_t lb = len(sb)
    if la == 0 and lb == 0:
        return 1.0
    if la == 0 or lb == 0:
        return 0.0
    cdef Py_ssize_t inter
    if la <= lb:
        inter = len(sa & sb)
    else:
        inter = len(sb & sa)
    return inter / <double>(la + lb - inter)


def jaccard(a: str, b: str, k: int = 3) -> float:
    """Jaccard similarity of two strings over k-gram character shingles."""
    return jaccard_sets(shingles(a, k), shingles(b, k))


def max_jaccard(label: str, candidates: list, k: int = 3) -> tuple:
    """Index and similarity of the best-matching candidate (earliest tie wins)."""
    cdef set target = shingles(label, k)
    cdef Py_ssize_t best_idx = -1
    cdef double best_j = 0.0
    cdef double j
    cdef Py_ssize_t i
    cdef Py_ssize_t n = len(candidates)
    for i in range(n):
        j = jaccard_sets(target, shingles(candidates[i], k))
        if j > best_j or best_idx < 0:
            best_idx = i
            best_j = j
    return best_idx, best_j
