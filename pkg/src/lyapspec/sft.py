"""Combinatorics of mixing subshifts of finite type.

Symbols are 1-based in every public interface; 0-based indices only
appear inside loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

Word = tuple[int, ...]


class NotPrimitiveError(ValueError):
    """The transition matrix is not primitive (shift not mixing)."""


@dataclass(frozen=True)
class TransitionMatrix:
    """Validated 0/1 transition matrix of a mixing subshift of finite type.

    ``mixing_rate`` is the least n with all entries of Q^n positive.
    Build instances through :func:`validate`.
    """

    k: int
    entries: np.ndarray = field(repr=False)
    mixing_rate: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=np.int64))

    @property
    def is_full_shift(self) -> bool:
        return bool(np.all(self.entries == 1))

    def allows(self, a: int, b: int) -> bool:
        """Whether the transition a -> b is admissible (1-based symbols)."""
        return bool(self.entries[a - 1, b - 1])


def full_shift(k: int) -> TransitionMatrix:
    """The full shift on k symbols (all transitions allowed)."""
    return validate(np.ones((k, k), dtype=np.int64))


def validate(entries) -> TransitionMatrix:
    """Validate a 0/1 matrix and certify primitivity.

    Returns a TransitionMatrix carrying the mixing rate, i.e. the least
    n <= (k-1)^2 + 1 with Q^n entrywise positive.  Raises ValueError on
    malformed input and NotPrimitiveError when no such n exists.
    """
    Q = np.asarray(entries)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {Q.shape}")
    if not np.isin(Q, (0, 1)).all():
        raise ValueError("transition matrix entries must be 0 or 1")
    Q = Q.astype(np.int64)
    k = Q.shape[0]
    if (Q.sum(axis=1) == 0).any():
        row = int(np.argmax(Q.sum(axis=1) == 0)) + 1
        raise ValueError(f"symbol {row} has no outgoing transition")
    if (Q.sum(axis=0) == 0).any():
        col = int(np.argmax(Q.sum(axis=0) == 0)) + 1
        raise ValueError(f"symbol {col} has no incoming transition")

    # Boolean powers avoid overflow; the Wielandt bound caps the search.
    bound = (k - 1) ** 2 + 1
    P = (Q > 0)
    for n in range(1, bound + 1):
        if P.all():
            return TransitionMatrix(k=k, entries=Q, mixing_rate=n)
        P = (P.astype(np.int64) @ Q) > 0
    zero = np.argwhere(~P)[0]
    raise NotPrimitiveError(
        f"matrix is not primitive: (Q^{bound})[{zero[0] + 1},{zero[1] + 1}] = 0"
    )


def _check_symbols(Q: TransitionMatrix, word: Sequence[int]) -> None:
    for s in word:
        if not 1 <= s <= Q.k:
            raise ValueError(f"symbol {s} outside alphabet 1..{Q.k}")


def is_admissible(Q: TransitionMatrix, word: Sequence[int]) -> bool:
    """Whether every consecutive transition of the word is allowed."""
    _check_symbols(Q, word)
    return all(Q.allows(a, b) for a, b in zip(word, word[1:]))


def count_words(Q: TransitionMatrix, n: int) -> int:
    """Exact number of admissible words of length n.

    Equals the sum of all entries of Q^(n-1), computed with Python
    integers, so the count never overflows.
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    # Python-int matrix power; k is small, n moderate.
    rows = [[int(x) for x in row] for row in Q.entries]
    vec = [1] * Q.k
    for _ in range(n - 1):
        vec = [sum(rows[i][j] * vec[j] for j in range(Q.k)) for i in range(Q.k)]
    return sum(vec)


def enumerate_words(Q: TransitionMatrix, n: int, prefix: Word = ()) -> Iterator[Word]:
    """Yield admissible words of length n in lexicographic order.

    With a nonempty ``prefix`` only the admissible extensions of that
    prefix are produced, so a set of disjoint prefixes partitions the
    full enumeration across workers.
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    _check_symbols(Q, prefix)
    if len(prefix) > n:
        return
    if prefix and not is_admissible(Q, prefix):
        return

    word = list(prefix)

    def extend() -> Iterator[Word]:
        if len(word) == n:
            yield tuple(word)
            return
        if word:
            allowed = np.flatnonzero(Q.entries[word[-1] - 1]) + 1
        else:
            allowed = range(1, Q.k + 1)
        for s in allowed:
            word.append(int(s))
            yield from extend()
            word.pop()

    yield from extend()


def shift_entropy(Q: TransitionMatrix) -> float:
    """log of the Perron root of Q (topological entropy of the shift).

    Power iteration with relative tolerance 1e-12.
    """
    A = Q.entries.astype(float)
    v = np.ones(Q.k)
    lam = 0.0
    for _ in range(100_000):
        w = A @ v
        new = float(w.max())
        w /= new
        if abs(new - lam) <= 1e-12 * max(new, 1.0):
            # Rayleigh-style refinement on the converged vector.
            lam = float((w @ (A @ w)) / (w @ w))
            return float(np.log(lam))
        lam, v = new, w
    raise RuntimeError("power iteration did not converge")
