"""One-step matrix cocycles: validated generator tuples, ordered word
products, stable per-word singular profiles, and periodic-orbit
exponents.

The product over a word I = (i_0, ..., i_{n-1}) is A_{i_{n-1}} ... A_{i_0}:
the matrix of the last symbol sits leftmost.  Every module relies on
this order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matalg, sft
from .sft import TransitionMatrix, Word

#: refuse plain products beyond this length; use profiles instead
MAX_PRODUCT_LENGTH = 30

#: default enumeration budget (number of words per sweep)
DEFAULT_WORD_BUDGET = 20_000_000


class BudgetError(ValueError):
    """An enumeration would exceed the word budget."""


@dataclass
class OneStepCocycle:
    """Invertible generator tuple A_1..A_k over a validated mixing SFT.

    Wedge representatives of every generator are cached for t = 1..d
    at construction; per-length profile sweeps are cached on demand.
    """

    Q: TransitionMatrix
    generators: list[np.ndarray]
    wedges: dict[int, list[np.ndarray]] = field(init=False, repr=False)
    _profile_cache: dict[int, np.ndarray] = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        self.generators = [matalg.check_finite(A) for A in self.generators]
        if len(self.generators) != self.Q.k:
            raise ValueError(
                f"{len(self.generators)} generators for alphabet of size {self.Q.k}"
            )
        d = self.generators[0].shape[0]
        for s, A in enumerate(self.generators, start=1):
            if A.shape != (d, d):
                raise ValueError(f"generator {s} has shape {A.shape}, expected {(d, d)}")
            if not matalg.is_invertible(A):
                raise ValueError(f"generator {s} is not invertible")
        self.wedges = {
            t: [matalg.wedge(A, t) for A in self.generators] for t in range(1, d + 1)
        }

    @property
    def k(self) -> int:
        return self.Q.k

    @property
    def d(self) -> int:
        return self.generators[0].shape[0]


def product(c: OneStepCocycle, word: Word) -> np.ndarray:
    """The word product A_{i_{n-1}} ... A_{i_0}; identity for the empty word."""
    if len(word) > MAX_PRODUCT_LENGTH:
        raise ValueError(
            f"plain products are limited to length {MAX_PRODUCT_LENGTH}; use profile()"
        )
    if word and not sft.is_admissible(c.Q, word):
        raise ValueError(f"word {word} is not admissible")
    M = np.eye(c.d)
    for s in word:
        M = c.generators[s - 1] @ M
    if np.abs(M).max() > 1e300:
        raise OverflowError("word product entries exceed 1e300")
    return M


def _accumulate_word(c: OneStepCocycle, word: Word) -> np.ndarray:
    """log ||wedge(A_I, t)|| for t = 1..d via renormalized accumulation."""
    d = c.d
    accs = np.empty(d)
    for t in range(1, d + 1):
        reps = c.wedges[t]
        V = np.eye(reps[0].shape[0])
        lacc = 0.0
        for s in word:
            V = reps[s - 1] @ V
            nrm = np.abs(V).max()
            V /= nrm
            lacc += np.log(nrm)
        # exact correction from the entrywise norm to the spectral norm
        accs[t - 1] = lacc + matalg.log_spectral_norm(V)
    return accs


def profile(c: OneStepCocycle, word: Word) -> np.ndarray:
    """The singular profile (1/n)(log sigma_1, ..., log sigma_d) of A_I.

    Computed from wedge-norm accumulators with per-symbol
    renormalization, so any word length is safe.
    """
    n = len(word)
    if n < 1:
        raise ValueError("profile needs a nonempty word")
    if not sft.is_admissible(c.Q, word):
        raise ValueError(f"word {word} is not admissible")
    accs = _accumulate_word(c, word)
    logs = np.diff(accs, prepend=0.0)
    return logs / n


def profile_matrix(c: OneStepCocycle, n: int, budget: int = DEFAULT_WORD_BUDGET) -> np.ndarray:
    """Profiles of all admissible words of length n, in lexicographic
    word order, as a (#L_n, d) array.  Cached per length.

    One shared depth-first sweep with renormalized wedge accumulators;
    prefixes are computed once.
    """
    total = sft.count_words(c.Q, n)
    if total > budget:
        raise BudgetError(
            f"#L_{n} = {total} words exceeds the budget of {budget}; reduce n"
        )
    if n in c._profile_cache:
        return c._profile_cache[n]
    d = c.d
    out = np.empty((total, d))
    row = 0
    # per-depth stacks of (V_t, log-accumulator) for each wedge degree
    mats = [[np.eye(c.wedges[t][0].shape[0])] for t in range(1, d + 1)]
    laccs = [[0.0] for _ in range(d)]
    word: list[int] = []

    def descend():
        nonlocal row
        if len(word) == n:
            accs = np.empty(d)
            for ti in range(d):
                accs[ti] = laccs[ti][-1] + matalg.log_spectral_norm(mats[ti][-1])
            out[row] = np.diff(accs, prepend=0.0) / n
            row += 1
            return
        if word:
            allowed = np.flatnonzero(c.Q.entries[word[-1] - 1]) + 1
        else:
            allowed = range(1, c.k + 1)
        for s in allowed:
            s = int(s)
            for ti in range(d):
                V = c.wedges[ti + 1][s - 1] @ mats[ti][-1]
                nrm = np.abs(V).max()
                mats[ti].append(V / nrm)
                laccs[ti].append(laccs[ti][-1] + np.log(nrm))
            word.append(s)
            descend()
            word.pop()
            for ti in range(d):
                mats[ti].pop()
                laccs[ti].pop()

    descend()
    c._profile_cache[n] = out
    return out


def fiber_bunched(c: OneStepCocycle, alpha: float) -> tuple[bool, float]:
    """Fiber-bunching margin: max over generators of
    ||A|| ||A^-1|| (1/2)^alpha, and whether it is < 1.

    Informational for one-step cocycles, which always admit canonical
    holonomies.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    worst = 0.0
    for A in c.generators:
        sv = np.exp(matalg.log_singular_values(A))
        worst = max(worst, sv[0] / sv[-1] * 0.5**alpha)
    return worst < 1.0, worst


def eigen_exponents(c: OneStepCocycle, word: Word) -> np.ndarray:
    """Per-symbol log-moduli of the eigenvalues of A_I for a periodic
    word (Lyapunov exponents of the orbit with itinerary I^infinity),
    sorted non-increasing.
    """
    if not word:
        raise ValueError("need a nonempty word")
    if not sft.is_admissible(c.Q, word):
        raise ValueError(f"word {word} is not admissible")
    if not c.Q.allows(word[-1], word[0]):
        raise ValueError(f"word {word} does not close up periodically")
    M = product(c, word)
    lam = np.linalg.eigvals(M)
    return np.sort(np.log(np.abs(lam)))[::-1] / len(word)
