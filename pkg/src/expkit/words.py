"""Word combinatorics around the exponent of periodicity.

The exponent of periodicity exp(w) of a finite word is the largest e such
that w contains a factor p^e with p nonempty.  The empty word gets 0 and
every nonempty word has exponent at least 1.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

Word = Sequence


def exponent_of_periodicity(word: Word) -> int:
    """Largest e such that p**e is a factor of `word` for some nonempty p.

    One pass per candidate period length: positions where the word agrees
    with its own shift are scanned for the longest run, O(n^2) overall.
    Letters may be any hashable values.
    """
    n = len(word)
    if n == 0:
        return 0
    ids: dict = {}
    arr = np.fromiter((ids.setdefault(c, len(ids)) for c in word),
                      dtype=np.int64, count=n)
    best = 1
    for period in range(1, n // 2 + 1):
        if n // period <= best:
            # even a full-length power of this period cannot beat `best`
            break
        agree = arr[:-period] == arr[period:]
        if not agree.any():
            continue
        flags = np.zeros(agree.size + 2, dtype=np.int8)
        flags[1:-1] = agree
        steps = np.diff(flags)
        run = int((np.flatnonzero(steps == -1) - np.flatnonzero(steps == 1)).max())
        best = max(best, (run + period) // period)
    return best


_TM_STEP = str.maketrans({"a": "ab", "b": "ba"})


def thue_morse_prefix(n: int) -> str:
    """First n letters of the fixed point of a -> ab, b -> ba over {a, b}."""
    if n < 0:
        raise ValueError("prefix length must be nonnegative")
    w = "a"
    while len(w) < n:
        w = w.translate(_TM_STEP)
    return w[:n]


def apply_morphism(h: Mapping, word: Word):
    """Image of `word` under the morphism sending each letter c to h[c].

    Every image must be a nonempty word.  Returns a str when word and all
    images are strings, otherwise a tuple of letters.
    """
    pieces = []
    for c in word:
        if c not in h:
            raise ValueError(f"letter {c!r} not in morphism domain")
        image = h[c]
        if len(image) == 0:
            raise ValueError(f"morphism erases letter {c!r}")
        pieces.append(image)
    if isinstance(word, str) and all(isinstance(p, str) for p in pieces):
        return "".join(pieces)
    flat = []
    for p in pieces:
        flat.extend(p)
    return tuple(flat)


def min_exp_at_length(sample: Iterable[Word], length_threshold: int) -> Optional[int]:
    """Minimum exponent of periodicity over sample words of length >= threshold.

    Returns None when no word in the sample is long enough.
    """
    exps = [exponent_of_periodicity(w) for w in sample if len(w) >= length_threshold]
    if not exps:
        return None
    return min(exps)
