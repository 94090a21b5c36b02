"""Free partially commutative monoids (traces).

Letters carry a linear order and an irreflexive symmetric independence
relation; words are identified up to swapping adjacent independent
letters.  The canonical representative of a trace is its lexicographic
normal form, computed greedily from the dependence order.  The module
also exposes dependence graphs, Hasse diagrams, steps, connectivity,
convex factorizations, prefix/suffix sets and transposition orbits.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import (
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from .fsa import Dfa

Letter = Hashable
Word = Sequence


class IndepAlphabet:
    """Ordered alphabet with an independence relation.

    The order of `letters` is the linear order used by normal forms.
    `independence` holds unordered pairs of distinct letters; everything
    else (including equal letters) is dependent.  An optional involution
    models inverse letters and must be compatible with independence.
    """

    __slots__ = ("letters", "independence", "involution", "_rank", "_dep_mask")

    def __init__(
        self,
        letters: Iterable[Letter],
        independence: Iterable[Iterable[Letter]] = (),
        involution: Optional[Mapping[Letter, Letter]] = None,
    ):
        self.letters = tuple(letters)
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("duplicate letters")
        self._rank = {c: i for i, c in enumerate(self.letters)}
        pairs = set()
        for pair in independence:
            a, b = tuple(pair)
            if a not in self._rank or b not in self._rank:
                raise ValueError(f"independence pair ({a!r}, {b!r}) uses unknown letter")
            if a == b:
                raise ValueError(f"independence must be irreflexive, got ({a!r}, {a!r})")
            pairs.add(frozenset((a, b)))
        self.independence: FrozenSet[FrozenSet[Letter]] = frozenset(pairs)
        if involution is not None:
            inv = dict(involution)
            for a in self.letters:
                if a not in inv:
                    raise ValueError(f"involution misses letter {a!r}")
                if inv[a] not in self._rank or inv.get(inv[a]) != a:
                    raise ValueError(f"map is not an involution at {a!r}")
            for a in self.letters:
                for b in self.letters:
                    if self.independent_raw(pairs, a, b) != self.independent_raw(
                        pairs, inv[a], b
                    ):
                        raise ValueError(
                            f"independence not involution-invariant at ({a!r}, {b!r})"
                        )
            self.involution: Optional[Dict[Letter, Letter]] = inv
        else:
            self.involution = None
        self._dep_mask = []
        for c in self.letters:
            mask = 0
            for i, d in enumerate(self.letters):
                if frozenset((c, d)) not in self.independence or c == d:
                    mask |= 1 << i
            self._dep_mask.append(mask)

    @staticmethod
    def independent_raw(pairs: Set[FrozenSet[Letter]], a: Letter, b: Letter) -> bool:
        return a != b and frozenset((a, b)) in pairs

    def independent(self, a: Letter, b: Letter) -> bool:
        return a != b and frozenset((a, b)) in self.independence

    def dependent(self, a: Letter, b: Letter) -> bool:
        return not self.independent(a, b)

    def rank(self, a: Letter) -> int:
        try:
            return self._rank[a]
        except KeyError:
            raise ValueError(f"letter {a!r} not in alphabet") from None

    def bar(self, a: Letter) -> Letter:
        if self.involution is None:
            raise ValueError("alphabet has no involution")
        return self.involution[a]

    def dep_mask(self, a: Letter) -> int:
        return self._dep_mask[self.rank(a)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndepAlphabet):
            return NotImplemented
        return (
            self.letters == other.letters
            and self.independence == other.independence
            and self.involution == other.involution
        )

    def __hash__(self) -> int:
        inv = None
        if self.involution is not None:
            inv = frozenset(self.involution.items())
        return hash((self.letters, self.independence, inv))

    def __repr__(self) -> str:
        pairs = sorted(sorted(map(repr, p)) for p in self.independence)
        return f"IndepAlphabet({list(self.letters)!r}, {pairs!r})"


def indep_to_json(alph: IndepAlphabet) -> dict:
    out: dict = {
        "letters": list(alph.letters),
        "independence": sorted(
            sorted(pair, key=alph.rank) for pair in alph.independence
        ),
    }
    if alph.involution is not None:
        out["involution"] = {a: alph.involution[a] for a in alph.letters}
    return out


def indep_from_json(data: Mapping) -> IndepAlphabet:
    try:
        return IndepAlphabet(
            data["letters"], data.get("independence", ()), data.get("involution")
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed independence alphabet: {exc}") from exc


def _join_like(template: Word, letters: List[Letter]) -> Word:
    if isinstance(template, str):
        return "".join(letters)
    return tuple(letters)


@dataclass(frozen=True)
class Trace:
    """A trace, stored by its lexicographic normal form."""

    alphabet: IndepAlphabet
    word: Word

    def __len__(self) -> int:
        return len(self.word)

    def __bool__(self) -> bool:
        return len(self.word) > 0

    def count(self, letter: Letter) -> int:
        return sum(1 for c in self.word if c == letter)

    def occurring(self) -> Set[Letter]:
        return set(self.word)

    def independent_of(self, letter: Letter) -> bool:
        return all(self.alphabet.independent(letter, c) for c in set(self.word))

    def concat(self, other: "Trace") -> "Trace":
        if self.alphabet != other.alphabet:
            raise ValueError("alphabet mismatch")
        if isinstance(self.word, str) and isinstance(other.word, str):
            return lex_nf(self.word + other.word, self.alphabet)
        return lex_nf(tuple(self.word) + tuple(other.word), self.alphabet)

    def __mul__(self, other: "Trace") -> "Trace":
        return self.concat(other)

    def remove_minimal(self, letter: Letter) -> Optional["Trace"]:
        """Trace t with self = letter * t, or None if no such factorization."""
        word = self.word
        for i, c in enumerate(word):
            if c == letter:
                if all(self.alphabet.independent(b, letter) for b in word[:i]):
                    rest = list(word[:i]) + list(word[i + 1 :])
                    return lex_nf(_join_like(word, rest), self.alphabet)
                return None
        return None


@dataclass(frozen=True)
class DepGraph:
    """Dependence graph on positions 1..m; labels[i-1] labels position i."""

    labels: Tuple[Letter, ...]
    edges: FrozenSet[Tuple[int, int]]

    @property
    def positions(self) -> range:
        return range(1, len(self.labels) + 1)


def lex_nf(word: Word, alph: IndepAlphabet) -> Trace:
    """Least word of the commutation class, greedily from minimal positions."""
    seq = list(word)
    ranks = [alph.rank(c) for c in seq]
    masks = [alph.dep_mask(c) for c in seq]
    remaining = list(range(len(seq)))
    out: List[Letter] = []
    while remaining:
        seen = 0
        best = -1
        best_rank = len(alph.letters)
        for i in remaining:
            if seen & masks[i] == 0 and ranks[i] < best_rank:
                best_rank = ranks[i]
                best = i
                if best_rank == 0:
                    break
            seen |= 1 << ranks[i]
        out.append(seq[best])
        remaining.remove(best)
    return Trace(alph, _join_like(word, out))


def is_lex_nf(word: Word, alph: IndepAlphabet) -> bool:
    """True iff the word is its own lexicographic normal form.

    Runs the forbidden-set automaton: after reading c, every independent
    smaller letter (and every forbidden letter that stays independent)
    must not occur later.
    """
    forbidden: Set[Letter] = set()
    for c in word:
        rank_c = alph.rank(c)
        if c in forbidden:
            return False
        forbidden = {
            a
            for a in alph.letters
            if alph.independent(a, c) and (alph.rank(a) < rank_c or a in forbidden)
        }
    return True


def lexnf_dfa(alph: IndepAlphabet) -> Dfa:
    """Partial DFA over the letter alphabet accepting the normal forms."""
    initial: FrozenSet[Letter] = frozenset()
    states = {initial}
    transition: Dict[Tuple[FrozenSet[Letter], Letter], FrozenSet[Letter]] = {}
    frontier = deque([initial])
    while frontier:
        state = frontier.popleft()
        for c in alph.letters:
            if c in state:
                continue
            rank_c = alph.rank(c)
            target = frozenset(
                a
                for a in alph.letters
                if alph.independent(a, c) and (alph.rank(a) < rank_c or a in state)
            )
            transition[(state, c)] = target
            if target not in states:
                states.add(target)
                frontier.append(target)
    return Dfa(states, alph.letters, transition, initial, states)


def dependence_graph(x: Trace) -> DepGraph:
    word = tuple(x.word)
    edges = set()
    for j in range(len(word)):
        for i in range(j):
            if x.alphabet.dependent(word[i], word[j]):
                edges.add((i + 1, j + 1))
    return DepGraph(word, frozenset(edges))


def _closure_sets(g: DepGraph) -> Tuple[List[Set[int]], List[Set[int]]]:
    # below[i] = strict predecessors of position i+1, above[i] = successors
    m = len(g.labels)
    succ: List[Set[int]] = [set() for _ in range(m)]
    for i, j in g.edges:
        succ[i - 1].add(j - 1)
    above: List[Set[int]] = [set() for _ in range(m)]
    for i in range(m - 1, -1, -1):
        acc: Set[int] = set()
        for j in succ[i]:
            acc.add(j)
            acc |= above[j]
        above[i] = acc
    below: List[Set[int]] = [set() for _ in range(m)]
    for i in range(m):
        for j in above[i]:
            below[j].add(i)
    return below, above


def hasse(x: Trace) -> DepGraph:
    """Covering arcs of the dependence order."""
    g = dependence_graph(x)
    below, above = _closure_sets(g)
    covers = set()
    for i in range(len(g.labels)):
        for j in above[i]:
            if not any(k in above[i] and j in above[k] for k in above[i]):
                covers.add((i + 1, j + 1))
    return DepGraph(g.labels, frozenset(covers))


def trace_equal(w1: Word, w2: Word, alph: IndepAlphabet) -> bool:
    return lex_nf(w1, alph).word == lex_nf(w2, alph).word


def _minimal_flags(x: Trace) -> List[bool]:
    seen = 0
    flags = []
    for c in x.word:
        flags.append(seen & x.alphabet.dep_mask(c) == 0)
        seen |= 1 << x.alphabet.rank(c)
    return flags


def min_step(x: Trace) -> Word:
    labels = [c for c, ok in zip(x.word, _minimal_flags(x)) if ok]
    labels.sort(key=x.alphabet.rank)
    return _join_like(x.word, labels)


def max_step(x: Trace) -> Word:
    seen = 0
    flags = []
    for c in reversed(list(x.word)):
        flags.append(seen & x.alphabet.dep_mask(c) == 0)
        seen |= 1 << x.alphabet.rank(c)
    flags.reverse()
    labels = [c for c, ok in zip(x.word, flags) if ok]
    labels.sort(key=x.alphabet.rank)
    return _join_like(x.word, labels)


def connected_components(x: Trace) -> List[Trace]:
    """Pairwise independent connected traces multiplying back to x."""
    word = list(x.word)
    m = len(word)
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for j in range(m):
        for i in range(j):
            if x.alphabet.dependent(word[i], word[j]):
                parent[find(i)] = find(j)
    groups: Dict[int, List[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    ordered = sorted(groups.values(), key=lambda g: g[0])
    return [
        lex_nf(_join_like(x.word, [word[i] for i in g]), x.alphabet) for g in ordered
    ]


def _induced(x: Trace, positions: Iterable[int]) -> Trace:
    word = list(x.word)
    picked = [word[i - 1] for i in sorted(positions)]
    return lex_nf(_join_like(x.word, picked), x.alphabet)


def factorize_convex(
    x: Trace, positions: Iterable[int]
) -> Tuple[Trace, Trace, Trace, Trace]:
    """Split x = p * u * v * q with u induced by a convex position set.

    v collects the positions incomparable to the set, so (u, v) are
    independent; p and q are the strict lower and upper parts.
    """
    u_set = set(positions)
    m = len(x.word)
    if not u_set <= set(range(1, m + 1)):
        raise ValueError("positions out of range")
    g = dependence_graph(x)
    below, above = _closure_sets(g)
    p_set, v_set, q_set = set(), set(), set()
    for i in range(1, m + 1):
        if i in u_set:
            continue
        below_u = any(j + 1 in u_set for j in above[i - 1])
        above_u = any(j + 1 in u_set for j in below[i - 1])
        if below_u and above_u:
            raise ValueError("non-convex subset")
        if below_u:
            p_set.add(i)
        elif above_u:
            q_set.add(i)
        else:
            v_set.add(i)
    return (
        _induced(x, p_set),
        _induced(x, u_set),
        _induced(x, v_set),
        _induced(x, q_set),
    )


def _ideals(m: int, below: List[Set[int]]) -> Set[FrozenSet[int]]:
    # all downward-closed position sets, grown one position at a time
    ideals = {frozenset()}
    frontier = deque([frozenset()])
    while frontier:
        ideal = frontier.popleft()
        for i in range(m):
            if i + 1 in ideal:
                continue
            if all(j + 1 in ideal for j in below[i]):
                bigger = ideal | {i + 1}
                if bigger not in ideals:
                    ideals.add(bigger)
                    frontier.append(bigger)
    return ideals


def prefixes(x: Trace) -> Set[Trace]:
    below, _ = _closure_sets(dependence_graph(x))
    return {_induced(x, ideal) for ideal in _ideals(len(x.word), below)}


def suffixes(x: Trace) -> Set[Trace]:
    _, above = _closure_sets(dependence_graph(x))
    m = len(x.word)
    filters = _ideals(m, above)
    return {_induced(x, flt) for flt in filters}


def transposition_orbit(x: Trace) -> Set[Trace]:
    """Closure of x under cyclic factor exchange uv -> vu.

    Generated by single-letter rotations a*w -> w*a: a transposition of
    uv with |u| = k is k such rotations, so the closures agree.
    """
    orbit = {x}
    frontier = deque([x])
    while frontier:
        t = frontier.popleft()
        for letter, ok in zip(t.word, _minimal_flags(t)):
            if not ok:
                continue
            rest = t.remove_minimal(letter)
            assert rest is not None
            rotated = lex_nf(
                _join_like(t.word, list(rest.word) + [letter]), t.alphabet
            )
            if rotated not in orbit:
                orbit.add(rotated)
                frontier.append(rotated)
    return orbit
