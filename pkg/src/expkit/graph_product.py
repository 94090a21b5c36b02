"""Graph products of monoids over an independence relation on colors.

A graph product glues finitely many local monoids (one per color)
along a commutation relation: elements of independent colors commute,
elements of one color multiply inside their local monoid.  Elements
are stored as reduced traces over the letter set of nontrivial local
elements: no two letters of equal color can be brought next to each
other, and no letter is a local identity.  The module computes the
reduced product, the composed normal form (substitute local normal
forms, then take the lexicographic trace normal form), a decision
procedure for whether an element generates a finite power submonoid,
square-root enumeration, and normal-form pumping families u p^n v.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from types import MappingProxyType
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .monoids import MonoidOracle
from .traces import IndepAlphabet, Trace, lex_nf
from .words import exponent_of_periodicity

GPLetter = Tuple[str, Any]
Word = Tuple[str, ...]


@dataclass(frozen=True)
class GPSpec:
    """Colors with an independence relation and one local oracle each.

    The order of `colors` is the linear order used by normal forms.
    `independence` holds unordered pairs of distinct colors; equal and
    unlisted colors are dependent.  Local elements must be canonical:
    `==` and `hash` have to agree with the oracle's `equal`, the same
    convention `power_profile` relies on.
    """

    colors: Tuple[str, ...]
    independence: FrozenSet[FrozenSet[str]]
    locals: Mapping[str, MonoidOracle] = field(hash=False)

    def __post_init__(self):
        colors = tuple(self.colors)
        if len(set(colors)) != len(colors):
            raise ValueError("duplicate colors")
        object.__setattr__(self, "colors", colors)
        pairs = set()
        for pair in self.independence:
            a, b = tuple(pair)
            if a not in colors or b not in colors:
                raise ValueError(f"independence pair ({a!r}, {b!r}) uses unknown color")
            if a == b:
                raise ValueError(f"independence must be irreflexive, got ({a!r}, {a!r})")
            pairs.add(frozenset((a, b)))
        object.__setattr__(self, "independence", frozenset(pairs))
        if set(self.locals) != set(colors):
            raise ValueError("locals must map exactly the colors")
        object.__setattr__(self, "locals", MappingProxyType(dict(self.locals)))

    def independent(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.independence

    def local(self, color: str) -> MonoidOracle:
        try:
            return self.locals[color]
        except KeyError:
            raise ValueError(f"unknown color {color!r}") from None

    def rank(self, color: str) -> int:
        return self.colors.index(color)


@dataclass(frozen=True)
class GPElement:
    """An element of a graph product, stored as a reduced trace.

    `letters` is a sequence of (color, local element) pairs in the
    canonical trace order: lexicographic by color rank, where letters
    of independent colors commute and all others are fixed.
    """

    spec: GPSpec
    letters: Tuple[GPLetter, ...]

    def __post_init__(self):
        letters = tuple((c, m) for c, m in self.letters)
        object.__setattr__(self, "letters", letters)
        for c, m in letters:
            o = self.spec.local(c)
            if o.equal(m, o.identity):
                raise ValueError("letters must not carry a local identity")
        if list(letters) != _canonical_order(self.spec, list(letters)):
            raise ValueError("letters are not in canonical trace order")
        if _merge_scan(self.spec, list(letters)) is not None:
            raise ValueError("letters do not form a reduced trace")

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return len(self.letters) > 0

    def __mul__(self, other: "GPElement") -> "GPElement":
        return multiply(self.spec, self, other)


def _canonical_order(spec: GPSpec, seq: List[GPLetter]) -> List[GPLetter]:
    # greedy lexicographic normal form on color ranks; two letters of
    # equal color are never simultaneously minimal, so ranks suffice
    remaining = list(seq)
    out: List[GPLetter] = []
    while remaining:
        best = -1
        best_rank = len(spec.colors)
        seen: Set[str] = set()
        for i, (c, _) in enumerate(remaining):
            if all(spec.independent(c, d) for d in seen):
                r = spec.rank(c)
                if r < best_rank:
                    best, best_rank = i, r
            seen.add(c)
        out.append(remaining.pop(best))
    return out


def _merge_scan(spec: GPSpec, seq: Sequence[GPLetter]) -> Optional[Tuple[int, int]]:
    """Leftmost pair i < j of equal color with every letter strictly
    between independent of that color, or None if the trace is reduced.
    """
    for i, (ci, _) in enumerate(seq):
        for j in range(i + 1, len(seq)):
            cj = seq[j][0]
            if cj == ci:
                return (i, j)
            if not spec.independent(ci, cj):
                break
    return None


def _reduce(spec: GPSpec, seq: Iterable[GPLetter]) -> List[GPLetter]:
    work: List[GPLetter] = []
    for c, m in seq:
        o = spec.local(c)
        if not o.equal(m, o.identity):
            work.append((c, m))
    while True:
        hit = _merge_scan(spec, work)
        if hit is None:
            return work
        i, j = hit
        o = spec.local(work[i][0])
        prod = o.multiply(work[i][1], work[j][1])
        del work[j]
        if o.equal(prod, o.identity):
            del work[i]
        else:
            work[i] = (work[i][0], prod)


def _build(spec: GPSpec, seq: Iterable[GPLetter]) -> GPElement:
    return GPElement(spec, tuple(_canonical_order(spec, _reduce(spec, seq))))


def gp_element(spec: GPSpec, letters: Iterable[GPLetter]) -> GPElement:
    """Reduced element represented by an arbitrary letter sequence."""
    return _build(spec, letters)


def gp_identity(spec: GPSpec) -> GPElement:
    return GPElement(spec, ())


def _check_spec(spec: GPSpec, *elements: GPElement) -> None:
    for x in elements:
        if x.spec != spec:
            raise ValueError("spec mismatch")


def multiply(spec: GPSpec, x: GPElement, y: GPElement) -> GPElement:
    """Reduced trace of the product: concatenate, then repeatedly merge
    the leftmost pair of equal-color letters separated only by letters
    independent of that color, dropping local identities.
    """
    _check_spec(spec, x, y)
    return _build(spec, list(x.letters) + list(y.letters))


def gamma_letter(color: str, letter: str) -> str:
    return f"{color}:{letter}"


def gamma_alphabet(spec: GPSpec) -> IndepAlphabet:
    """Union of the local generator alphabets, tagged by color.

    The letter order is colors first (spec order), local order within a
    color; two letters are independent exactly when their colors are.
    """
    letters: List[str] = []
    color_of: Dict[str, str] = {}
    for c in spec.colors:
        for a in spec.local(c).letters:
            t = gamma_letter(c, a)
            if t in color_of:
                raise ValueError(f"letter name {t!r} collides across colors")
            color_of[t] = c
            letters.append(t)
    pairs = [
        (s, t)
        for i, s in enumerate(letters)
        for t in letters[i + 1 :]
        if spec.independent(color_of[s], color_of[t])
    ]
    return IndepAlphabet(letters, pairs)


def nf_gamma(x: GPElement) -> Trace:
    """The trace over the tagged generator alphabet obtained by
    substituting every letter with its local normal-form word.
    """
    spec = x.spec
    word: List[str] = []
    for c, m in x.letters:
        u = spec.local(c).nf(m)
        if not u:
            raise ValueError("local normal form is empty for a nontrivial element")
        word.extend(gamma_letter(c, a) for a in u)
    return lex_nf(tuple(word), gamma_alphabet(spec))


def nf_global(x: GPElement) -> Word:
    """Lexicographic normal form of nf_gamma, a word over tagged letters."""
    return tuple(nf_gamma(x).word)


def _components(spec: GPSpec, letters: Sequence[GPLetter]) -> List[List[int]]:
    # connected components of positions under color dependence
    n = len(letters)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if not spec.independent(letters[i][0], letters[j][0]):
                parent[find(i)] = find(j)
    groups: Dict[int, List[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def has_finite_power_submonoid(spec: GPSpec, y: GPElement) -> bool:
    """True iff the powers of y form a finite set.

    Minimizes length over the transposition orbit of y (rotate one
    minimal letter to the back, re-reduce, breadth first); the powers
    of y are finite exactly when every dependence component of the
    minimizer is a single letter whose local element has finite powers.
    """
    _check_spec(spec, y)
    for c in spec.colors:
        o = spec.local(c)
        if o.finite_power_submonoid is None:
            raise ValueError(f"local monoid {o.name!r} provides no finite_power_submonoid")
    best = y.letters
    seen: Set[Tuple[GPLetter, ...]] = {y.letters}
    queue = deque([y.letters])
    while queue:
        letters = queue.popleft()
        if len(letters) < len(best):
            best = letters
        colors_before: Set[str] = set()
        for i, (c, _) in enumerate(letters):
            if all(spec.independent(c, d) for d in colors_before):
                rotated = list(letters[:i]) + list(letters[i + 1 :]) + [letters[i]]
                nxt = tuple(_canonical_order(spec, _reduce(spec, rotated)))
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
            colors_before.add(c)
    return all(
        len(comp) == 1
        and spec.local(best[comp[0]][0]).finite_power_submonoid(best[comp[0]][1])
        for comp in _components(spec, best)
    )


def square_roots(spec: GPSpec, w: GPElement) -> FrozenSet[GPElement]:
    """All x with x * x = w.

    Any root is a reduced trace with at most max(1, |w|) letters, each
    of which is a letter of w or a local square root of one; the
    candidates are enumerated exhaustively.  Requires every local
    oracle to enumerate square roots and to have a trivial square root
    of the identity.
    """
    _check_spec(spec, w)
    for c in spec.colors:
        o = spec.local(c)
        if o.square_roots is None:
            raise ValueError(f"local monoid {o.name!r} provides no square_roots")
        if not o.sqrt_of_identity_trivial:
            raise ValueError(
                f"hypothesis violated: local monoid {o.name!r} does not certify "
                "that the identity has only the trivial square root"
            )
    if not w.letters:
        return frozenset({w})
    candidates: Set[GPLetter] = set()
    for c, m in set(w.letters):
        o = spec.local(c)
        for e in {m} | set(o.square_roots(m)):
            if not o.equal(e, o.identity):
                candidates.add((c, e))
    roots: Set[GPElement] = set()
    tried: Set[Tuple[GPLetter, ...]] = set()
    pool = list(candidates)
    for k in range(1, max(1, len(w.letters)) + 1):
        for tup in product(pool, repeat=k):
            x = _build(spec, tup)
            if x.letters in tried:
                continue
            tried.add(x.letters)
            if multiply(spec, x, x) == w:
                roots.add(x)
    return frozenset(roots)


def pump_family_nf(
    spec: GPSpec,
    u: GPElement,
    p: GPElement,
    v: GPElement,
    n_max: int,
) -> List[Tuple[int, Word, int]]:
    """Normal forms of u p^n v for n = 0..n_max with their exponents of
    periodicity.
    """
    _check_spec(spec, u, p, v)
    if not p.letters:
        raise ValueError("the pumped element must not be the identity")
    out: List[Tuple[int, Word, int]] = []
    left = u
    for n in range(n_max + 1):
        w = nf_global(multiply(spec, left, v))
        out.append((n, w, exponent_of_periodicity(w)))
        left = multiply(spec, left, p)
    return out


def gp_oracle(spec: GPSpec) -> MonoidOracle:
    """MonoidOracle facade over a graph product.

    Letters are the tagged local generators; optional capabilities are
    present exactly when every local oracle provides them.  Being a
    group and torsion freeness both pass from the locals to the
    product, so the flags are conjunctions.
    """
    alph = gamma_alphabet(spec)
    letter_value: Dict[str, GPElement] = {}
    for c in spec.colors:
        o = spec.local(c)
        for a in o.letters:
            letter_value[gamma_letter(c, a)] = _build(spec, [(c, o.letter_value[a])])
    oracles = [spec.local(c) for c in spec.colors]

    def invert(x: GPElement) -> GPElement:
        letters = [(c, spec.local(c).invert(m)) for c, m in reversed(x.letters)]
        return _build(spec, letters)

    sqrt_ok = all(o.square_roots is not None for o in oracles) and all(
        o.sqrt_of_identity_trivial for o in oracles
    )
    return MonoidOracle(
        name="GP(" + ", ".join(f"{c}:{spec.local(c).name}" for c in spec.colors) + ")",
        identity=gp_identity(spec),
        multiply=lambda x, y: multiply(spec, x, y),
        equal=lambda x, y: x == y,
        letters=tuple(alph.letters),
        letter_value=letter_value,
        nf=nf_global,
        invert=invert if all(o.invert is not None for o in oracles) else None,
        square_roots=(lambda w: square_roots(spec, w)) if sqrt_ok else None,
        finite_power_submonoid=(
            (lambda y: has_finite_power_submonoid(spec, y))
            if all(o.finite_power_submonoid is not None for o in oracles)
            else None
        ),
        is_group=all(o.is_group for o in oracles),
        torsion_free=all(o.torsion_free for o in oracles),
        sqrt_of_identity_trivial=sqrt_ok,
    )
