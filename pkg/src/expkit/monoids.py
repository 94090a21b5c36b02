"""Monoid oracles: capability records bundling the operations the
pumping and square-root machinery needs from a concrete monoid.

An oracle knows its identity, how to multiply and compare elements, and
how to write an element as a word over a fixed generator alphabet (the
normal form).  Optional capabilities (inversion, square roots, the
finite-power test) are present only when the monoid supports them.
Built-in constructors cover the integers, finite monoids given by a
multiplication table, the free abelian groups, and semidirect products
of Z^2 with Z twisted by an integer matrix of determinant +-1.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple, Union

Word = Tuple[str, ...]


@dataclass(frozen=True)
class MonoidOracle:
    """Operations of one monoid, with elements of an opaque hashable type.

    ``letters`` is the generator alphabet and ``letter_value`` its
    interpretation; ``nf`` writes an element as a word over ``letters``
    so that evaluating the word recovers the element.  The identity has
    the empty word as its normal form and never appears as a letter
    value.
    """

    name: str
    identity: Any
    multiply: Callable[[Any, Any], Any]
    equal: Callable[[Any, Any], bool]
    letters: Tuple[str, ...]
    letter_value: Mapping[str, Any]
    nf: Callable[[Any], Word]
    invert: Optional[Callable[[Any], Any]] = None
    square_roots: Optional[Callable[[Any], FrozenSet[Any]]] = None
    finite_power_submonoid: Optional[Callable[[Any], bool]] = None
    is_group: bool = False
    torsion_free: bool = False
    sqrt_of_identity_trivial: bool = False

    def evaluate(self, word: Sequence[str]) -> Any:
        """Product of the letter values, left to right."""
        x = self.identity
        for a in word:
            x = self.multiply(x, self.letter_value[a])
        return x

    def power(self, x: Any, n: int) -> Any:
        if n < 0:
            if self.invert is None:
                raise ValueError("negative power needs inversion")
            return self.power(self.invert(x), -n)
        acc = self.identity
        base = x
        while n:
            if n & 1:
                acc = self.multiply(acc, base)
            base = self.multiply(base, base)
            n >>= 1
        return acc


def integer_oracle() -> MonoidOracle:
    """The additive group of integers."""

    def nf(x: int) -> Word:
        if x >= 0:
            return ("+1",) * x
        return ("-1",) * (-x)

    def square_roots(x: int) -> FrozenSet[int]:
        if x % 2 == 0:
            return frozenset({x // 2})
        return frozenset()

    return MonoidOracle(
        name="Z",
        identity=0,
        multiply=lambda x, y: x + y,
        equal=lambda x, y: x == y,
        letters=("+1", "-1"),
        letter_value={"+1": 1, "-1": -1},
        nf=nf,
        invert=lambda x: -x,
        square_roots=square_roots,
        finite_power_submonoid=lambda x: x == 0,
        is_group=True,
        torsion_free=True,
        sqrt_of_identity_trivial=True,
    )


def finite_monoid_oracle(table: Sequence[Sequence[int]]) -> MonoidOracle:
    """Oracle for the monoid on ``0..n-1`` with the given multiplication
    table.  The table must be associative and have a two-sided identity;
    anything else is an input error, not a silent fallback.
    """
    n = len(table)
    if n == 0 or any(len(row) != n for row in table):
        raise ValueError("table must be square and nonempty")
    for row in table:
        for x in row:
            if not (0 <= x < n):
                raise ValueError("table entry out of range")

    identity = None
    for e in range(n):
        if all(table[e][x] == x and table[x][e] == x for x in range(n)):
            identity = e
            break
    if identity is None:
        raise ValueError("table has no identity")
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if table[table[x][y]][z] != table[x][table[y][z]]:
                    raise ValueError(
                        f"table is not associative at ({x},{y},{z})"
                    )

    letters = tuple(f"m{x}" for x in range(n) if x != identity)
    letter_value = {f"m{x}": x for x in range(n) if x != identity}

    def nf(x: int) -> Word:
        return () if x == identity else (f"m{x}",)

    def square_roots(x: int) -> FrozenSet[int]:
        return frozenset(y for y in range(n) if table[y][y] == x)

    inverses = {}
    for x in range(n):
        for y in range(n):
            if table[x][y] == identity and table[y][x] == identity:
                inverses[x] = y
                break
    is_group = len(inverses) == n

    return MonoidOracle(
        name=f"finite[{n}]",
        identity=identity,
        multiply=lambda x, y: table[x][y],
        equal=lambda x, y: x == y,
        letters=letters,
        letter_value=letter_value,
        nf=nf,
        invert=(lambda x: inverses[x]) if is_group else None,
        square_roots=square_roots,
        finite_power_submonoid=lambda x: True,
        is_group=is_group,
        torsion_free=(n == 1),
        sqrt_of_identity_trivial=(square_roots(identity) == frozenset({identity})),
    )


# ---------------------------------------------------------------------------
# polycyclic groups: Z^n, and (Z^2 semidirect Z) twisted by an integer matrix


Mat = Tuple[Tuple[int, int], Tuple[int, int]]


def _mat_mul(a: Mat, b: Mat) -> Mat:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _mat_det(a: Mat) -> int:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def _mat_inv(a: Mat) -> Mat:
    # adjugate over the determinant; integral exactly when det is +-1
    d = _mat_det(a)
    return ((a[1][1] * d, -a[0][1] * d), (-a[1][0] * d, a[0][0] * d))


def _mat_pow(a: Mat, k: int, cache: Dict[int, Mat]) -> Mat:
    if k in cache:
        return cache[k]
    if k < 0:
        m = _mat_pow(_mat_inv(a), -k, {})
    else:
        m = ((1, 0), (0, 1))
        base = a
        e = k
        while e:
            if e & 1:
                m = _mat_mul(m, base)
            base = _mat_mul(base, base)
            e >>= 1
    cache[k] = m
    return m


def _mat_vec(a: Mat, v: Tuple[int, int]) -> Tuple[int, int]:
    return (a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1])


def _run_word(letter: str, inverse_letter: str, k: int) -> Word:
    if k >= 0:
        return (letter,) * k
    return (inverse_letter,) * (-k)


def _zn_oracle(n: int) -> MonoidOracle:
    if n < 1:
        raise ValueError("rank must be positive")
    identity = (0,) * n
    letters = tuple(f"g{i + 1}" for i in range(n)) + tuple(f"G{i + 1}" for i in range(n))
    letter_value = {}
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        letter_value[f"g{i + 1}"] = e
        letter_value[f"G{i + 1}"] = tuple(-c for c in e)

    def nf(v: Tuple[int, ...]) -> Word:
        w: List[str] = []
        for i, c in enumerate(v):
            w.extend(_run_word(f"g{i + 1}", f"G{i + 1}", c))
        return tuple(w)

    def square_roots(v: Tuple[int, ...]) -> FrozenSet[Tuple[int, ...]]:
        if all(c % 2 == 0 for c in v):
            return frozenset({tuple(c // 2 for c in v)})
        return frozenset()

    return MonoidOracle(
        name=f"Z^{n}",
        identity=identity,
        multiply=lambda x, y: tuple(a + b for a, b in zip(x, y)),
        equal=lambda x, y: x == y,
        letters=letters,
        letter_value=letter_value,
        nf=nf,
        invert=lambda v: tuple(-c for c in v),
        square_roots=square_roots,
        finite_power_submonoid=lambda v: v == identity,
        is_group=True,
        torsion_free=True,
        sqrt_of_identity_trivial=True,
    )


def _semidirect_oracle(matrix: Sequence[Sequence[int]]) -> MonoidOracle:
    a: Mat = ((int(matrix[0][0]), int(matrix[0][1])),
              (int(matrix[1][0]), int(matrix[1][1])))
    if _mat_det(a) not in (1, -1):
        raise ValueError("matrix must have determinant +1 or -1")
    powers: Dict[int, Mat] = {}

    # elements (x, y, k) standing for the pair ((x, y), k) with product
    # (v, k)(w, m) = (v + A^k w, k + m)
    identity = (0, 0, 0)

    def multiply(g, h):
        w = _mat_vec(_mat_pow(a, g[2], powers), (h[0], h[1]))
        return (g[0] + w[0], g[1] + w[1], g[2] + h[2])

    def invert(g):
        w = _mat_vec(_mat_pow(a, -g[2], powers), (g[0], g[1]))
        return (-w[0], -w[1], -g[2])

    letters = ("g1", "g2", "g3", "G1", "G2", "G3")
    letter_value = {
        "g1": (1, 0, 0), "G1": (-1, 0, 0),
        "g2": (0, 1, 0), "G2": (0, -1, 0),
        "g3": (0, 0, 1), "G3": (0, 0, -1),
    }

    def nf(g) -> Word:
        # g = g1^x g2^y g3^k since the first two letters commute and g3
        # acts only on what follows it
        return (_run_word("g1", "G1", g[0])
                + _run_word("g2", "G2", g[1])
                + _run_word("g3", "G3", g[2]))

    def square_roots(g) -> FrozenSet[Tuple[int, int, int]]:
        if g[2] % 2 != 0:
            return frozenset()
        k = g[2] // 2
        # (v, k)^2 = ((I + A^k) v, 2k): solve the 2x2 integer system
        p = _mat_pow(a, k, powers)
        m = ((1 + p[0][0], p[0][1]), (p[1][0], 1 + p[1][1]))
        det = _mat_det(m)
        if det == 0:
            # the solution space is a line or empty; a line would mean
            # infinitely many roots, which this oracle cannot report
            if g[0] == 0 and g[1] == 0:
                raise ValueError("root set may be infinite (singular system)")
            raise ValueError("singular square-root system")
        x = Fraction(g[0] * m[1][1] - g[1] * m[0][1], det)
        y = Fraction(m[0][0] * g[1] - m[1][0] * g[0], det)
        if x.denominator != 1 or y.denominator != 1:
            return frozenset()
        return frozenset({(int(x), int(y), k)})

    return MonoidOracle(
        name=f"Z2xZ[{a[0][0]},{a[0][1]};{a[1][0]},{a[1][1]}]",
        identity=identity,
        multiply=multiply,
        equal=lambda x, y: x == y,
        letters=letters,
        letter_value=letter_value,
        nf=nf,
        invert=invert,
        square_roots=square_roots,
        finite_power_submonoid=lambda g: g == identity,
        is_group=True,
        torsion_free=True,
        sqrt_of_identity_trivial=True,
    )


def polycyclic_oracle(kind: str, *, n: Optional[int] = None,
                      matrix: Optional[Sequence[Sequence[int]]] = None) -> MonoidOracle:
    """Oracle for a polycyclic group.

    ``kind="zn"`` with ``n`` gives the free abelian group of that rank;
    ``kind="semidirect"`` with a 2x2 integer ``matrix`` of determinant
    +-1 gives Z^2 twisted by that matrix over a central-letter Z.
    Normal forms are runs of the polycyclic generators in order, each
    run drawn from the generator or its inverse.
    """
    if kind == "zn":
        if n is None:
            raise ValueError("zn needs the rank n")
        return _zn_oracle(n)
    if kind == "semidirect":
        if matrix is None:
            raise ValueError("semidirect needs the twisting matrix")
        return _semidirect_oracle(matrix)
    raise ValueError(f"unknown polycyclic kind: {kind!r}")


def heisenberg_oracle() -> MonoidOracle:
    """The discrete Heisenberg group as a semidirect product."""
    return _semidirect_oracle([[1, 1], [0, 1]])


# ---------------------------------------------------------------------------
# monoid-labeled automata and pumping


@dataclass(frozen=True)
class MAutomaton:
    """Finite automaton whose edges are labeled by monoid elements.

    Accepts the set of label products along paths from an initial state
    to a final state.
    """

    states: FrozenSet[Any]
    transitions: Tuple[Tuple[Any, Any, Any], ...]
    initials: FrozenSet[Any]
    finals: FrozenSet[Any]

    def __post_init__(self):
        for src, _, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError("transition endpoint outside state set")
        if not self.initials <= self.states or not self.finals <= self.states:
            raise ValueError("initial or final states outside state set")


def _reachable(states, edges, roots, forward=True):
    adj: Dict[Any, List[Any]] = {q: [] for q in states}
    for src, _, dst in edges:
        if forward:
            adj[src].append(dst)
        else:
            adj[dst].append(src)
    seen = set(roots)
    stack = list(roots)
    while stack:
        q = stack.pop()
        for r in adj[q]:
            if r not in seen:
                seen.add(r)
                stack.append(r)
    return seen


def _label_path(o: MonoidOracle, edges, src, dst) -> Optional[Any]:
    """Label of some path src -> dst using only the given edges."""
    if src == dst:
        return o.identity
    adj: Dict[Any, List[Tuple[Any, Any]]] = {}
    for s, m, t in edges:
        adj.setdefault(s, []).append((m, t))
    seen = {src: o.identity}
    queue = [src]
    while queue:
        nxt = []
        for q in queue:
            for m, t in adj.get(q, ()):
                if t not in seen:
                    seen[t] = o.multiply(seen[q], m)
                    if t == dst:
                        return seen[t]
                    nxt.append(t)
        queue = nxt
    return None


def _sccs_of(states, edges) -> Dict[Any, int]:
    # iterative Tarjan over the labeled edge list
    adj: Dict[Any, List[Any]] = {q: [] for q in states}
    for src, _, dst in edges:
        adj[src].append(dst)
    index: Dict[Any, int] = {}
    low: Dict[Any, int] = {}
    comp: Dict[Any, int] = {}
    on_stack: Set[Any] = set()
    stack: List[Any] = []
    counter = [0]
    ncomp = [0]
    for root in states:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            q, it = work[-1]
            advanced = False
            for r in it:
                if r not in index:
                    index[r] = low[r] = counter[0]
                    counter[0] += 1
                    stack.append(r)
                    on_stack.add(r)
                    work.append((r, iter(adj[r])))
                    advanced = True
                    break
                if r in on_stack:
                    low[q] = min(low[q], index[r])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[q])
            if low[q] == index[q]:
                while True:
                    r = stack.pop()
                    on_stack.discard(r)
                    comp[r] = ncomp[0]
                    if r == q:
                        break
                ncomp[0] += 1
    return comp


def rational_pump(a: MAutomaton, o: MonoidOracle) -> Union[Tuple[Any, Any, Any], str]:
    """Pump a monoid-labeled automaton.

    Returns ``(u, p, v)`` with ``p`` not the identity and every
    ``u p^n v`` accepted, if the trimmed automaton has a cycle whose
    label differs from the identity.  Returns ``"finite"`` otherwise:
    when every cycle is labeled by the identity, the accepted subset of
    the monoid equals the finite set of simple-path labels.  Detecting
    that second case relies on cancellativity, so it is only offered
    for group oracles.
    """
    fwd = _reachable(a.states, a.transitions, a.initials, forward=True)
    bwd = _reachable(a.states, a.transitions, a.finals, forward=False)
    trim = fwd & bwd
    edges = [e for e in a.transitions if e[0] in trim and e[2] in trim]
    if not trim:
        return "finite"

    comp = _sccs_of(trim, edges)
    by_comp: Dict[int, List[Tuple[Any, Any, Any]]] = {}
    for e in edges:
        if comp[e[0]] == comp[e[2]]:
            by_comp.setdefault(comp[e[0]], []).append(e)

    found = None
    for internal in by_comp.values():
        root = internal[0][0]
        for s, m, t in internal:
            # cycle through the component root: root -> s, the edge, t -> root
            phi = _label_path(o, internal, root, s)
            psi = _label_path(o, internal, t, root)
            label = o.multiply(o.multiply(phi, m), psi)
            if not o.equal(label, o.identity):
                found = (root, label)
                break
        if found:
            break

    if found is None:
        if by_comp and not o.is_group:
            raise ValueError("cannot certify finiteness without cancellativity")
        return "finite"

    root, p = found
    u = None
    for q0 in a.initials:
        u = _label_path(o, edges, q0, root)
        if u is not None:
            break
    v = None
    for qf in a.finals:
        v = _label_path(o, edges, root, qf)
        if v is not None:
            break
    assert u is not None and v is not None
    return (u, p, v)


# ---------------------------------------------------------------------------
# power profiles


@dataclass(frozen=True)
class Finite:
    """Powers of the element repeat: x^(r+p) = x^r with p >= 1."""
    r: int
    p: int


@dataclass(frozen=True)
class NoRepetitionWithin:
    """Powers x^0 .. x^bound are pairwise distinct."""
    bound: int


def power_profile(o: MonoidOracle, x: Any, bound: int) -> Union[Finite, NoRepetitionWithin]:
    """First repetition among the powers x^0, x^1, ..., x^bound.

    Elements are used as dictionary keys, so the oracle must produce
    canonical hashable elements (all built-in oracles do).
    """
    seen: Dict[Any, int] = {}
    g = o.identity
    for i in range(bound + 1):
        if g in seen:
            r = seen[g]
            return Finite(r, i - r)
        seen[g] = i
        g = o.multiply(g, x)
    return NoRepetitionWithin(bound)
