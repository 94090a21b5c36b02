"""Finite automata: trimming, products, pumping, periodic perfectness.

A language is periodically perfect when long accepted words are forced to
contain high powers.  On a trim deterministic automaton this is equivalent
to every strongly connected component being a simple cycle, which is what
:func:`is_periodically_perfect` checks.  :func:`perfectness_bound` turns
the qualitative statement into an explicit length threshold, and
:func:`imperfection_witness` produces the two-cycle certificate used to
refute perfectness.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

State = Hashable
Letter = Hashable
Word = Sequence


class Dfa:
    """Deterministic automaton with a partial transition map.

    Immutable after construction; module operations return fresh automata.
    """

    __slots__ = ("states", "alphabet", "transition", "initial", "finals")

    def __init__(
        self,
        states: Iterable[State],
        alphabet: Iterable[Letter],
        transition: Mapping[Tuple[State, Letter], State],
        initial: State,
        finals: Iterable[State],
    ):
        self.states = frozenset(states)
        self.alphabet = frozenset(alphabet)
        self.transition = dict(transition)
        self.initial = initial
        self.finals = frozenset(finals)
        if self.initial not in self.states:
            raise ValueError("initial state missing from state set")
        if not self.finals <= self.states:
            raise ValueError("final states missing from state set")
        for (q, c), r in self.transition.items():
            if q not in self.states or r not in self.states:
                raise ValueError(f"transition ({q!r}, {c!r}, {r!r}) uses unknown state")
            if c not in self.alphabet:
                raise ValueError(f"transition letter {c!r} not in alphabet")

    def step(self, state: State, letter: Letter) -> Optional[State]:
        return self.transition.get((state, letter))

    def accepts(self, word: Word) -> bool:
        q = self.initial
        for c in word:
            q = self.transition.get((q, c))
            if q is None:
                return False
        return q in self.finals


def _adjacency(a: Dfa) -> Dict[State, List[Tuple[Letter, State]]]:
    adj: Dict[State, List[Tuple[Letter, State]]] = {q: [] for q in a.states}
    for (q, c), r in a.transition.items():
        adj[q].append((c, r))
    for edges in adj.values():
        edges.sort(key=lambda cr: repr(cr[0]))
    return adj


def _join(letters: List[Letter]) -> Word:
    if all(isinstance(c, str) and len(c) == 1 for c in letters):
        return "".join(letters)
    return tuple(letters)


def _path_word(
    adj: Dict[State, List[Tuple[Letter, State]]],
    src: State,
    targets: Iterable[State],
    allowed: Optional[Iterable[State]] = None,
) -> Optional[Tuple[Word, State]]:
    # BFS; returns the lexicographically earliest shortest label sequence
    target_set = set(targets)
    allowed_set = set(allowed) if allowed is not None else None
    if src in target_set:
        return _join([]), src
    seen = {src}
    back: Dict[State, Tuple[State, Letter]] = {}
    frontier = deque([src])
    while frontier:
        q = frontier.popleft()
        for c, r in adj[q]:
            if allowed_set is not None and r not in allowed_set:
                continue
            if r in seen:
                continue
            seen.add(r)
            back[r] = (q, c)
            if r in target_set:
                letters: List[Letter] = []
                cur = r
                while cur != src:
                    prev, letter = back[cur]
                    letters.append(letter)
                    cur = prev
                letters.reverse()
                return _join(letters), r
            frontier.append(r)
    return None


def trim(a: Dfa) -> Dfa:
    """Restrict to states that lie on some accepting path."""
    adj = _adjacency(a)
    reach = {a.initial}
    frontier = deque([a.initial])
    while frontier:
        q = frontier.popleft()
        for _, r in adj[q]:
            if r not in reach:
                reach.add(r)
                frontier.append(r)
    rev: Dict[State, List[State]] = {q: [] for q in reach}
    for (q, c), r in a.transition.items():
        if q in reach and r in reach:
            rev[r].append(q)
    co = set(a.finals & reach)
    frontier = deque(co)
    while frontier:
        q = frontier.popleft()
        for p in rev[q]:
            if p not in co:
                co.add(p)
                frontier.append(p)
    keep = reach & co
    if a.initial not in keep:
        # empty language: keep a bare initial state so the type stays total
        return Dfa({a.initial}, a.alphabet, {}, a.initial, frozenset())
    transition = {
        (q, c): r for (q, c), r in a.transition.items() if q in keep and r in keep
    }
    return Dfa(keep, a.alphabet, transition, a.initial, a.finals & keep)


def product(a: Dfa, b: Dfa) -> Dfa:
    """Automaton for the intersection of the two accepted languages."""
    if a.alphabet != b.alphabet:
        raise ValueError("alphabet mismatch")
    letters = sorted(a.alphabet, key=repr)
    initial = (a.initial, b.initial)
    states = {initial}
    transition: Dict[Tuple[State, Letter], State] = {}
    frontier = deque([initial])
    while frontier:
        qa, qb = frontier.popleft()
        for c in letters:
            ra = a.transition.get((qa, c))
            rb = b.transition.get((qb, c))
            if ra is None or rb is None:
                continue
            target = (ra, rb)
            transition[((qa, qb), c)] = target
            if target not in states:
                states.add(target)
                frontier.append(target)
    finals = {(qa, qb) for (qa, qb) in states if qa in a.finals and qb in b.finals}
    return Dfa(states, a.alphabet, transition, initial, finals)


def _sccs(a: Dfa) -> Dict[State, int]:
    """Tarjan, iterative; returns state -> component id."""
    adj = _adjacency(a)
    index: Dict[State, int] = {}
    low: Dict[State, int] = {}
    comp: Dict[State, int] = {}
    on_stack: set = set()
    stack: List[State] = []
    counter = 0
    ncomp = 0
    for root in sorted(a.states, key=repr):
        if root in index:
            continue
        work: List[Tuple[State, int]] = [(root, 0)]
        while work:
            q, ei = work[-1]
            if ei == 0:
                index[q] = low[q] = counter
                counter += 1
                stack.append(q)
                on_stack.add(q)
            edges = adj[q]
            advanced = False
            while ei < len(edges):
                r = edges[ei][1]
                ei += 1
                if r not in index:
                    work[-1] = (q, ei)
                    work.append((r, 0))
                    advanced = True
                    break
                if r in on_stack:
                    low[q] = min(low[q], index[r])
            if advanced:
                continue
            work.pop()
            if low[q] == index[q]:
                while True:
                    r = stack.pop()
                    on_stack.discard(r)
                    comp[r] = ncomp
                    if r == q:
                        break
                ncomp += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[q])
    return comp


def _internal_out_degrees(a: Dfa, comp: Dict[State, int]) -> Dict[State, int]:
    deg = {q: 0 for q in a.states}
    for (q, _), r in a.transition.items():
        if comp[q] == comp[r]:
            deg[q] += 1
    return deg


def is_infinite(a: Dfa) -> bool:
    """True iff the accepted language is infinite."""
    t = trim(a)
    comp = _sccs(t)
    return any(comp[q] == comp[r] for (q, _), r in t.transition.items())


def pump_triple(a: Dfa) -> Tuple[Word, Word, Word]:
    """Words (u, p, v) with p nonempty and u p^* v all accepted."""
    t = trim(a)
    comp = _sccs(t)
    adj = _adjacency(t)
    for q in sorted(t.states, key=repr):
        for c, r in adj[q]:
            if comp[r] != comp[q]:
                continue
            members = [s for s in t.states if comp[s] == comp[q]]
            closing = _path_word(adj, r, [q], allowed=members)
            assert closing is not None  # r and q share a component
            p_word = _join([c] + list(closing[0]))
            u = _path_word(adj, t.initial, [q])
            v = _path_word(adj, q, t.finals)
            assert u is not None and v is not None  # t is trim
            return u[0], p_word, v[0]
    raise ValueError("finite language")


def is_periodically_perfect(a: Dfa) -> bool:
    """True iff every long enough accepted word has a high power inside.

    Executable criterion: in the trim automaton each strongly connected
    component is a simple cycle, i.e. no state has two outgoing
    transitions that stay inside its component.
    """
    t = trim(a)
    comp = _sccs(t)
    deg = _internal_out_degrees(t, comp)
    return all(d <= 1 for d in deg.values())


def _longest_cycle(t: Dfa, comp: Dict[State, int]) -> int:
    # for simple-cycle components the cycle length equals the component
    # size (one state with a self-loop counts as length 1)
    sizes: Dict[int, int] = {}
    has_edge: Dict[int, bool] = {}
    for q in t.states:
        sizes[comp[q]] = sizes.get(comp[q], 0) + 1
    for (q, _), r in t.transition.items():
        if comp[q] == comp[r]:
            has_edge[comp[q]] = True
    lengths = [sizes[c] for c in has_edge]
    return max(lengths, default=0)


def perfectness_bound(a: Dfa, n: int) -> int:
    """Length N such that every accepted word of length >= N has exp >= n.

    N = |Q| * (n + 1) * c_max + |Q| on the trim automaton, where c_max is
    the longest component cycle.  An accepting path of length >= N spends
    at least (n + 1) * c_max consecutive steps inside one component (there
    are at most |Q| component segments and fewer than |Q| bridging steps),
    and winding around a cycle of length c <= c_max that long forces a
    factor p^n.  Conservative, not minimal.
    """
    t = trim(a)
    comp = _sccs(t)
    deg = _internal_out_degrees(t, comp)
    if any(d > 1 for d in deg.values()):
        raise ValueError("automaton is not periodically perfect")
    q = len(t.states)
    c_max = _longest_cycle(t, comp)
    return q * (n + 1) * c_max + q


def imperfection_witness(a: Dfa) -> Optional[Tuple[Word, Word, Word, Word]]:
    """Certificate (r, u, v, s) that the language is not periodically perfect.

    u and v are distinct nonempty loop words at a common state reached by
    r and completed by s, so r {u, v}* s is accepted; substituting u, v
    into a square-free-like word keeps the exponent bounded while lengths
    grow.  Returns None when the automaton is periodically perfect.
    """
    t = trim(a)
    comp = _sccs(t)
    adj = _adjacency(t)
    for q in sorted(t.states, key=repr):
        internal = [(c, r) for c, r in adj[q] if comp[r] == comp[q]]
        if len(internal) < 2:
            continue
        members = [s for s in t.states if comp[s] == comp[q]]
        loops = []
        for c, r in internal[:2]:
            closing = _path_word(adj, r, [q], allowed=members)
            assert closing is not None
            loops.append(_join([c] + list(closing[0])))
        rw = _path_word(adj, t.initial, [q])
        sw = _path_word(adj, q, t.finals)
        assert rw is not None and sw is not None
        return rw[0], loops[0], loops[1], sw[0]
    return None


def accepted_words(a: Dfa, max_len: int) -> List[Word]:
    """All accepted words of length <= max_len, shortest first."""
    return [w for n in range(max_len + 1) for w in accepted_words_of_length(a, n)]


def accepted_words_of_length(a: Dfa, length: int) -> List[Word]:
    """All accepted words of exactly the given length, sorted."""
    letters = sorted(a.alphabet, key=repr)
    frontier: List[Tuple[State, List[Letter]]] = [(a.initial, [])]
    for _ in range(length):
        nxt = []
        for q, w in frontier:
            for c in letters:
                r = a.transition.get((q, c))
                if r is not None:
                    nxt.append((r, w + [c]))
        frontier = nxt
        if not frontier:
            return []
    return [_join(w) for q, w in frontier if q in a.finals]


def dfa_to_json(a: Dfa) -> dict:
    """Automaton as a JSON-ready dict; state names are assigned q0, q1, ...

    Naming walks the automaton breadth first from the initial state with
    letters in sorted order, so equal automata serialize identically.
    """
    for c in a.alphabet:
        if not isinstance(c, str):
            raise ValueError("only string letters serialize to JSON")
    letters = sorted(a.alphabet)
    names: Dict[State, str] = {a.initial: "q0"}
    order = [a.initial]
    frontier = deque([a.initial])
    while frontier:
        q = frontier.popleft()
        for c in letters:
            r = a.transition.get((q, c))
            if r is not None and r not in names:
                names[r] = f"q{len(names)}"
                order.append(r)
                frontier.append(r)
    for q in sorted(a.states - set(names), key=repr):
        names[q] = f"q{len(names)}"
        order.append(q)
    transitions = sorted(
        [names[q], c, names[r]] for (q, c), r in a.transition.items()
    )
    return {
        "states": [names[q] for q in order],
        "alphabet": letters,
        "initial": "q0",
        "finals": sorted(names[q] for q in a.finals),
        "transitions": transitions,
    }


def dfa_from_json(data: Mapping) -> Dfa:
    try:
        states = list(data["states"])
        alphabet = list(data["alphabet"])
        initial = data["initial"]
        finals = list(data["finals"])
        triples = list(data["transitions"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed automaton object: {exc}") from exc
    transition = {}
    for item in triples:
        if len(item) != 3:
            raise ValueError(f"malformed transition {item!r}")
        q, c, r = item
        if (q, c) in transition:
            raise ValueError(f"nondeterministic transitions from {q!r} on {c!r}")
        transition[(q, c)] = r
    return Dfa(states, alphabet, transition, initial, finals)
