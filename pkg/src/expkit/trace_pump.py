"""Prefix automaton for pumped trace families u p^n v.

States track which suffix of u, which cyclic rotation of p and which
suffix of v can still absorb input; a complete sink catches everything
else.  Filtering the automaton against the normal-form language yields a
machine whose language certifies that { nf(u p^n v) } is periodically
perfect, and :func:`certify_pumping_family` packages the whole check as
a JSON-ready report.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, Tuple

from .fsa import Dfa, dfa_to_json, is_periodically_perfect, product, trim
from .traces import IndepAlphabet, Trace, lexnf_dfa
from .words import exponent_of_periodicity

SINK = "sink"


def _letter_trace(alph: IndepAlphabet, template, letter) -> Trace:
    return Trace(alph, letter if isinstance(template, str) else (letter,))


def _independent_of_all(alph: IndepAlphabet, letter, *traces: Trace) -> bool:
    return all(
        alph.independent(letter, c) for t in traces for c in set(t.word)
    )


def build_pref_automaton(u: Trace, p: Trace, v: Trace) -> Dfa:
    """Complete DFA accepting the words that can start some u p^n v.

    Transitions from (r, q, s): a letter is consumed by the u-suffix r
    when it is minimal there; otherwise by the rotation q when it is
    minimal there and independent of r (the rotation advances, q = a q'
    becomes q' a); otherwise by the v-suffix when it is minimal there and
    independent of r q.  Exactly one rule can apply, everything else
    falls into the sink.  All non-sink states are final.
    """
    alph = u.alphabet
    if v.alphabet != alph or p.alphabet != alph:
        raise ValueError("alphabet mismatch")
    if len(p.word) == 0:
        raise ValueError("pump trace must be nonempty")
    occurring = set(u.word) | set(p.word) | set(v.word)
    letters = [c for c in alph.letters if c in occurring]
    initial = (u, p, v)
    states = {initial}
    transition: Dict[Tuple, Tuple] = {}
    frontier = deque([initial])
    while frontier:
        state = frontier.popleft()
        r, q, s = state
        for a in letters:
            r1 = r.remove_minimal(a)
            if r1 is not None:
                target = (r1, q, s)
            else:
                q1 = q.remove_minimal(a)
                if q1 is not None and _independent_of_all(alph, a, r):
                    target = (r, q1 * _letter_trace(alph, q.word, a), s)
                else:
                    s1 = s.remove_minimal(a)
                    if s1 is not None and _independent_of_all(alph, a, r, q):
                        target = (r, q, s1)
                    else:
                        target = SINK
            transition[(state, a)] = target
            if target != SINK and target not in states:
                states.add(target)
                frontier.append(target)
    finals = set(states)
    for a in letters:
        transition[(SINK, a)] = SINK
    states.add(SINK)
    return Dfa(states, letters, transition, initial, finals)


def lex_filter(a: Dfa, alph: IndepAlphabet) -> Dfa:
    """Trim intersection of the automaton with the normal-form language."""
    nf = lexnf_dfa(alph)
    if nf.alphabet != a.alphabet:
        restricted = {
            (q, c): r for (q, c), r in nf.transition.items() if c in a.alphabet
        }
        nf = Dfa(nf.states, a.alphabet, restricted, nf.initial, nf.finals)
    return trim(product(a, nf))


def certify_pumping_family(u: Trace, p: Trace, v: Trace, n_max: int) -> dict:
    """Certify that the normal forms of u p^n v form a perfect family.

    The report carries the perfectness verdict of the filtered prefix
    automaton, the normal forms with their exponents for n <= n_max, and
    whether each length-min(n, |u p^n v|) normal-form prefix is accepted.
    """
    if len(p.word) == 0:
        raise ValueError("pump trace must be nonempty")
    filtered = lex_filter(build_pref_automaton(u, p, v), u.alphabet)
    perfect = is_periodically_perfect(filtered)
    entries = []
    prefixes_ok = True
    cur = u
    for n in range(n_max + 1):
        word = (cur * v).word
        prefix = word[: min(n, len(word))]
        accepted = filtered.accepts(prefix)
        prefixes_ok = prefixes_ok and accepted
        entries.append(
            {
                "n": n,
                "word": word if isinstance(word, str) else list(word),
                "exp": exponent_of_periodicity(word),
            }
        )
        cur = cur * p
    return {
        "perfect": perfect,
        "normal_forms": entries,
        "automaton": dfa_to_json(filtered),
        "prefixes_accepted": prefixes_ok,
    }
