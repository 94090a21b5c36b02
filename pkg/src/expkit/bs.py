"""Baumslag-Solitar groups BS(p,q) = <a, t | t a^p t^-1 = a^q>.

Words are kept in alternating exponent form: an integer a-exponent,
then pairs of a t-sign and the following a-exponent.  The convergent
rewriting system S becomes integer division on the exponents (always
with nonnegative remainder), Britton reduction removes opposite t-pairs
around divisible exponents, and both drive the square-root machinery:
a decidable test for when the group has only finite square-root sets,
explicit infinite families of roots when it does not, and a bounded
enumerator used to certify uniqueness.
"""

from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .monoids import MonoidOracle
from .words import exponent_of_periodicity


@dataclass(frozen=True)
class BSSpec:
    p: int
    q: int

    def __post_init__(self):
        if not (1 <= self.p <= abs(self.q)):
            raise ValueError("parameters must satisfy 1 <= p <= |q|")


@dataclass(frozen=True)
class BSWord:
    """a^head t^(e1) a^(n1) t^(e2) a^(n2) ... in run-length form."""

    head: int = 0
    tail: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        for eps, _ in self.tail:
            if eps not in (1, -1):
                raise ValueError("t-sign must be +1 or -1")

    @staticmethod
    def from_string(s: str) -> "BSWord":
        head = 0
        tail: List[Tuple[int, int]] = []
        for c in s:
            if c == "a" or c == "A":
                d = 1 if c == "a" else -1
                if tail:
                    eps, n = tail[-1]
                    tail[-1] = (eps, n + d)
                else:
                    head += d
            elif c == "t" or c == "T":
                tail.append((1 if c == "t" else -1, 0))
            else:
                raise ValueError(f"letter {c!r} not in a, A, t, T")
        return BSWord(head, tuple(tail))

    def to_string(self) -> str:
        parts = [_render_exp(self.head)]
        for eps, n in self.tail:
            parts.append("t" if eps == 1 else "T")
            parts.append(_render_exp(n))
        return "".join(parts)

    def to_letters(self) -> Tuple[str, ...]:
        return tuple(self.to_string())

    def __len__(self) -> int:
        return abs(self.head) + sum(1 + abs(n) for _, n in self.tail)


def _render_exp(n: int) -> str:
    return "a" * n if n >= 0 else "A" * (-n)


EMPTY = BSWord()


def a_power(n: int) -> BSWord:
    return BSWord(n, ())


def t_power(eps: int, k: int = 1) -> BSWord:
    return BSWord(0, ((eps, 0),) * k)


def concat(u: BSWord, v: BSWord) -> BSWord:
    if not u.tail:
        return BSWord(u.head + v.head, v.tail)
    if v.head == 0 and not v.tail:
        return u
    eps, n = u.tail[-1]
    return BSWord(u.head, u.tail[:-1] + ((eps, n + v.head),) + v.tail)


def inverse(w: BSWord) -> BSWord:
    runs = [w.head] + [n for _, n in w.tail]
    signs = [eps for eps, _ in w.tail]
    head = -runs[-1]
    tail = tuple(
        (-signs[i], -runs[i]) for i in range(len(signs) - 1, -1, -1)
    )
    return BSWord(head, tail)


def t_sequence(w: BSWord) -> Tuple[int, ...]:
    return tuple(eps for eps, _ in w.tail)


def t_length(w: BSWord) -> int:
    return len(w.tail)


def _split(n: int, d: int) -> Tuple[int, int]:
    # n = k*d + r with 0 <= r < |d|
    r = n % abs(d)
    return (n - r) // d, r


def _nf_pass(spec: BSSpec, w: BSWord) -> Tuple[BSWord, bool]:
    p, q = spec.p, spec.q
    head = w.head
    out: List[List[int]] = []
    changed = False
    for eps, n_after in w.tail:
        n_before = out[-1][1] if out else head
        k, r = _split(n_before, q if eps == 1 else p)
        carry = k * (p if eps == 1 else q)
        if k != 0:
            changed = True
        if out:
            out[-1][1] = r
        else:
            head = r
        if r == 0 and out and out[-1][0] == -eps:
            # the split left t^(-eps) directly against t^(eps)
            changed = True
            out.pop()
            if out:
                out[-1][1] += carry + n_after
            else:
                head += carry + n_after
        else:
            out.append([eps, carry + n_after])
    return BSWord(head, tuple((e, n) for e, n in out)), changed


def rewrite_S(spec: BSSpec, w: BSWord) -> BSWord:
    """The S-normal form: every a-run before t lies in [0, |q|), every
    run before t^-1 lies in [0, p), and no opposite t-pair touches.
    """
    while True:
        w, changed = _nf_pass(spec, w)
        if not changed:
            return w


nf_S = rewrite_S


def is_irreducible_S(spec: BSSpec, w: BSWord) -> bool:
    runs = [w.head] + [n for _, n in w.tail]
    for i, (eps, _) in enumerate(w.tail):
        bound = abs(spec.q) if eps == 1 else spec.p
        if not (0 <= runs[i] < bound):
            return False
        if runs[i] == 0 and i > 0 and w.tail[i - 1][0] == -eps:
            return False
    return True


def _britton_redex(spec: BSSpec, w: BSWord, i: int) -> Optional[int]:
    """Exponent replacing t^(e_i) a^(n_i) t^(e_{i+1}) if that factor
    Britton-reduces, else None."""
    (e1, n), (e2, _) = w.tail[i], w.tail[i + 1]
    if e1 == 1 and e2 == -1 and n % spec.p == 0:
        return (n // spec.p) * spec.q
    if e1 == -1 and e2 == 1 and n % spec.q == 0:
        return (n // spec.q) * spec.p
    return None


def is_britton_reduced(spec: BSSpec, w: BSWord) -> bool:
    return all(
        _britton_redex(spec, w, i) is None for i in range(len(w.tail) - 1)
    )


def britton_reduce(spec: BSSpec, w: BSWord) -> BSWord:
    head = w.head
    tail = [list(e) for e in w.tail]
    i = 0
    while i + 1 < len(tail):
        word = BSWord(head, tuple((e, n) for e, n in tail))
        rep = _britton_redex(spec, word, i)
        if rep is None:
            i += 1
            continue
        gained = rep + tail[i + 1][1]
        del tail[i : i + 2]
        if i > 0:
            tail[i - 1][1] += gained
        else:
            head += gained
        i = max(i - 1, 0)
    return BSWord(head, tuple((e, n) for e, n in tail))


def cyclically_britton_reduce(spec: BSSpec, w: BSWord) -> Tuple[BSWord, BSWord]:
    """Rotate t-blocks until every rotation is Britton-reduced.

    Returns (reduced, x) with w = x * reduced * x^-1.
    """
    w = britton_reduce(spec, w)
    x = EMPTY
    while len(w.tail) >= 2:
        e_last, n_last = w.tail[-1]
        e_first = w.tail[0][0]
        boundary = n_last + w.head
        if e_last == 1 and e_first == -1 and boundary % spec.p == 0:
            pass
        elif e_last == -1 and e_first == 1 and boundary % spec.q == 0:
            pass
        else:
            break
        # conjugate by the first block c = a^head t^(e_first)
        c = BSWord(w.head, ((e_first, 0),))
        rotated = BSWord(
            w.tail[0][1],
            w.tail[1:-1] + ((e_last, n_last + w.head), (e_first, 0)),
        )
        x = concat(x, c)
        w = britton_reduce(spec, rotated)
    return w, x


def alpha_beta(spec: BSSpec, x: BSWord) -> Tuple[BSWord, int]:
    """Split nf_S(x) as alpha * a^beta with alpha ending in a t-letter."""
    nf = rewrite_S(spec, x)
    if not nf.tail:
        return EMPTY, nf.head
    beta = nf.tail[-1][1]
    alpha = BSWord(nf.head, nf.tail[:-1] + ((nf.tail[-1][0], 0),))
    return alpha, beta


def has_fsqrt(p: int, q: int) -> bool:
    """Whether every element of BS(p,q) has finitely many square roots:
    the parameter sum is nonzero, and p = 1 or both parameters are odd.
    """
    if not (1 <= p <= abs(q)):
        raise ValueError("parameters must satisfy 1 <= p <= |q|")
    return (p + q != 0) and (p == 1 or (p % 2 == 1 and q % 2 == 1))


def infinite_sqrt_witness(spec: BSSpec, n: int) -> Tuple[BSWord, BSWord]:
    """The n-th member of an infinite family of square roots of a fixed
    element g, for groups without the finite square-root property.
    Returns (x_n, g) with x_n^2 = g.
    """
    p, q = spec.p, spec.q
    if has_fsqrt(p, q):
        raise ValueError("square roots are finite for these parameters")
    if q == -p:
        # (t a^(pn))^2 = t^2 since conjugation by t negates a^p-blocks
        return BSWord(0, ((1, p * n),)), t_power(1, 2)
    if p % 2 == 0:
        u = BSWord(1, ((-1, 1), (1, 0)))
        g = a_power(p)
        mid = a_power(p // 2)
    else:
        # p odd forces q even here; swapping the roles of t and t^-1
        # exchanges p and q, giving the mirrored family
        u = BSWord(1, ((1, 1), (-1, 0)))
        g = a_power(q)
        mid = a_power(q // 2)
    x = EMPTY
    for _ in range(n):
        x = concat(x, u)
    x = concat(x, mid)
    u_inv = inverse(u)
    for _ in range(n):
        x = concat(x, u_inv)
    return x, g


def _abelianized(w: BSWord) -> Tuple[int, int]:
    # (total a-exponent, total t-exponent)
    return (
        w.head + sum(n for _, n in w.tail),
        sum(eps for eps, _ in w.tail),
    )


def square_roots_bounded(
    spec: BSSpec, g: BSWord, t_bound: int, a_bound: int
) -> Set[BSWord]:
    """All Britton-reduced x with at most t_bound t-letters and all
    a-exponents within a_bound satisfying x^2 = g, as S-normal forms.
    """
    if t_bound < 0 or a_bound < 0:
        raise ValueError("bounds must be nonnegative")
    g_nf = rewrite_S(spec, g)
    a_sum, t_sum = _abelianized(g_nf)
    if t_sum % 2 != 0:
        return set()
    half_t = t_sum // 2
    d = spec.q - spec.p

    roots: Set[BSWord] = set()
    span = range(-a_bound, a_bound + 1)

    def a_constraint_ok(total: int) -> bool:
        # abelianization: t-sums halve exactly, a-sums halve modulo q - p
        if d == 0:
            return 2 * total == a_sum
        return (2 * total - a_sum) % abs(d) == 0

    def sign_sequences(m: int) -> Iterator[Tuple[int, ...]]:
        if m == 0:
            yield ()
            return
        for mask in range(1 << m):
            seq = tuple(1 if mask >> i & 1 else -1 for i in range(m))
            if sum(seq) == half_t:
                yield seq

    candidates: List[BSWord] = []

    def collect(signs: Tuple[int, ...]) -> None:
        m = len(signs)

        def rec(runs: List[int]) -> None:
            filled = len(runs)
            if filled == m + 1:
                if a_constraint_ok(sum(runs)):
                    candidates.append(
                        BSWord(
                            runs[0],
                            tuple((signs[i], runs[i + 1]) for i in range(m)),
                        )
                    )
                return
            for n in span:
                if 0 < filled <= m - 1:
                    e1, e2 = signs[filled - 1], signs[filled]
                    if e1 == 1 and e2 == -1 and n % spec.p == 0:
                        continue
                    if e1 == -1 and e2 == 1 and n % spec.q == 0:
                        continue
                if d == 0:
                    done = sum(runs) + n
                    rest = m - filled
                    lo = done - rest * a_bound
                    hi = done + rest * a_bound
                    if not (2 * lo <= a_sum <= 2 * hi):
                        continue
                runs.append(n)
                rec(runs)
                runs.pop()

        rec([])

    for m in range(t_bound + 1):
        for seq in sign_sequences(m):
            collect(seq)

    for x in candidates:
        if rewrite_S(spec, concat(x, x)) == g_nf:
            roots.add(rewrite_S(spec, x))
    return roots


def pump_nf_family(
    spec: BSSpec,
    u: BSWord,
    w: BSWord,
    v: BSWord,
    n_max: int,
    length_cap: int = 100_000,
) -> List[Tuple[int, Optional[str], int]]:
    """Normal forms of u w^n v for n = 0..n_max with their exponents of
    periodicity.  Entries longer than length_cap keep the word field
    empty and report the best cheap lower bound on the exponent: the
    largest single-letter run of the alternating form.
    """
    if rewrite_S(spec, w) == EMPTY:
        raise ValueError("the pumped element must not be the identity")
    out: List[Tuple[int, Optional[str], int]] = []
    left = rewrite_S(spec, u)
    for n in range(n_max + 1):
        el = rewrite_S(spec, concat(left, v))
        if len(el) <= length_cap:
            s = el.to_string()
            out.append((n, s, exponent_of_periodicity(s)))
        else:
            bound = max(
                [1]
                + [abs(el.head)]
                + [abs(k) for _, k in el.tail]
                + [_longest_sign_run(el)]
            )
            out.append((n, None, bound))
        left = rewrite_S(spec, concat(left, w))
    return out


def _longest_sign_run(w: BSWord) -> int:
    # longest run of equal t-letters in the rendered word
    best = run = 0
    prev_eps = 0
    for eps, n in w.tail:
        run = run + 1 if eps == prev_eps else 1
        best = max(best, run)
        prev_eps = eps if n == 0 else 0
    return best


def bs_oracle(spec: BSSpec) -> MonoidOracle:
    """MonoidOracle over canonical S-normal forms.

    square_roots searches within bounds grown from the target's normal
    form (its t-length plus two, its largest exponent plus the larger
    parameter); a root outside those bounds is not found, which is
    acceptable only because roots are unique when they are finite.
    Calling it on a group without the finite square-root property is an
    error.
    """
    p, q = spec.p, spec.q
    fsqrt = has_fsqrt(p, q)

    def multiply(x: BSWord, y: BSWord) -> BSWord:
        return rewrite_S(spec, concat(x, y))

    def nf(x: BSWord) -> Tuple[str, ...]:
        return x.to_letters()

    def square_roots(g: BSWord) -> FrozenSet[BSWord]:
        if not fsqrt:
            raise ValueError(
                "BS(%d,%d) has infinite square-root sets" % (p, q)
            )
        g_nf = rewrite_S(spec, g)
        t_bound = t_length(g_nf) + 2
        exps = [abs(g_nf.head)] + [abs(n) for _, n in g_nf.tail]
        a_bound = max(exps + [p, abs(q)]) + 2
        return frozenset(square_roots_bounded(spec, g_nf, t_bound, a_bound))

    return MonoidOracle(
        name=f"BS({p},{q})",
        identity=EMPTY,
        multiply=multiply,
        equal=lambda x, y: x == y,
        letters=("a", "A", "t", "T"),
        letter_value={
            "a": a_power(1),
            "A": a_power(-1),
            "t": t_power(1),
            "T": t_power(-1),
        },
        nf=nf,
        invert=lambda x: rewrite_S(spec, inverse(x)),
        square_roots=square_roots,
        finite_power_submonoid=lambda x: x == EMPTY,
        is_group=True,
        torsion_free=True,
        sqrt_of_identity_trivial=fsqrt,
    )
