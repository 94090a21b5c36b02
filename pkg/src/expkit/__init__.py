"""Exponents of periodicity: words, automata, traces, graph products,
Baumslag-Solitar groups and quadratic equations.

The package is organised around one question: given a family of elements
written in normal form, how fast do repeated factors (powers p^e inside a
word) grow?  `words` has the basic combinatorics, `fsa`/`traces`/`trace_pump`
cover recognisable trace languages, `monoids`/`graph_product`/`bs` supply
concrete algebraic backends, and `equations` runs a small quadratic-equation
solver on top of them.  `cli` exposes everything as JSON-in/JSON-out tasks.
"""

from expkit.bs import (
    BSSpec,
    BSWord,
    bs_oracle,
    has_fsqrt,
    infinite_sqrt_witness,
    pump_nf_family,
    rewrite_S,
    square_roots_bounded,
)
from expkit.equations import Const, QuadSystem, Var, analyze, classify, reduce, verify
from expkit.fsa import Dfa, imperfection_witness, is_periodically_perfect, perfectness_bound
from expkit.graph_product import (
    GPSpec,
    gp_element,
    gp_identity,
    gp_oracle,
    has_finite_power_submonoid,
    nf_global,
    pump_family_nf,
    square_roots,
)
from expkit.monoids import (
    MonoidOracle,
    finite_monoid_oracle,
    heisenberg_oracle,
    integer_oracle,
    polycyclic_oracle,
    power_profile,
)
from expkit.trace_pump import build_pref_automaton, certify_pumping_family, lex_filter
from expkit.traces import IndepAlphabet, Trace, is_lex_nf, lex_nf
from expkit.words import apply_morphism, exponent_of_periodicity, thue_morse_prefix

__all__ = [
    "BSSpec",
    "BSWord",
    "Const",
    "Dfa",
    "GPSpec",
    "IndepAlphabet",
    "MonoidOracle",
    "QuadSystem",
    "Trace",
    "Var",
    "analyze",
    "apply_morphism",
    "bs_oracle",
    "build_pref_automaton",
    "certify_pumping_family",
    "classify",
    "exponent_of_periodicity",
    "finite_monoid_oracle",
    "gp_element",
    "gp_identity",
    "gp_oracle",
    "has_finite_power_submonoid",
    "has_fsqrt",
    "heisenberg_oracle",
    "imperfection_witness",
    "infinite_sqrt_witness",
    "integer_oracle",
    "is_lex_nf",
    "is_periodically_perfect",
    "lex_filter",
    "lex_nf",
    "nf_global",
    "perfectness_bound",
    "polycyclic_oracle",
    "power_profile",
    "pump_family_nf",
    "pump_nf_family",
    "reduce",
    "rewrite_S",
    "square_roots",
    "square_roots_bounded",
    "thue_morse_prefix",
    "verify",
]
