import dataclasses
import itertools
import random

import pytest

from expkit.bs import BSSpec, bs_oracle
from expkit.equations import (
    Const,
    Constraint,
    InconclusiveSearch,
    QuadSystem,
    Var,
    analyze,
    classify,
    constraint_element_with_exp,
    instantiate_witness,
    mu_image,
    pump,
    reduce,
    solve_case7,
    trivial_constraint,
    verify,
)
from expkit.graph_product import GPSpec, gp_oracle
from expkit.monoids import finite_monoid_oracle, integer_oracle
from expkit.words import exponent_of_periodicity

from oracles import ball_distances

Z2_TABLE = ((0, 1), (1, 0))
Z3_TABLE = ((0, 1, 2), (1, 2, 0), (2, 0, 1))

Z = integer_oracle()
FREE2 = gp_oracle(GPSpec(("a", "b"), frozenset(),
                         {"a": integer_oracle(), "b": integer_oracle()}))
ZXZ = gp_oracle(GPSpec(("1", "2"), frozenset({frozenset(("1", "2"))}),
                       {"1": integer_oracle(), "2": integer_oracle()}))

FREE_LETTER = {"a": "a:+1", "A": "a:-1", "b": "b:+1", "B": "b:-1"}


def free(word):
    return FREE2.evaluate(tuple(FREE_LETTER[ch] for ch in word))


def zz(i, j):
    w = ("1:+1",) * i if i >= 0 else ("1:-1",) * (-i)
    w += ("2:+1",) * j if j >= 0 else ("2:-1",) * (-j)
    return ZXZ.evaluate(w)


def ball(o, radius):
    return list(ball_distances(o.multiply, o.identity,
                               [o.letter_value[a] for a in o.letters], radius))


def z_system(*symbols):
    return QuadSystem(Z, ("X",), (tuple(symbols),), trivial_constraint(Z, ("X",)))


def free_system(variables, *equations):
    return QuadSystem(FREE2, variables, tuple(equations),
                      trivial_constraint(FREE2, variables))


def commutator_system():
    return free_system(
        ("X",),
        (Var("X"), Const(free("a")), Var("X", True), Const(free("A"))),
    )


# ---------------------------------------------------------------- construction


def test_system_requires_group_oracle():
    monoid = finite_monoid_oracle(((0, 1), (1, 1)))
    with pytest.raises(ValueError, match="group"):
        QuadSystem(monoid, ("X",), (), Constraint(((0,),), {"m1": 0},
                                                  {"X": frozenset({0})}))


def test_system_rejects_three_occurrences():
    with pytest.raises(ValueError, match="quadratic"):
        free_system(("X",), (Var("X"), Var("X"), Var("X")))


def test_system_rejects_undeclared_variable():
    with pytest.raises(ValueError, match="undeclared"):
        QuadSystem(Z, ("X",), ((Var("Y"), Const(1)),),
                   trivial_constraint(Z, ("X",)))


def test_system_rejects_mismatched_constraint_keys():
    with pytest.raises(ValueError, match="constraint"):
        QuadSystem(Z, ("X",), (), trivial_constraint(Z, ("X", "Y")))


def test_constraint_rejects_non_group_table():
    with pytest.raises(ValueError, match="not a group"):
        Constraint(((0, 1), (1, 1)), {"+1": 0, "-1": 0}, {"X": frozenset({0})})


def test_constraint_rejects_empty_target():
    with pytest.raises(ValueError, match="target"):
        Constraint(Z2_TABLE, {"+1": 0, "-1": 0}, {"X": frozenset()})


def test_constraint_inverse_target_of_inverse_variable():
    c = Constraint(Z3_TABLE, {"+1": 1, "-1": 2}, {"X": frozenset({1})})
    assert c.target(Var("X")) == frozenset({1})
    assert c.target(Var("X", True)) == frozenset({2})


def test_equations_normalize_constants_and_cancellations():
    s = free_system(
        ("X",),
        (Var("X"), Const(free("a")), Const(free("A")), Var("X", True)),
    )
    assert s.equations == ()


def test_equations_cyclically_reduce_conjugated_variable():
    # a X a^-1 is conjugate to X
    s = free_system(("X",), (Const(free("a")), Var("X"), Const(free("A"))))
    assert s.equations == ((Var("X"),),)


def test_equations_cyclically_strip_variable_conjugator():
    s = free_system(("X",), (Var("X"), Const(free("b")), Var("X", True)))
    assert s.equations == ((Const(free("b")),),)


# ---------------------------------------------------------------- verify


def test_verify_doubled_integer_equation():
    s = z_system(Var("X"), Const(1), Var("X"), Const(1))
    assert verify(s, {"X": -1}) is True
    assert verify(s, {"X": 0}) is False


def test_verify_free_commutator_against_direct_multiplication():
    s = commutator_system()
    a, x = free("a"), free("aaa")
    direct = FREE2.multiply(
        FREE2.multiply(FREE2.multiply(x, a), FREE2.invert(x)), FREE2.invert(a))
    assert FREE2.equal(direct, FREE2.identity)
    assert verify(s, {"X": x}) is True
    assert verify(s, {"X": free("ab")}) is False


def test_verify_missing_variable_raises():
    s = commutator_system()
    with pytest.raises(ValueError, match="misses variable"):
        verify(s, {})


def test_verify_respects_involution():
    s = free_system(("X",), (Var("X", True), Const(free("a"))))
    assert verify(s, {"X": free("a")}) is True


def test_verify_checks_constraint_membership():
    c = Constraint(Z2_TABLE, {"+1": 1, "-1": 1}, {"X": frozenset({1})})
    s = QuadSystem(Z, ("X",), (), c)
    assert verify(s, {"X": 3}) is True
    assert verify(s, {"X": 2}) is False


def test_mu_image_folds_normal_form():
    c = Constraint(Z3_TABLE, {"+1": 1, "-1": 2}, {"X": frozenset({0})})
    s = QuadSystem(Z, ("X",), (), c)
    assert mu_image(s, 4) == 1
    assert mu_image(s, -3) == 0


# ---------------------------------------------------------------- classify


def test_classify_commutator_is_case5_with_unit_conjugand():
    c = classify(commutator_system())
    assert c.number == 5 and c.variable == "X"
    assert c.u == (Const(free("a")),)
    assert c.v == (Const(free("A")),)


def test_classify_separate_equations_is_case2():
    s = free_system(("X",),
                    (Var("X"), Const(free("a"))),
                    (Var("X", True), Const(free("b"))))
    c = classify(s)
    assert c.number == 2 and c.equation_indices == (0, 1)


def test_classify_doubled_single_variable_is_case7():
    c = classify(z_system(Var("X"), Const(1), Var("X"), Const(1)))
    assert c.number == 7
    assert c.u == (Const(1),) and c.v == (Const(1),)


def test_classify_unused_variable_is_case1():
    s = free_system(("X", "Y"), (Var("X"), Const(free("a")), Var("X"), Const(free("a"))))
    c = classify(s)
    assert c.number == 1 and c.variable == "Y"


def test_classify_single_occurrence_is_case4():
    s = free_system(("X", "Y"),
                    (Var("X"), Const(free("a")), Var("Y"), Const(free("b")), Var("Y")))
    c = classify(s)
    assert c.number == 4 and c.variable == "X"


def test_classify_independent_equations_is_case3():
    s = free_system(("X", "Y"),
                    (Var("X"), Const(free("a")), Var("X"), Const(free("a"))),
                    (Var("Y"), Const(free("b")), Var("Y"), Const(free("b"))))
    c = classify(s)
    assert c.number == 3 and c.equation_indices == (0,)


def test_classify_two_doubled_variables_is_case6():
    s = free_system(
        ("X", "Y"),
        (Var("X"), Const(free("a")), Var("Y"), Const(free("b")),
         Var("X"), Const(free("A")), Var("Y"), Const(free("B"))),
    )
    c = classify(s)
    assert c.number == 6
    assert (c.variable, c.partner) == ("X", "Y")
    assert c.u == (Const(free("a")),)


def test_classify_requires_singleton_targets():
    c = Constraint(Z2_TABLE, {"+1": 1, "-1": 1}, {"X": frozenset({0, 1})})
    s = QuadSystem(Z, ("X",), (), c)
    with pytest.raises(ValueError, match="singleton"):
        classify(s)


def test_classify_requires_variables():
    s = QuadSystem(Z, (), (), trivial_constraint(Z, ()))
    with pytest.raises(ValueError, match="no variables"):
        classify(s)


# ---------------------------------------------------------------- reduce


def test_reduce_case2_eliminates_variable():
    a, b = free("a"), free("b")
    s = free_system(("X",), (Var("X"), Const(a)), (Var("X", True), Const(b)))
    r = reduce(s, classify(s))
    assert len(r.systems) == 1
    assert r.systems[0].variables == ()
    assert r.systems[0].equations == ((Const(FREE2.multiply(a, b)),),)
    assert r.consistent is True
    pulled = r.back({})
    assert FREE2.equal(pulled["X"], free("A"))


def test_reduce_case2_solvable_pair_round_trips():
    a = free("a")
    s = free_system(("X",), (Var("X"), Const(a)), (Var("X", True), Const(free("A"))))
    r = reduce(s, classify(s))
    assert r.systems[0].equations == ()
    pulled = r.back({})
    assert verify(s, pulled)
    assert r.forward(pulled) == ({},)


def test_reduce_case3_partitions_variables():
    s = free_system(("X", "Y"),
                    (Var("X"), Const(free("a")), Var("X"), Const(free("a"))),
                    (Var("Y"), Const(free("b")), Var("Y", True), Const(free("B"))))
    r = reduce(s, classify(s))
    assert r.systems[0].variables == ("X",)
    assert r.systems[1].variables == ("Y",)
    merged = r.back({"X": free("A")}, {"Y": free("b")})
    assert set(merged) == {"X", "Y"}


def test_reduce_case6_shears_partner_to_one_of_each_sign():
    s = free_system(
        ("X", "Y"),
        (Var("X"), Const(free("a")), Var("Y"), Const(free("b")),
         Var("X"), Const(free("A")), Var("Y"), Const(free("B"))),
    )
    r = reduce(s, classify(s))
    red = r.systems[0]
    assert red.totals("Y") == (1, 1)
    assert red.totals("X") == (2, 0)
    # constants on both sides of the freed occurrence merge
    assert red.equations[0] == (
        Var("X"), Const(free("b")), Var("X"), Var("Y", True),
        Const(free("AA")), Var("Y"), Const(free("B")),
    )
    assert classify(red).number == 5
    assert classify(red).variable == "Y"


def test_reduce_rejects_other_cases():
    s = commutator_system()
    with pytest.raises(ValueError, match="cases 2, 3 and 6"):
        reduce(s, classify(s))


def test_reduce_case2_flags_contradictory_parity():
    # X must be odd, but X = (+2)^-1 is even
    c = Constraint(Z2_TABLE, {"+1": 1, "-1": 1},
                   {"X": frozenset({1}), "Y": frozenset({0})})
    s = QuadSystem(Z, ("X", "Y"),
                   ((Var("X"), Const(2)),
                    (Var("X", True), Var("Y"))),
                   c)
    r = reduce(s, classify(s))
    assert r.consistent is False


# ---------------------------------------------------------------- constraint elements


def test_constraint_element_parity_target():
    c = Constraint(Z2_TABLE,
                   {"a:+1": 1, "a:-1": 1, "b:+1": 0, "b:-1": 0},
                   {"X": frozenset({0})})
    g = constraint_element_with_exp(FREE2, c, 1, 3)
    assert FREE2.nf(g) == ("a:+1", "b:+1", "b:+1", "b:+1")
    img = 0
    for letter in FREE2.nf(g):
        img = c.mul(img, c.mu_gen[letter])
    assert img == 1
    assert exponent_of_periodicity(FREE2.nf(g)) >= 3


def test_constraint_element_trivial_quotient():
    c = trivial_constraint(FREE2, ("X",))
    g = constraint_element_with_exp(FREE2, c, 0, 5)
    assert FREE2.nf(g) == ("a:+1",) * 5


def test_constraint_element_mod_three():
    c = Constraint(Z3_TABLE, {"+1": 1, "-1": 2}, {"X": frozenset({1})})
    assert constraint_element_with_exp(Z, c, 1, 4) == 4


def test_constraint_element_unreachable_target_exhausts_budget():
    # every generator maps to 0, so 1 is never hit
    c = Constraint(Z2_TABLE, {"+1": 0, "-1": 0}, {"X": frozenset({1})})
    with pytest.raises(InconclusiveSearch) as info:
        constraint_element_with_exp(Z, c, 1, 2, radius=4)
    assert info.value.budget == 4


def test_constraint_element_requires_torsion_free_group():
    finite = finite_monoid_oracle(Z2_TABLE)
    c = Constraint(((0,),), {a: 0 for a in finite.letters}, {"X": frozenset({0})})
    with pytest.raises(ValueError, match="torsion-free"):
        constraint_element_with_exp(finite, c, 0, 1)


# ---------------------------------------------------------------- pump


def test_pump_commutator_reaches_requested_exponent():
    s = commutator_system()
    case = classify(s)
    a10, w = pump(s, {"X": FREE2.identity}, case, 10)
    assert FREE2.equal(a10["X"], free("a" * 10))
    assert FREE2.equal(w.base, FREE2.identity)
    assert FREE2.equal(w.step, free("a"))
    assert w.multiplier == 1 and w.case == 5 and w.variable == "X"


@pytest.mark.parametrize("n", [1, 5, 10, 20])
def test_pump_commutator_threshold_sweep(n):
    s = commutator_system()
    a, _ = pump(s, {"X": FREE2.identity}, classify(s), n)
    assert verify(s, a)
    assert exponent_of_periodicity(FREE2.nf(a["X"])) >= n


def test_pump_witness_template_instantiates():
    s = commutator_system()
    _, w = pump(s, {"X": FREE2.identity}, classify(s), 5)
    at7 = instantiate_witness(s, w, 7)
    assert FREE2.equal(at7["X"], free("a" * 7))


def test_pump_case1_unused_variable():
    s = free_system(("X",))
    case = classify(s)
    assert case.number == 1
    a, w = pump(s, {"X": FREE2.identity}, case, 4)
    assert verify(s, a)
    assert exponent_of_periodicity(FREE2.nf(a["X"])) >= 4
    assert w.case == 1


def test_pump_case4_resolves_dependent_variable():
    # X occurs once; pumping Y forces X to compensate
    s = free_system(("X", "Y"),
                    (Var("X"), Const(free("a")), Var("Y"), Const(free("b")), Var("Y")))
    case = classify(s)
    assert case.number == 4 and case.variable == "X"
    sigma0 = {"X": free("B" + "A"), "Y": FREE2.identity}
    assert verify(s, sigma0)
    a, w = pump(s, sigma0, case, 5)
    assert verify(s, a)
    assert w.case == 4 and w.variable == "Y"
    assert exponent_of_periodicity(FREE2.nf(a["Y"])) >= 5


def test_pump_case5_swaps_value_when_conjugand_vanishes():
    s = free_system(("X", "Y"),
                    (Var("X"), Var("Y"), Var("X", True), Var("Y", True)))
    case = classify(s)
    assert case.number == 5 and case.u == (Var("Y"),)
    sigma0 = {"X": FREE2.identity, "Y": FREE2.identity}
    a, w = pump(s, sigma0, case, 6)
    assert verify(s, a)
    assert FREE2.equal(a["X"], free("a" * 6))
    assert w.case == 5 and FREE2.equal(w.step, free("a"))


def test_pump_case6_nondegenerate_steps_by_sheared_conjugand():
    # constants close to the identity at sigma = (1, 1); the shear turns
    # the partner equation into a case 5 whose conjugand evaluates to a^2
    s = free_system(
        ("X", "Y"),
        (Var("X"), Const(free("a")), Var("Y"), Const(free("b")),
         Var("X"), Const(free("A")), Var("Y"),
         Const(FREE2.invert(free("abA")))),
    )
    case = classify(s)
    assert case.number == 6
    sigma0 = {"X": FREE2.identity, "Y": FREE2.identity}
    assert verify(s, sigma0)
    a, w = pump(s, sigma0, case, 5)
    assert verify(s, a)
    assert w.variable == "Y" and w.case == 6
    assert FREE2.equal(a["Y"], free("a" * 6))
    assert FREE2.equal(a["X"], free("A" * 6))


def test_pump_case6_degenerate_shear_frees_partner():
    s = free_system(("X", "Y"), (Var("X"), Var("Y"), Var("X"), Var("Y")))
    case = classify(s)
    assert case.number == 6
    a, w = pump(s, {"X": FREE2.identity, "Y": FREE2.identity}, case, 5)
    assert verify(s, a)
    assert w.variable == "Y"
    assert FREE2.equal(a["Y"], free("a" * 5))
    assert FREE2.equal(a["X"], free("A" * 5))


def test_pump_rejects_case7():
    s = z_system(Var("X"), Const(1), Var("X"), Const(1))
    with pytest.raises(ValueError, match="finite case"):
        pump(s, {"X": -1}, classify(s), 3)


def test_pump_rejects_non_solution_base():
    s = commutator_system()
    with pytest.raises(ValueError, match="does not solve"):
        pump(s, {"X": free("b")}, classify(s), 3)


# ---------------------------------------------------------------- case 7


def test_case7_integer_doubled():
    s = z_system(Var("X"), Const(1), Var("X"), Const(1))
    assert solve_case7(s) == ({"X": -1},)


def test_case7_integer_odd_total_has_no_solution():
    s = z_system(Var("X"), Const(1), Var("X"), Const(2))
    assert solve_case7(s) == ()


def test_case7_direct_product():
    u = zz(1, 1)
    s = QuadSystem(ZXZ, ("X",), ((Var("X"), Const(u), Var("X"), Const(u)),),
                   trivial_constraint(ZXZ, ("X",)))
    sols = solve_case7(s)
    assert len(sols) == 1
    assert ZXZ.equal(sols[0]["X"], zz(-1, -1))
    brute = [x for x in ball(ZXZ, 4) if verify(s, {"X": x})]
    assert len(brute) == 1 and ZXZ.equal(brute[0], sols[0]["X"])


def test_case7_respects_constraint_filter():
    # x = -1 is odd; demanding an even image leaves nothing
    c = Constraint(Z2_TABLE, {"+1": 1, "-1": 1}, {"X": frozenset({0})})
    s = QuadSystem(Z, ("X",), ((Var("X"), Const(1), Var("X"), Const(1)),), c)
    assert solve_case7(s) == ()


def test_case7_requires_square_roots_capability():
    bare = dataclasses.replace(Z, square_roots=None)
    s = QuadSystem(bare, ("X",), ((Var("X"), Const(1), Var("X"), Const(1)),),
                   trivial_constraint(bare, ("X",)))
    with pytest.raises(ValueError, match="square_roots"):
        solve_case7(s)


def test_case7_propagates_infinite_square_root_error():
    o = bs_oracle(BSSpec(2, 3))
    t = o.letter_value["t"]
    s = QuadSystem(o, ("X",), ((Var("X"), Const(t), Var("X"), Const(t)),),
                   trivial_constraint(o, ("X",)))
    with pytest.raises(ValueError, match="infinite square-root"):
        solve_case7(s)


def test_case7_agrees_with_ball_search():
    rng = random.Random(7)
    consts = {
        "z": [1, -1, 2, -2],
        "zz": [zz(1, 0), zz(0, 1), zz(-1, 0), zz(0, -1), zz(1, 1)],
        "free": [free(w) for w in ("a", "b", "A", "B", "ab")],
    }
    oracles = {"z": Z, "zz": ZXZ, "free": FREE2}
    agree = 0
    for trial in range(30):
        kind = ("z", "zz", "free")[trial % 3]
        o = oracles[kind]
        u, v = rng.choice(consts[kind]), rng.choice(consts[kind])
        s = QuadSystem(o, ("X",), ((Var("X"), Const(u), Var("X"), Const(v)),),
                       trivial_constraint(o, ("X",)))
        if not s.equations or classify(s).number != 7:
            continue
        got = {o.nf(d["X"]) for d in solve_case7(s)}
        radius4 = ball(o, 4)
        brute = {o.nf(x) for x in radius4 if verify(s, {"X": x})}
        assert brute <= got
        inside = {o.nf(d["X"]) for d in solve_case7(s) if d["X"] in set(radius4)}
        assert inside == brute
        agree += 1
    assert agree >= 25


# ---------------------------------------------------------------- analyze


def test_analyze_commutator_infinite_with_verified_samples():
    rep = analyze(commutator_system(), 3)
    assert rep.verdict == "infinite"
    assert [n for n, _, _ in rep.samples] == [1, 5, 10, 20]
    assert all(e >= n for n, _, e in rep.samples)
    assert all(verify(commutator_system(), a) for _, a, _ in rep.samples)


def test_analyze_doubled_integer_finite():
    rep = analyze(z_system(Var("X"), Const(1), Var("X"), Const(1)), 3)
    assert rep.verdict == "finite"
    assert rep.solutions == ({"X": -1},)


def test_analyze_conjugacy_obstruction_is_inconclusive():
    s = free_system(("X",),
                    (Var("X"), Const(free("a")), Var("X", True), Const(free("b"))))
    rep = analyze(s, 3)
    assert rep.verdict == "inconclusive"
    assert "radius 3" in rep.reason
    # obstruction: nothing in a radius-4 ball conjugates a onto b^-1
    a, binv = free("a"), free("B")
    hits = [x for x in ball(FREE2, 4)
            if FREE2.equal(FREE2.multiply(FREE2.multiply(x, a), FREE2.invert(x)), binv)]
    assert hits == []


def test_analyze_case2_contradiction_is_finite_empty():
    s = free_system(("X",),
                    (Var("X"), Const(free("a"))),
                    (Var("X", True), Const(free("b"))))
    rep = analyze(s, 2)
    assert rep.verdict == "finite" and rep.solutions == ()


def test_analyze_case2_back_maps_unique_solution():
    s = free_system(("X",),
                    (Var("X"), Const(free("a"))),
                    (Var("X", True), Const(free("A"))))
    rep = analyze(s, 2)
    assert rep.verdict == "finite" and len(rep.solutions) == 1
    assert FREE2.equal(rep.solutions[0]["X"], free("A"))


def test_analyze_case3_split_combines_finite_and_infinite():
    s = free_system(("X", "Y"),
                    (Var("X"), Const(free("a")), Var("X"), Const(free("a"))),
                    (Var("Y"), Const(free("b")), Var("Y", True), Const(free("B"))))
    rep = analyze(s, 2)
    assert rep.verdict == "infinite"
    assert rep.witness.variable == "Y"
    for _, a, _ in rep.samples:
        assert verify(s, a)
        assert FREE2.equal(a["X"], free("A"))


def test_analyze_degenerate_case6_infinite():
    s = free_system(("X", "Y"), (Var("X"), Var("Y"), Var("X"), Var("Y")))
    rep = analyze(s, 2)
    assert rep.verdict == "infinite" and rep.witness.variable == "Y"


def test_analyze_splits_non_singleton_targets():
    c = Constraint(Z2_TABLE, {"+1": 1, "-1": 1}, {"X": frozenset({0, 1})})
    rep = analyze(QuadSystem(Z, ("X",), (), c), 2)
    assert rep.verdict == "infinite"
    # the even-parity branch wins first and all its samples stay even
    assert all(a["X"] % 2 == 0 for _, a, _ in rep.samples)
    assert all(e >= n for n, _, e in rep.samples)


def test_analyze_branch_cap_is_inconclusive():
    z6 = tuple(tuple((i + j) % 6 for j in range(6)) for i in range(6))
    full = frozenset(range(6))
    c = Constraint(z6, {"+1": 1, "-1": 5},
                   {"W": full, "X": full, "Y": full, "Z": full})
    rep = analyze(QuadSystem(Z, ("W", "X", "Y", "Z"), (), c), 2)
    assert rep.verdict == "inconclusive"
    assert "branches" in rep.reason


def test_analyze_variable_free_branches():
    sat = QuadSystem(Z, (), (), trivial_constraint(Z, ()))
    assert analyze(sat, 1).verdict == "finite"
    assert analyze(sat, 1).solutions == ({},)
    unsat = QuadSystem(Z, (), ((Const(3),),), trivial_constraint(Z, ()))
    assert analyze(unsat, 1).solutions == ()


def test_analyze_lone_case4_variable_is_finite():
    s = free_system(("X",), (Var("X"), Const(free("ab"))))
    rep = analyze(s, 2)
    assert rep.verdict == "finite" and len(rep.solutions) == 1
    assert FREE2.equal(rep.solutions[0]["X"], free("BA"))


# ---------------------------------------------------------------- properties


def random_system(rng, o, consts, plant):
    nvars = rng.randint(1, 3)
    names = ("X", "Y", "Z")[:nvars]
    sigma = {n: rng.choice(consts + [o.identity]) for n in names}
    left = {n: 2 for n in names}
    eqs = []
    for _ in range(rng.randint(1, 2)):
        word = []
        for _ in range(rng.randint(2, 6)):
            pool = [n for n in names if left[n] > 0]
            if pool and rng.random() < 0.5:
                n = rng.choice(pool)
                left[n] -= 1
                word.append(Var(n, rng.random() < 0.5))
            else:
                word.append(Const(rng.choice(consts)))
        if plant:
            val = o.identity
            for s in word:
                g = s.value if isinstance(s, Const) else sigma[s.name]
                if isinstance(s, Var) and s.inv:
                    g = o.invert(g)
                val = o.multiply(val, g)
            word.append(Const(o.invert(val)))
        eqs.append(tuple(word))
    system = QuadSystem(o, names, tuple(eqs), trivial_constraint(o, names))
    return system, (sigma if plant else None)


def expected_case(s):
    totals = {n: s.totals(n) for n in s.variables}
    if any(p + q == 0 for p, q in totals.values()):
        return 1
    for n in s.variables:
        if sum(1 for e in s.equations
               if any(isinstance(sym, Var) and sym.name == n for sym in e)) == 2:
            return 2
    if len(s.equations) >= 2:
        return 3
    if any(p + q == 1 for p, q in totals.values()):
        return 4
    if any(t == (1, 1) for t in totals.values()):
        return 5
    live = [n for n in s.variables if sum(totals[n]) > 0]
    return 6 if len(live) >= 2 else 7


def test_classification_matches_occurrence_recount_and_reductions_round_trip():
    consts_f = [free(w) for w in ("a", "b", "A", "B", "ab")]
    consts_z = [zz(1, 0), zz(0, 1), zz(-1, 0), zz(0, -1), zz(1, 1)]
    rng = random.Random(11)
    checked = {"classify": 0, "planted": 0, "back": 0, "forward": 0}
    for trial in range(160):
        o, consts = ((FREE2, consts_f), (ZXZ, consts_z))[trial % 2]
        s, sigma = random_system(rng, o, consts, plant=trial % 4 < 2)
        case = classify(s)
        assert case.number == expected_case(s)
        checked["classify"] += 1
        if sigma is not None:
            assert verify(s, sigma)
            checked["planted"] += 1
        if case.number not in (2, 3, 6):
            continue
        r = reduce(s, case)
        if not r.consistent:
            continue
        if sigma is not None:
            fwd = r.forward(sigma)
            for subsystem, fa in zip(r.systems, fwd):
                assert verify(subsystem, fa)
            checked["forward"] += 1
            pulled = r.back(*fwd)
            assert verify(s, pulled)
            for n in s.variables:
                assert o.equal(pulled[n], sigma[n])
        radius2 = ball(o, 2)
        subsols = []
        for subsystem in r.systems:
            found = None
            for combo in itertools.product(radius2, repeat=len(subsystem.variables)):
                cand = dict(zip(subsystem.variables, combo))
                if verify(subsystem, cand):
                    found = cand
                    break
            subsols.append(found)
        if all(x is not None for x in subsols):
            pulled = r.back(*subsols)
            assert verify(s, pulled)
            checked["back"] += 1
    assert checked["classify"] >= 150
    assert checked["planted"] >= 60
    assert checked["back"] >= 20
    assert checked["forward"] >= 10
