import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratcalc.checks import make_family, random_object, run_check
from stratcalc.diagram import (
    Diagram,
    delta,
    diagram_sum,
    extend_by_zero,
    holim,
    random_complex,
    random_diagram,
    restrict,
    up_block,
)
from stratcalc.homalg import ChainComplex, ChainMap, Matrix, cone, shift
from stratcalc.linalg import QQ, Field
from stratcalc.poset import FinitePoset, MonotoneMap, NotComparable, catalog, named_poset, wreath
from stratcalc.strat.micro import SdDiagram
from stratcalc.strat import (
    Fibered,
    FiltrationKind,
    NotStrict,
    Tautological,
    check_glue_conditions,
    cover_formula_check,
    excision_C,
    excision_L,
    fibered_instances,
    filtration,
    filtration_identities,
    fundamental_ops,
    glue,
    gluing_diagram,
    graded_piece,
    is_coconnective,
    is_connective,
    link_gluing,
    mayer_vietoris_C,
    mayer_vietoris_L,
    microcosm_check,
    nanocosm_check,
    nanocosm_limit,
    orthogonality_check,
    pushforward_check,
    quotient_check,
    reflected_reconstruction,
    refined_check,
    restricted_check,
    strictness_check,
    tautological_witness,
    tcofib_formula_check,
    tfib_formula_check,
    tstructure_report,
    twisted_reconstruction,
    y_commutation,
)

K = ChainComplex.sphere(QQ, 0)
I = named_poset("[1]")
C2 = named_poset("[2]")
B2 = named_poset("B2")
PT = named_poset("pt")
FIELDS = [QQ, Field(2), Field(3)]


def same(a: Diagram, b: Diagram) -> bool:
    return a.shape.elements == b.shape.elements and all(a[x].homology() == b[x].homology() for x in a.shape.elements)


def arrow(A: ChainComplex, B: ChainComplex, f: ChainMap) -> Diagram:
    return Diagram(I, {"0": A, "1": B}, {("0", "1"): f})


def families(P, field=QQ):
    return [Tautological(P, field), Fibered(MonotoneMap.identity(P), field)]


# ---------------------------------------------------------------- recollement


@pytest.mark.parametrize("fam", families(B2), ids=["taut", "fibered"])
def test_recollement_extreme_down_sets(fam):
    F = random_diagram(fam.ambient, 3)
    empty, full = fam.recollement([]), fam.recollement(fam.poset.elements)
    assert empty.i_L_y(F).is_zero() or all(empty.i_L_y(F)[x].is_acyclic() for x in fam.ambient.elements)
    assert same(empty.nu_p_L(F), F)
    assert all(full.nu_p_L(F)[x].is_acyclic() for x in fam.ambient.elements)
    assert same(full.i_L_y(F), F)


def test_recollement_quotient_of_an_arrow_is_the_cone():
    A = ChainComplex.sphere(QQ, 0, 2)
    B = ChainComplex.sphere(QQ, 0)
    f = ChainMap(A, B, {0: Matrix(QQ, 1, 2, [{0: 1}, {0: 1}])})
    F = arrow(A, B, f)
    q = Tautological(I).recollement(["0"]).nu_p_L(F)
    assert q["0"].is_acyclic()
    assert q["1"].homology() == cone(f).homology()


@pytest.mark.parametrize("fam", families(B2), ids=["taut", "fibered"])
def test_recollement_sequences(fam):
    F = random_diagram(fam.ambient, 11)
    for D in fam.poset.down_sets():
        R = fam.recollement(D)
        # C_D F -> F -> L_{X/D} F and the closed/open pieces are Euler-additive
        for x in fam.ambient.elements:
            assert R.i_L_y(F)[x].euler + R.nu_p_L(F)[x].euler == F[x].euler
            assert R.i_R_y(F)[x].euler + R.nu_p_R(F)[x].euler == F[x].euler


# ---------------------------------------------------------------- strata functors


def test_phi_of_delta_is_its_value():
    fam = Tautological(B2)
    V = random_complex(QQ, 4)
    for p in B2.elements:
        assert fam.phi(p, delta(B2, p, V)).homology() == V.homology()


def test_phi_vanishes_away_from_the_block():
    fam = Tautological(B2)
    for r in B2.elements:
        L = up_block(B2, r, K)
        for p in B2.elements:
            if not B2.leq(r, p):
                assert fam.phi(p, L).is_acyclic()


def test_psi_of_up_block():
    fam = Tautological(C2)
    V = random_complex(QQ, 9)
    for r in C2.elements:
        lam = fam.lam(r, V)
        for p in C2.elements:
            expect = V.homology() if C2.leq(r, p) else ChainComplex.zero(QQ).homology()
            assert fam.psi(p, lam).homology() == expect
        assert fam.psi(r, delta(C2, r, V)).homology() == V.homology()
    assert fam.psi("1", Diagram.zero(C2, QQ)).is_acyclic()


def test_fibered_phi_rho_on_identity_chain():
    fam = Fibered(MonotoneMap.identity(I))
    V = Diagram(I.subposet(["1"]), {"1": K})
    glued = fam.phi("0", fam.rho("1", V))
    assert list(glued.shape.elements) == ["0"]
    assert glued["0"].homology() == K.homology()


# ---------------------------------------------------------------- gluing functors


@pytest.mark.parametrize("P", [I, C2, B2, named_poset("V")], ids=lambda P: P.name)
def test_gluing_on_a_cover_is_a_suspension(P):
    fam = Tautological(P)
    V = random_complex(QQ, 2)
    for p, q in P.covers:
        assert fam.gluing(p, q, V).homology() == shift(V, 1).homology()
        assert fam.reflected_gluing(p, q, V).homology() == V.homology()


def test_gluing_diagonal_is_identity_and_vanishes_when_incomparable():
    fam = Tautological(B2)
    V = random_complex(QQ, 5)
    for p in B2.elements:
        assert fam.gluing(p, p, V).homology() == V.homology()
    a, b = [x for x in B2.elements if x not in (B2.minimal()[0], B2.maximal()[0])]
    assert fam.gluing(a, b, V).is_acyclic()
    assert fam.reflected_gluing(a, b, V).is_acyclic()


def test_gluing_across_the_square_is_a_double_suspension():
    fam = Tautological(B2)
    lo, hi = B2.minimal()[0], B2.maximal()[0]
    V = ChainComplex.sphere(QQ, 0)
    assert fam.gluing(lo, hi, V).homology() == shift(V, 2).homology()


# ---------------------------------------------------------------- microcosm


def test_microcosm_on_a_point():
    for fam in families(PT):
        F = random_diagram(PT, 1)
        assert microcosm_check(fam, F) == (True, None)
        G = glue(fam, F)
        assert G[PT.elements[0]].homology() == F[PT.elements[0]].homology()


def test_microcosm_recovers_the_arrow_target():
    A = ChainComplex.sphere(QQ, 0)
    B = ChainComplex.sphere(QQ, 0, 2)
    f = ChainMap(A, B, {0: Matrix(QQ, 2, 1, [{0: 1, 1: 1}])})
    F = arrow(A, B, f)
    G = glue(Tautological(I), F)
    assert G["1"].homology() == B.homology()
    assert G["0"].homology() == A.homology()


@settings(max_examples=15)
@given(st.sampled_from(catalog(4)), st.sampled_from(FIELDS), st.integers(0, 300), st.sampled_from(["taut", "fibered"]))
def test_microcosm_and_reflection_on_random_instances(P, field, seed, kind):
    fam = Tautological(P, field) if kind == "taut" else Fibered(MonotoneMap.identity(P), field)
    F = random_diagram(P, seed, field=field)
    assert microcosm_check(fam, F, validate=True)[0]
    assert reflected_reconstruction(fam, F)[0]


@pytest.mark.parametrize("fam", families(B2) + families(C2), ids=["taut-B2", "fib-B2", "taut-[2]", "fib-[2]"])
def test_glue_conditions_hold_for_gluing_diagrams(fam):
    G = gluing_diagram(fam, random_diagram(fam.ambient, 6))
    r = check_glue_conditions(G)
    assert r["strataMembership"] and r["localEquivalences"] and r["witness"] is None


def test_glue_conditions_catch_a_misplaced_delta():
    fam = Tautological(I)
    G = gluing_diagram(fam, random_diagram(I, 6))
    G.values[("1",)] = delta(I, "0", K)
    r = check_glue_conditions(G)
    assert r["strataMembership"] is False
    assert r["witness"]


@pytest.mark.parametrize("fam", families(B2), ids=["taut", "fibered"])
def test_glue_conditions_on_zero(fam):
    r = check_glue_conditions(SdDiagram.zero(fam))
    assert r["strataMembership"] and r["localEquivalences"]


# ---------------------------------------------------------------- strictness


def test_one_step_chain_is_strict():
    fam = Tautological(I)
    assert strictness_check(fam, random_diagram(I, 2)) == (True, None)


def test_tautological_two_chain_is_not_strict():
    fam, F = tautological_witness()
    ok, witness = strictness_check(fam, F)
    assert not ok and witness


@pytest.mark.parametrize("name", list(fibered_instances()))
def test_fibered_instances_are_strict_and_reconstruct(name):
    f = fibered_instances()[name]
    fam = Fibered(f)
    F = random_diagram(f.source, 5)
    assert strictness_check(fam, F)[0]
    r = twisted_reconstruction(fam, F)
    assert r["counit"] and r["reconstruction"]


def test_twisted_reconstruction_refuses_non_strict_input():
    fam, F = tautological_witness()
    with pytest.raises(NotStrict):
        twisted_reconstruction(fam, F)


# ---------------------------------------------------------------- nanocosm


@pytest.mark.parametrize("fam", families(B2), ids=["taut", "fibered"])
def test_nanocosm_on_zero(fam):
    Z = Diagram.zero(fam.ambient, QQ)
    assert nanocosm_check(fam, Z, Z)[0]
    assert nanocosm_limit(fam, Z, Z).is_acyclic()


def test_nanocosm_on_a_point():
    fam = Tautological(PT)
    E, F = random_diagram(PT, 1), random_diagram(PT, 2)
    assert nanocosm_check(fam, E, F, validate=True)[0]


@settings(max_examples=10)
@given(st.sampled_from(catalog(3)), st.integers(0, 200), st.sampled_from(["taut", "fibered"]))
def test_nanocosm_random(P, seed, kind):
    fam = Tautological(P) if kind == "taut" else Fibered(MonotoneMap.identity(P))
    assert nanocosm_check(fam, random_diagram(P, seed), random_diagram(P, seed + 1))[0]


# ---------------------------------------------------------------- filtrations


@pytest.mark.parametrize("fam", families(B2) + families(named_poset("V")), ids=["taut-B2", "fib-B2", "taut-V", "fib-V"])
def test_filtration_identities(fam):
    assert filtration_identities(fam, random_diagram(fam.ambient, 8)) == (True, None)


def test_right_graded_piece_is_a_delta_of_the_value():
    fam = Tautological(B2)
    F = random_diagram(B2, 13)
    for p in B2.elements:
        gr = graded_piece(fam, FiltrationKind.ASC_RIGHT, p, F)
        expect = delta(B2, p, F[p])
        for x in B2.elements:
            assert gr[x].homology() == expect[x].homology()


def test_left_filtration_exhausts():
    fam = Tautological(C2)
    F = random_diagram(C2, 2)
    fil = filtration(fam, FiltrationKind.ASC_LEFT, F)
    top = C2.maximal()[0]
    assert same(fil.pieces[top], F)


def test_filtration_kind_names_round_trip():
    for k in FiltrationKind:
        assert FiltrationKind.parse(k.value) is k


# ---------------------------------------------------------------- reflection formulas


def test_cover_formula_on_a_chain():
    fam = Tautological(I)
    assert cover_formula_check(fam, "0", "1", K) == (True, None)


def test_tfib_and_tcofib_formulas_across_the_square():
    fam = Tautological(B2)
    lo, hi = B2.minimal()[0], B2.maximal()[0]
    V = random_complex(QQ, 3)
    assert tfib_formula_check(fam, lo, hi, V)[0]
    assert tcofib_formula_check(fam, lo, hi, V)[0]
    assert fam.reflected_gluing(lo, hi, V).homology() == V.homology()


def test_formulas_reject_equal_endpoints():
    fam = Tautological(B2)
    p = B2.minimal()[0]
    for fn in (tfib_formula_check, tcofib_formula_check, cover_formula_check):
        with pytest.raises(ValueError):
            fn(fam, p, p, K)


def test_fibered_formulas_on_a_product_fibration():
    f = fibered_instances()["[1]x[1] -> [1]"]
    fam = Fibered(f)
    p, q = "1", "0"  # 1 lies below 0 in the opposite order
    V = random_diagram(fam.fiber_poset(p), 4)
    assert tfib_formula_check(fam, p, q, V)[0]
    assert tcofib_formula_check(fam, p, q, V)[0]


# ---------------------------------------------------------------- fundamental operations


def test_pushforward_to_a_point():
    fam = Tautological(B2)
    alpha = MonotoneMap(B2, PT, {x: PT.elements[0] for x in B2.elements})
    assert pushforward_check(fam, random_diagram(B2, 4), alpha) == (True, None)


def test_pushforward_two_chain_to_one_chain():
    fam = Tautological(C2)
    alpha = MonotoneMap(C2, I, {"0": "0", "1": "0", "2": "1"})
    assert pushforward_check(fam, random_diagram(C2, 7), alpha) == (True, None)


def test_pushforward_of_fibered_family():
    fam = Fibered(MonotoneMap.identity(C2))
    alpha = MonotoneMap(fam.base, I, {"0": "0", "1": "0", "2": "1"})
    assert pushforward_check(fam, random_diagram(C2, 9), alpha)[0]


@pytest.mark.parametrize("fam", families(B2), ids=["taut", "fibered"])
def test_restricted_and_quotient(fam):
    F = random_diagram(fam.ambient, 12)
    for D in fam.poset.down_sets():
        assert restricted_check(fam, F, D)[0]
        assert quotient_check(fam, F, D)[0]
    r = fundamental_ops(fam, F)
    assert r["restricted"] and r["quotient"]


def test_refinement_by_points_is_the_original():
    fibers = {p: PT for p in B2.elements}
    W = wreath(B2, fibers)
    assert len(W) == len(B2)
    assert refined_check(B2, fibers, random_diagram(W, 3)) == (True, None)


def test_refinement_by_chains():
    fibers = {"0": I, "1": PT, "2": I}
    W = wreath(C2, fibers)
    assert len(W) == 5
    assert refined_check(C2, fibers, random_diagram(W, 8))[0]


# ---------------------------------------------------------------- alignment


def test_contained_down_sets_align_trivially():
    fam = Tautological(C2)
    F = random_diagram(C2, 5)
    D, E = ["0", "1"], ["0"]
    for fn in (excision_C, excision_L, mayer_vietoris_C, mayer_vietoris_L, y_commutation):
        assert fn(fam, D, E, F)[0]


def test_disjoint_down_sets_over_a_discrete_poset():
    P = FinitePoset.discrete(["a", "b"])
    fam = Tautological(P)
    F = random_diagram(P, 3)
    CD, CE, CU = fam.C(["a"], F)[0], fam.C(["b"], F)[0], fam.C(["a", "b"], F)[0]
    for x in P.elements:
        assert CU[x].homology() == diagram_sum([CD, CE])[x].homology()
    assert excision_C(fam, ["a"], ["b"], F)[0]


@pytest.mark.parametrize("fam", families(B2), ids=["taut", "fibered"])
def test_alignment_of_the_two_middles(fam):
    lo, hi = B2.minimal()[0], B2.maximal()[0]
    a, b = [x for x in B2.elements if x not in (lo, hi)]
    P = fam.poset
    D, E = P.down(a), P.down(b)
    F = random_diagram(fam.ambient, 21)
    for fn in (excision_C, excision_L, mayer_vietoris_C, mayer_vietoris_L, y_commutation):
        assert fn(fam, D, E, F) == (True, None), fn.__name__


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(catalog(4)), st.sampled_from([Field(2), Field(3)]), st.integers(0, 300), st.sampled_from(["taut", "fibered"]))
def test_excision_and_mayer_vietoris_in_positive_characteristic(P, field, seed, kind):
    fam = make_family(kind, P, field)
    F = random_object(fam, seed)
    for name in ("excision", "mv"):
        v = run_check(name, fam, seed, F=F)
        assert v["pass"], v["witness"]


# ---------------------------------------------------------------- t-structure


def test_delta_of_a_point_is_in_the_heart():
    fam = Tautological(B2)
    for p in B2.elements:
        F = delta(B2, p, K)
        assert is_connective(fam, F) and is_coconnective(fam, F)


def test_delta_glues_to_a_suspension_on_the_cover():
    fam = Tautological(I)
    D = delta(I, "0", K)
    assert fam.phi("1", D).homology() == shift(K, 1).homology()
    assert fam.phi("1", up_block(I, "0", K)).is_acyclic()
    assert is_connective(fam, D)
    assert not is_connective(fam, delta(I, "0", ChainComplex.sphere(QQ, -1)))


def test_orthogonality_of_block_and_shifted_delta():
    fam = Tautological(I)
    X = up_block(I, "0", K)
    Y = delta(I, "1", ChainComplex.sphere(QQ, -1))
    r = tstructure_report(fam, X, Y)
    assert r["connective"] and r["applicable"] and r["orthogonal"]
    assert orthogonality_check(fam, X, Y) == (True, None)


# ---------------------------------------------------------------- link gluing


def test_link_gluing_identity_map_is_identity():
    f = MonotoneMap.identity(I)
    V = Diagram(I.subposet(["1"]), {"1": random_complex(QQ, 1)})
    out = link_gluing(f, "1", "0", V)
    assert out["0"].homology() == V["1"].homology()


def test_link_gluing_needs_comparable_strata():
    f = MonotoneMap.identity(I)
    V = Diagram(I.subposet(["0"]), {"0": K})
    with pytest.raises(NotComparable):
        link_gluing(f, "0", "1", V)


def test_link_gluing_with_empty_fiber_is_zero():
    f = MonotoneMap(I, C2, {"0": "0", "1": "2"})
    V = Diagram.zero(I.subposet([]), QQ)
    assert link_gluing(f, "1", "0", V).is_zero()


def test_link_gluing_on_the_square_matches_the_stratification():
    f = fibered_instances()["[1]x[1] -> [1]"]
    fam = Fibered(f)
    V = random_diagram(fam.fiber_poset("1"), 17)
    by_link = link_gluing(f, "1", "0", V)
    by_recollement = fam.gluing("1", "0", V)
    assert same(by_link, by_recollement)
    # value at b is the holim over its down-set in the upper fiber
    T = f.source
    for b in by_link.shape.elements:
        below = [a for a in f.fiber("1") if T.leq(b, a)]
        expect = holim(restrict(V, below)) if below else ChainComplex.zero(QQ)
        assert by_link[b].homology() == expect.homology()
