import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import hall_mobius
from stratcalc.diagram import (
    Diagram,
    DiagramError,
    NoInitial,
    NoTerminal,
    NotPathIndependent,
    NotSubposet,
    constant,
    delta,
    diagram_sum,
    extend_by_zero,
    hocolim,
    holim,
    lke,
    random_complex,
    random_diagram,
    restrict,
    rhom,
    rke,
    total_cofiber,
    total_fiber,
    up_block,
)
from stratcalc.homalg import ChainComplex, ChainMap, Matrix, ShapeMismatch, cone, direct_sum, tensor
from stratcalc.linalg import QQ, Field
from stratcalc.poset import FinitePoset, catalog, interval_complex, named_poset

FIELDS = [QQ, Field(2), Field(3)]
SMALL = catalog(4)
small_st = st.sampled_from(SMALL)
field_st = st.sampled_from(FIELDS)
seed_st = st.integers(0, 500)
K = ChainComplex.sphere(QQ, 0)


def profiles_equal(a: Diagram, b: Diagram) -> bool:
    return all(a[p].homology() == b[p].homology() for p in a.shape.elements)


# ---------------------------------------------------------------- construction


def test_random_diagram_is_deterministic_and_valid():
    P = named_poset("B2")
    a, b = random_diagram(P, 7, field=Field(3)), random_diagram(P, 7, field=Field(3))
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)
    a.validate()
    assert random_diagram(P, 7, complexity=0).is_zero()


def test_random_diagrams_have_rich_homology():
    P = FinitePoset.chain(2)
    assert any(
        sum(1 for n, d in hocolim(random_diagram(P, s)).homology().items() if d) >= 2
        or any(len(random_diagram(P, s)[p].homology()) >= 2 for p in P.elements)
        for s in range(20)
    )


def test_path_independence_is_enforced():
    P = named_poset("B2")
    one = Matrix.identity(QQ, 1)
    vals = {p: K for p in P.elements}
    edges = {e: ChainMap(K, K, {0: one}) for e in P.covers}
    edges[("b", "1")] = ChainMap(K, K, {0: one.scaled(2)})
    with pytest.raises(NotPathIndependent):
        Diagram(P, vals, edges, QQ)


def test_json_round_trip_and_bad_square():
    P = named_poset("B2")
    F = random_diagram(P, 3)
    G = Diagram.from_json(json.loads(json.dumps(F.to_json())))
    assert profiles_equal(F, G)
    data = constant(P, K).to_json()
    data["edges"][0]["map"] = ChainMap(K, K, {0: Matrix.identity(QQ, 1).scaled(5)}).to_json()
    with pytest.raises(NotPathIndependent):
        Diagram.from_json(data)


def test_restrict_and_extend_by_zero():
    P = FinitePoset.chain(2)
    F = random_diagram(P, 2)
    assert profiles_equal(restrict(F, P.elements), F)
    assert restrict(F, ["1"])["1"].homology() == F["1"].homology()
    lam = up_block(P, "2", K)
    assert restrict(lam, ["0", "1"]).is_zero()
    sub = restrict(F, ["0", "1"])
    assert profiles_equal(restrict(extend_by_zero(sub, P), ["0", "1"]), sub)
    with pytest.raises(NotSubposet):
        extend_by_zero(sub, named_poset("V"))


# ---------------------------------------------------------------- (co)limits


@given(small_st, seed_st, field_st)
def test_hocolim_at_terminal_and_holim_at_initial(P, seed, field):
    F = random_diagram(P, seed, field=field)
    t, i = P.terminal(), P.initial()
    if t is not None:
        assert hocolim(F).homology() == F[t].homology()
    if i is not None:
        assert holim(F).homology() == F[i].homology()


def test_holim_over_discrete_is_a_product():
    P = FinitePoset.discrete(["a", "b"])
    F = Diagram(P, {"a": ChainComplex.sphere(QQ, 1), "b": ChainComplex.sphere(QQ, 1, 2)})
    assert holim(F).homology() == {1: 3}
    assert hocolim(F).homology() == {1: 3}


@given(small_st, seed_st)
def test_rke_along_down_set_is_extension_by_zero(P, seed):
    for D in P.down_sets():
        if not D:
            continue
        F = random_diagram(P.subposet(D), seed)
        assert profiles_equal(rke(F, P), extend_by_zero(F, P))


@given(small_st)
def test_lke_of_a_point_is_an_up_block(P):
    for p in P.elements:
        V = ChainComplex.sphere(QQ, 1)
        L = lke(Diagram(P.subposet([p]), {p: V}), P)
        assert profiles_equal(L, up_block(P, p, V))


def test_total_cofiber_of_an_arrow_is_the_cone():
    P = FinitePoset.chain(1)
    A = ChainComplex.sphere(QQ, 0, 2)
    B = ChainComplex.sphere(QQ, 0, 1)
    f = ChainMap(A, B, {0: Matrix.from_rows(QQ, [[1, 1]])})
    F = Diagram(P, {"0": A, "1": B}, {("0", "1"): f})
    assert total_cofiber(F).homology() == cone(f).homology()
    assert total_fiber(F).homology() == cone(f).homology().shifted(-1)
    pt = FinitePoset.chain(0)
    assert total_cofiber(Diagram(pt, {"0": A})).homology() == A.homology()


def test_total_cofiber_needs_terminal():
    F = random_diagram(named_poset("Λ"), 1)
    with pytest.raises(NoTerminal):
        total_cofiber(F)
    with pytest.raises(NoInitial):
        total_fiber(random_diagram(named_poset("V"), 1))


@given(st.sampled_from([P for P in SMALL if len(P) >= 2]), seed_st)
def test_total_cofiber_of_dirac_delta_is_interval_complex(P, seed):
    V = random_complex(QQ, seed)
    for r in P.elements:
        rho = delta(P, r, V)
        for p in P.up(r):
            got = total_cofiber(rho, P.down(p)).homology()
            assert got == tensor(interval_complex(P, r, p), V).homology()


@given(small_st, seed_st)
def test_total_cofiber_ignores_acyclic_summands(P, seed):
    t = P.terminal()
    if t is None:
        return
    F = random_diagram(P, seed)
    noise = constant(P, ChainComplex.disk(QQ, 1))
    assert total_cofiber(diagram_sum([F, noise])).homology() == total_cofiber(F).homology()


# ---------------------------------------------------------------- derived hom


def test_rhom_small_examples():
    P = FinitePoset.chain(1)
    Z = Diagram.zero(P)
    assert rhom(Z, Z).homology().is_zero
    d = delta(P, "1", K)
    assert rhom(d, d).homology() == {0: 1}
    # Yoneda: maps out of the up-block at 0 see only the value at 0
    assert rhom(up_block(P, "0", K), d).homology().is_zero
    assert rhom(up_block(P, "1", K), d).homology() == {0: 1}


@given(small_st, seed_st, field_st)
def test_rhom_yoneda(P, seed, field):
    F = random_diagram(P, seed, field=field)
    k = ChainComplex.sphere(field, 0)
    for p in P.elements:
        assert rhom(up_block(P, p, k), F).homology() == F[p].homology()


@given(small_st, seed_st, seed_st)
def test_rhom_euler_form(P, s1, s2):
    """χ(RHom(E, F)) = Σ_{x<=y} χE(x) μ(x, y) χF(y)."""
    E, F = random_diagram(P, s1), random_diagram(P, s2)
    expected = sum(
        E[x].euler * hall_mobius(P, x, y) * F[y].euler for x in P.elements for y in P.up(x)
    )
    assert rhom(E, F).homology().euler == expected


def test_rhom_shape_mismatch():
    with pytest.raises((ShapeMismatch, DiagramError)):
        rhom(random_diagram(FinitePoset.chain(1), 1), random_diagram(FinitePoset.chain(2), 1))
