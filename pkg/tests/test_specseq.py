import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratcalc.checks import height_map
from stratcalc.diagram import Diagram, random_diagram
from stratcalc.homalg import ChainComplex, ChainMap, Matrix, direct_sum
from stratcalc.linalg import QQ, Field
from stratcalc.poset import MonotoneMap, catalog, named_poset
from stratcalc.specseq import (
    NotConservative,
    SpectralSequence,
    Tower,
    convergence_check,
    conservative_witness,
    e1_page,
    e_infinity,
    mobius_e1_check,
    pages_json,
    parse_functor,
    tower_from_stratification,
)
from stratcalc.strat import Fibered, FiltrationKind, Tautological

FIELDS = [QQ, Field(2), Field(3)]


def heights(P):
    return {x: int(v) for x, v in height_map(P).assignment.items()}


def inclusion(A, B):
    """A as the first summand of B = A ⊕ C."""
    return ChainMap(A, B, {n: Matrix(QQ, B.dim(n), A.dim(n), [{i: 1} for i in range(A.dim(n))]) for n in A.basis})


# ---------------------------------------------------------------- towers by hand


def test_one_step_tower_has_homology_in_one_column():
    C = ChainComplex.sphere(QQ, 2, 3)
    E1 = e1_page(Tower(0, [C]))
    assert E1.nonzero() == {(0, 2): 3}
    assert convergence_check(Tower(0, [C]))


def test_split_tower_has_no_differentials():
    A, B = ChainComplex.sphere(QQ, 0), ChainComplex.sphere(QQ, 1)
    S = direct_sum([A, B])
    T = Tower.from_sequence([A, S], [inclusion(A, S)])
    ss = SpectralSequence(T)
    assert ss.page(1).nonzero() == {(0, 0): 1, (1, 0): 1}
    assert not any(any(c) for c in ss.page(1).differentials.values())
    assert ss.e_infinity().nonzero() == ss.page(2).nonzero()


def test_disk_tower_cancels_on_the_first_page():
    # X_0 = boundary point, X_1 = interval: d¹ kills both classes of E¹
    D = ChainComplex.disk(QQ, 1)
    top = D.basis[0]
    A = ChainComplex(QQ, {0: top})
    f = ChainMap(A, D, {0: Matrix.identity(QQ, 1)})
    ss = SpectralSequence(Tower.from_sequence([A, D], [f]))
    assert ss.page(1).nonzero() == {(0, 0): 1, (1, 0): 1}
    assert ss.page(1).rank(1, 0) == 1
    assert ss.e_infinity().nonzero() == {}
    assert ss.all_checks() == (True, None)


def test_zero_tower():
    Z = ChainComplex.zero(QQ)
    ss = SpectralSequence(Tower.from_sequence([Z, Z, Z], [ChainMap.zero(Z, Z)] * 2))
    assert all(not p.nonzero() for p in ss.pages())
    assert ss.all_checks()[0]


def test_euler_balance_of_the_first_page():
    P = named_poset("B2")
    fam = Tautological(P)
    F = random_diagram(P, 3)
    T = tower_from_stratification(fam, F, heights(P))
    E1 = e1_page(T)
    chi = sum((-1) ** (s + t) * k for (s, t), k in E1.nonzero().items())
    assert chi == T[T.stop].euler


# ---------------------------------------------------------------- towers from stratifications


def test_two_step_tower_over_an_arrow():
    P = named_poset("[1]")
    T = tower_from_stratification(Tautological(P), random_diagram(P, 1), {"0": 0, "1": 1})
    assert (T.start, T.stop) == (0, 1)


def test_zero_object_gives_a_zero_tower():
    P = named_poset("[2]")
    T = tower_from_stratification(Tautological(P), Diagram.zero(P, QQ), heights(P))
    assert all(C.is_acyclic() for C in T.complexes)


def test_rank_function_on_the_square():
    P = named_poset("B2")
    T = tower_from_stratification(Tautological(P), random_diagram(P, 2), heights(P))
    assert len(T.complexes) == 3
    assert conservative_witness(P, heights(P)) is None


def test_non_conservative_degrees_rejected():
    P = named_poset("[1]")
    with pytest.raises(NotConservative):
        tower_from_stratification(Tautological(P), random_diagram(P, 1), {"0": 0, "1": 0})


def test_functor_names():
    assert parse_functor(None) == ("holim", None)
    assert parse_functor("eval:3") == ("eval", "3")
    with pytest.raises(ValueError):
        parse_functor("stratum")


@settings(max_examples=12)
@given(
    st.sampled_from(catalog(4)),
    st.integers(0, 500),
    st.sampled_from(FIELDS),
    st.sampled_from(list(FiltrationKind)),
    st.sampled_from(["taut", "fibered"]),
)
def test_pages_satisfy_the_exact_couple_identities(P, seed, field, kind, family):
    fam = Tautological(P, field) if family == "taut" else Fibered(MonotoneMap.identity(P), field)
    F = random_diagram(P, seed, field=field)
    T = tower_from_stratification(fam, F, heights(fam.poset), kind)
    assert T.is_nested()
    assert SpectralSequence(T).all_checks() == (True, None)


@settings(max_examples=10)
@given(st.sampled_from(catalog(4)), st.integers(0, 500), st.sampled_from(list(FiltrationKind)))
def test_cancellation_keeps_every_page(P, seed, kind):
    fam = Tautological(P, Field(3))
    T = tower_from_stratification(fam, random_diagram(P, seed, field=Field(3)), heights(P), kind)
    full, small = SpectralSequence(T, reduce=False), SpectralSequence(T)
    assert sum(C.dims.get(n, 0) for C in small.tower.complexes for n in C.dims) <= sum(
        C.dims.get(n, 0) for C in T.complexes for n in C.dims
    )
    for r in range(1, full.stable_page + 1):
        a, b = full.page(r), small.page(r)
        assert a.nonzero() == b.nonzero()
        assert {k: a.rank(*k) for k in a.differentials} == {k: b.rank(*k) for k in b.differentials if k in a.differentials}


def test_random_chain_instance_converges():
    P = named_poset("[2]")
    for seed in range(5):
        T = tower_from_stratification(Tautological(P), random_diagram(P, seed), heights(P))
        assert convergence_check(T)
        assert sum(e_infinity(T).nonzero().values()) == sum(T[T.stop].homology().values())


# ---------------------------------------------------------------- the Möbius stratification


@pytest.mark.parametrize("P", catalog(4)[1:], ids=lambda P: P.name)
def test_mobius_first_page(P):
    fam = Tautological(P)
    F = random_diagram(P, len(P))
    for p in P.elements:
        assert mobius_e1_check(fam, F, heights(P), p) == (True, None)


def test_stratum_functor_rejects_fibered_family():
    P = named_poset("[1]")
    fam = Fibered(MonotoneMap.identity(P))
    with pytest.raises(TypeError):
        tower_from_stratification(fam, random_diagram(P, 1), {"0": 1, "1": 0}, "AscRight", ("stratum", "0"))


def test_pages_json_is_stable():
    P = named_poset("B2")
    T = tower_from_stratification(Tautological(P), random_diagram(P, 4), heights(P))
    a = pages_json(SpectralSequence(T))
    b = pages_json(SpectralSequence(T))
    assert a == b
    data = json.loads(a)
    assert data["pages"][0]["r"] == 1
    assert data["range"] == [0, 2]


def test_chart_renders_a_grid():
    P = named_poset("B2")
    T = tower_from_stratification(Tautological(P), random_diagram(P, 4), heights(P))
    text = SpectralSequence(T).page(1).chart()
    assert text.startswith("E^1")
