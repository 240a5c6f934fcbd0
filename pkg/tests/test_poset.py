import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (
    POSET_COUNTS,
    brute_chain_count,
    brute_convex_count,
    brute_down_sets,
    hall_mobius,
    is_isomorphic,
    order_relation,
    reduced_homology_of_interval,
)
from stratcalc.poset import (
    GENERIC,
    ISOMAX,
    ISOMIN,
    ISOMINMAX,
    CycleDetected,
    ElementNotFound,
    FinitePoset,
    MonotoneMap,
    NotComparable,
    NotMonotone,
    TooLarge,
    UnknownLabel,
    all_posets,
    catalog,
    extended_catalog,
    interval_complex,
    isomax_under,
    mobius,
    mobius_csv,
    named_poset,
    restricted_subdivision,
    subdivision,
    subdivision_json,
    twisted_arrows,
    twisted_arrows_json,
    wreath,
)
from stratcalc.linalg import Field

CAT4 = catalog(4)
poset_st = st.sampled_from(catalog(5))


def test_transitive_closure_and_errors():
    P = FinitePoset.from_relations(["0", "1", "2"], [("0", "1"), ("1", "2")])
    assert P.leq("0", "2") and not P.leq("2", "0")
    assert P.covers == [("0", "1"), ("1", "2")]
    with pytest.raises(CycleDetected):
        FinitePoset.from_relations(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(UnknownLabel):
        FinitePoset.from_relations(["a"], [("a", "z")])


def test_small_subset_examples():
    one = FinitePoset.chain(1)
    assert sorted(map(tuple, one.down_sets())) == [(), ("0",), ("0", "1")]
    assert FinitePoset.chain(2).interval("0", "2") == ["0", "1", "2"]
    assert len(named_poset("B2").convex_subsets()) == 12
    with pytest.raises(ElementNotFound):
        one.up("7")


@given(poset_st)
def test_down_sets_and_convex_subsets_match_brute_force(P):
    assert {frozenset(D) for D in P.down_sets()} == set(brute_down_sets(P))
    assert len(P.convex_subsets()) == brute_convex_count(P)


@given(poset_st)
def test_leq_is_a_partial_order(P):
    rel = order_relation(P)
    for a in P.elements:
        assert (a, a) in rel
        for b in P.elements:
            if a != b:
                assert not ((a, b) in rel and (b, a) in rel)
            for c in P.elements:
                if (a, b) in rel and (b, c) in rel:
                    assert (a, c) in rel


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_catalog_has_every_isomorphism_class_once(n):
    posets = all_posets(n)
    assert len(posets) == POSET_COUNTS[n]
    if n <= 4:
        for i, P in enumerate(posets):
            for Q in posets[i + 1:]:
                assert not is_isomorphic(P, Q)


def test_bundled_catalog_size():
    assert len(catalog(5)) == 87
    assert max(len(P) for P in extended_catalog()) == 8


def test_json_round_trip():
    P = named_poset("B2")
    Q = FinitePoset.from_json(json.loads(json.dumps(P.to_json())))
    assert order_relation(P) == order_relation(Q)


# ---------------------------------------------------------------- subdivisions


def test_subdivision_examples():
    sd1 = subdivision(FinitePoset.chain(1))
    assert sorted(sd1.elements) == [("0",), ("0", "1"), ("1",)]
    assert sd1.leq(("0",), ("0", "1")) and sd1.leq(("1",), ("0", "1"))
    assert len(subdivision(FinitePoset.chain(2))) == 7
    disc = subdivision(FinitePoset.discrete(["a", "b"]))
    assert sorted(disc.elements) == [("a",), ("b",)] and disc.covers == []


@given(poset_st)
def test_subdivision_counts_chains(P):
    sd = subdivision(P)
    assert len(sd) == brute_chain_count(P)
    sd.max_map()  # monotone by construction, raises otherwise
    sd.min_map()


@given(poset_st)
def test_cover_classes_and_cocartesian_edges(P):
    sd = subdivision(P)
    for a, b, k in sd.classified_covers():
        assert k == {(True, True): ISOMINMAX, (True, False): ISOMIN,
                     (False, True): ISOMAX, (False, False): GENERIC}[(a[0] == b[0], a[-1] == b[-1])]
        if P.lt(a[-1], b[-1]):
            assert sd.is_cocartesian_cover(a, b) == (b == a + (b[-1],))


def test_classify_rejects_non_inclusions():
    sd = subdivision(FinitePoset.chain(1))
    with pytest.raises(NotComparable):
        sd.classify(("0",), ("1",))


def test_subdivision_cap():
    with pytest.raises(TooLarge):
        subdivision(FinitePoset.discrete([str(i) for i in range(13)]))


def test_restricted_subdivisions():
    P = FinitePoset.chain(2)
    two_sided = restricted_subdivision(P, "0", "2")
    assert sorted(two_sided.elements) == [("0", "1", "2"), ("0", "2")]
    assert two_sided.leq(("0", "2"), ("0", "1", "2"))
    assert list(restricted_subdivision(P, "1", "1").elements) == [("1",)]
    assert list(isomax_under(FinitePoset.chain(1), ("0",)).elements) == [("0",)]
    with pytest.raises(NotComparable):
        restricted_subdivision(P, "2", "0")


# ---------------------------------------------------------------- twisted arrows


def test_twisted_arrows_of_a_cover():
    tw = twisted_arrows(FinitePoset.chain(1))
    assert len(tw) == 3
    # (0<=1) is comparable with both identities
    assert tw.leq(("0", "0"), ("0", "1")) and tw.leq(("1", "1"), ("0", "1"))
    assert not tw.comparable(("0", "0"), ("1", "1"))
    assert len(twisted_arrows(FinitePoset.chain(2))) == 6


@given(poset_st)
def test_localization_inverts_exactly_isominmax_covers(P):
    sd = subdivision(P)
    tw = twisted_arrows(P)
    loc = tw.localization(sd)
    assert set(loc.assignment.values()) == set(tw.elements)
    for a, b, k in sd.classified_covers():
        assert (loc(a) == loc(b)) == (k == ISOMINMAX)


def test_emitters():
    P = named_poset("V")
    data = subdivision_json(subdivision(P))
    assert len(data["chains"]) == 5 and {c["class"] for c in data["covers"]} <= {ISOMIN, ISOMAX, ISOMINMAX, GENERIC}
    assert len(twisted_arrows_json(twisted_arrows(P))["objects"]) == 5
    assert "digraph" in P.to_dot()


# ---------------------------------------------------------------- Möbius


def test_mobius_examples():
    mu = mobius(FinitePoset.chain(2))
    assert mu[("0", "1")] == -1 and mu[("0", "2")] == 0
    assert mobius(named_poset("B2"))[("0", "1")] == 1
    assert "0,2,0" in mobius_csv(FinitePoset.chain(2))


@given(poset_st)
def test_mobius_agrees_with_hall_and_inverts_zeta(P):
    mu = mobius(P)
    for r in P.elements:
        assert mu[(r, r)] == 1
        for p in P.up(r):
            assert mu[(r, p)] == hall_mobius(P, r, p)
            assert sum(mu[(r, s)] for s in P.interval(r, p)) == (1 if r == p else 0)


def test_interval_complex_examples():
    C = FinitePoset.chain(2)
    assert interval_complex(C, "0", "1").homology() == {1: 1}
    assert interval_complex(C, "1", "1").homology() == {0: 1}
    assert interval_complex(named_poset("B2"), "0", "1").homology() == {2: 1}
    with pytest.raises(NotComparable):
        interval_complex(C, "2", "0")


@pytest.mark.parametrize("field", [Field(0), Field(2)])
@pytest.mark.parametrize("P", [P for P in CAT4 if len(P) >= 3] + [FinitePoset.boolean(3)], ids=lambda P: getattr(P, "name", None))
def test_interval_complex_is_shifted_order_complex(P, field):
    for r in P.elements:
        for p in P.up(r):
            if r == p:
                continue
            expected = {n + 2: d for n, d in reduced_homology_of_interval(P, r, p, field.p).items()}
            assert dict(interval_complex(P, r, p, field).homology().items()) == expected


# ---------------------------------------------------------------- wreath and maps


def test_wreath_examples():
    one, pt = FinitePoset.chain(1), FinitePoset.chain(0)
    assert is_isomorphic(wreath(one, {"0": pt, "1": pt}), one)
    assert is_isomorphic(wreath(pt, {"0": named_poset("B2")}), named_poset("B2"))
    assert is_isomorphic(wreath(one, {"0": one, "1": pt}), FinitePoset.chain(2))


@given(poset_st)
def test_wreath_projection_fibers(P):
    fibers = {p: (FinitePoset.chain(1) if i % 2 else named_poset("V")) for i, p in enumerate(P.elements)}
    W = wreath(P, fibers)
    proj = W.projection()
    for p in P.elements:
        assert is_isomorphic(W.subposet(proj.fiber(p)), fibers[p])


def test_monotone_map_checks():
    P = FinitePoset.chain(1)
    with pytest.raises(NotMonotone):
        MonotoneMap(P, P, {"0": "1", "1": "0"})
    with pytest.raises(NotMonotone):
        MonotoneMap(P, P, {"0": "0"})
    f = MonotoneMap(named_poset("B2"), P, {"0": "0", "a": "0", "b": "1", "1": "1"})
    assert f.fiber("0") == ["0", "a"]
    assert MonotoneMap.from_json(f.to_json(), named_poset("B2")).assignment == f.assignment
