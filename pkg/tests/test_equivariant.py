import json
import time

import pytest

from oracles import brute_conjugacy_classes, brute_ctilde, brute_subgroups
from stratcalc.equivariant import (
    GroupError,
    NotASubgroup,
    alternating_group,
    cyclic_group,
    dihedral_group,
    double_coset_data,
    fixed_points,
    fixedpoint_shape,
    parse_group,
    restriction_shape,
    skeleton,
    skeleton_dot,
    skeleton_json,
    skeleton_summary,
    subgroup_poset,
    symmetric_group,
    table_of_marks,
    transfer_shape,
    weyl_data,
)

SMALL_GROUPS = ["C5", "C4", "C6", "S3", "D8", "A4", "C2 x C2"]


def group(name):
    if name == "C2 x C2":
        return parse_group("(1 2)(3 4); (1 3)(2 4)")
    return parse_group(name)


def pattern(G):
    summary = skeleton_summary(skeleton(G))
    return sorted(summary["PossiblyNonzero"]), sorted(summary["Zero"])


# ---------------------------------------------------------------- groups


def test_parse_group_names_and_cycles():
    assert parse_group("S3").order == 6
    assert parse_group("D8").order == 8
    assert parse_group("A4").order == 12
    assert parse_group("(1 2 3), (1 2)").order == 6
    assert parse_group("(1,2)(3,4); (1,3)(2,4)").order == 4
    for bad in ("Z7", "(1 1)", "(0 1)", "hello"):
        with pytest.raises(GroupError):
            parse_group(bad)


@pytest.mark.parametrize("name", SMALL_GROUPS)
def test_subgroups_match_brute_force(name):
    G = group(name)
    assert set(G.subgroups()) == set(brute_subgroups(G.elements))


@pytest.mark.parametrize("name", SMALL_GROUPS)
def test_conjugacy_classes_match_brute_force(name):
    G = group(name)
    PG = subgroup_poset(G)
    expect = brute_conjugacy_classes(G.elements)
    assert len(PG.classes) == len(expect)
    assert sorted(len(c.members) for c in PG.classes) == sorted(len(c) for c in expect)


@pytest.mark.parametrize("n", range(1, 31))
def test_cyclic_subgroup_poset_is_the_divisor_lattice(n):
    P = subgroup_poset(cyclic_group(n)).poset
    PG = subgroup_poset(cyclic_group(n))
    orders = {c.name: c.order for c in PG.classes}
    assert sorted(orders.values()) == [d for d in range(1, n + 1) if n % d == 0]
    for a in P.elements:
        for b in P.elements:
            assert P.leq(a, b) == (orders[b] % orders[a] == 0)


def test_named_posets():
    assert subgroup_poset(cyclic_group(5)).poset.covers == [("e", "C5")]
    assert len(subgroup_poset(cyclic_group(9)).poset) == 3
    P = subgroup_poset(symmetric_group(3)).poset
    assert sorted(P.covers) == sorted([("e", "C2"), ("e", "C3"), ("C2", "S3"), ("C3", "S3")])


# ---------------------------------------------------------------- Weyl groups and fixed points


def test_weyl_groups_in_s3():
    PG = subgroup_poset(symmetric_group(3))
    assert weyl_data(PG, PG["C3"].representative)["type"] == "C2"
    assert weyl_data(PG, PG["C2"].representative)["order"] == 1
    assert weyl_data(PG, PG["S3"].representative)["order"] == 1
    assert weyl_data(PG, PG["e"].representative)["order"] == 6
    assert weyl_data(PG, PG["C3"].representative, PG["e"].representative)["relativeWeyl"] == 6


def test_relative_weyl_needs_containment():
    PG = subgroup_poset(symmetric_group(3))
    with pytest.raises(NotASubgroup):
        weyl_data(PG, PG["C2"].representative, PG["C3"].representative)


def test_fixed_points_in_s3():
    PG = subgroup_poset(symmetric_group(3))
    rep = {c.name: c.representative for c in PG.classes}
    for K in rep:
        assert fixed_points(PG, rep["S3"], rep[K])["size"] == 1
    assert fixed_points(PG, rep["C2"], rep["C2"])["size"] == 1
    assert fixed_points(PG, rep["C2"], rep["C3"])["size"] == 0
    assert fixed_points(PG, rep["e"], rep["e"])["size"] == 6


def test_table_of_marks_diagonal_is_the_weyl_order():
    PG = subgroup_poset(dihedral_group(8))
    marks = table_of_marks(PG)
    for c in PG.classes:
        assert marks[(c.name, c.name)] == c.weyl_order


@pytest.mark.parametrize("name", ["S3", "D8", "C6", "A4"])
def test_ctilde_matches_brute_force(name):
    G = group(name)
    PG = subgroup_poset(G)
    P = PG.poset
    for H in P.elements:
        for K in P.elements:
            if P.leq(H, K):
                Hs, Ks = PG[H].representative, PG[K].representative
                assert double_coset_data(PG, Hs, Ks)["cTilde"] == brute_ctilde(G.elements, Hs, Ks)


def test_double_cosets_in_s3():
    PG = subgroup_poset(symmetric_group(3))
    rep = {c.name: c.representative for c in PG.classes}
    assert double_coset_data(PG, rep["C2"], rep["S3"])["cTilde"] == 0
    d = double_coset_data(PG, rep["e"], rep["C2"])
    assert [s.index for s in d["cosets"]] == [2]
    same = double_coset_data(PG, rep["C3"], rep["C3"])
    assert [s.index for s in same["cosets"]] == [1]


# ---------------------------------------------------------------- skeletons


def test_skeleton_of_cp():
    assert pattern(cyclic_group(5)) == (["e->C5"], [])


def test_skeleton_of_cp_squared():
    assert pattern(cyclic_group(9)) == (sorted(["e->C3", "e->C9", "C3->C9"]), [])


def test_skeleton_of_c6():
    possibly, zero = pattern(cyclic_group(6))
    assert possibly == sorted(["e->C2", "e->C3", "C2->C6", "C3->C6"])
    assert zero == ["e->C6"]


def test_skeleton_of_s3():
    possibly, zero = pattern(symmetric_group(3))
    assert possibly == sorted(["e->C2", "e->C3", "C3->S3"])
    assert zero == sorted(["e->S3", "C2->S3"])
    reasons = {f"{e.source}->{e.target}": e.reason for e in skeleton(symmetric_group(3))}
    assert reasons["e->S3"] == "NoPrimePowerSummand"
    assert reasons["C2->S3"] == "EmptyCTilde"


def test_skeleton_examples_are_fast():
    t0 = time.perf_counter()
    for G in (cyclic_group(5), cyclic_group(9), cyclic_group(6), symmetric_group(3)):
        skeleton(G)
    assert time.perf_counter() - t0 < 10


def test_skeleton_emitters():
    G = symmetric_group(3)
    report = skeleton(G)
    data = json.loads(skeleton_json(G, report))
    assert data["order"] == 6 and len(data["edges"]) == 5
    assert skeleton_json(G, report) == skeleton_json(G, skeleton(G))
    dot = skeleton_dot(subgroup_poset(G), report)
    assert dot.startswith("digraph") and "dashed" in dot


# ---------------------------------------------------------------- fixed-point shapes


def test_fixedpoint_shape_of_cp_is_a_cospan():
    PG = subgroup_poset(cyclic_group(3))
    shape = fixedpoint_shape(PG, "C3")
    assert len(shape["nodes"]) == 3
    assert len(shape["edges"]) == 2
    targets = {tuple(e["to"]) for e in shape["edges"]}
    assert targets == {("e", "C3")}


def test_fixedpoint_shape_of_cp_squared_has_seven_nodes():
    PG = subgroup_poset(cyclic_group(4))
    assert len(fixedpoint_shape(PG, "C4")["nodes"]) == 7


def test_fixedpoint_shape_of_the_trivial_subgroup():
    G = symmetric_group(3)
    shape = fixedpoint_shape(subgroup_poset(G), "e")
    assert shape["nodes"] == [{"chain": ["e"], "fixedPoints": 6, "word": "Φ^e"}]


def test_restriction_and_transfer_shapes():
    PG = subgroup_poset(cyclic_group(4))
    res = restriction_shape(PG, "C2", "C4")
    tr = transfer_shape(PG, "C2", "C4")
    assert res["direction"] == "contravariant" and tr["direction"] == "covariant"
    assert len(res["functor"]) == len(tr["functor"]) == len(fixedpoint_shape(PG, "C2")["nodes"])
    with pytest.raises(NotASubgroup):
        restriction_shape(PG, "C4", "C2")


def test_alternating_group_names():
    PG = subgroup_poset(alternating_group(4))
    assert {c.name for c in PG.classes} == {"e", "C2", "C3", "V4", "A4"}
