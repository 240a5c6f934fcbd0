"""Reflection formulas relating the gluing functors Γ and the reflected ones Γ̌.

For p < q the chains from p to q form a poset with initial element {p, q}.
Γ̌^p_q is the total fiber over it of φ -> Σ^{-1}Γ_φ, and dually Γ^p_q is the
total cofiber over its opposite of φ -> ΣΓ̌_φ.  On a cover the indexing
poset is a point and both formulas say Γ̌ = Σ^{-1}Γ.
"""

from __future__ import annotations

from typing import Dict, Hashable, Optional, Tuple

from ..diagram import Diagram, delta, extend_by_zero, rke, total_cofiber, total_fiber
from ..homalg import ChainComplex, ChainMap, HomologyProfile, shift
from ..poset import NotComparable, Subdivision, label_text, restricted_subdivision
from .families import Family, Fibered, Tautological
from .micro import FiberedModel, TautologicalModel
from .reflected import FiberedReflected


def _interval_sd(family: Family, p, q) -> Subdivision:
    P = family.poset
    P.index(p)
    P.index(q)
    if p == q or not P.leq(p, q):
        raise NotComparable(f"the formulas need {label_text(p)} < {label_text(q)}")
    return restricted_subdivision(P, p, q)


def _inserted(a: Tuple, b: Tuple):
    return [x for x in b if x not in a][0]


def gluing_cube(family: Family, p, q, V) -> Dict[Hashable, Diagram]:
    """φ -> Γ_φ V over the chains from p to q, one diagram per point of the q-stratum."""
    sd = _interval_sd(family, p, q)
    if isinstance(family, Tautological):
        M = TautologicalModel(family, delta(family.poset, p, V))
        vals = {phi: M.value(phi) for phi in sd.elements}
        edges = {(a, b): M.delta(a, _inserted(a, b)) for a, b in sd.covers}
        return {q: Diagram(sd, vals, edges, V.field)}
    M = FiberedModel(family, rke(V, family.ambient))
    out = {}
    for t in family.fiber(q):
        vals = {phi: M.value(phi)[t] for phi in sd.elements}
        edges = {(a, b): M.cover_map(a, b)[t] for a, b in sd.covers}
        out[t] = Diagram(sd, vals, edges, family.field)
    return out


def reflected_cube(family: Family, p, q, V) -> Dict[Hashable, Diagram]:
    """φ -> Γ̌_φ V over the opposite of the chains from p to q."""
    sd = _interval_sd(family, p, q)
    op = sd.opposite()
    if isinstance(family, Tautological):
        vals = {phi: V for phi in sd.elements}
        edges = {(a, b): ChainMap.identity(V) for a, b in op.covers}
        return {q: Diagram(op, vals, edges, V.field)}
    R = FiberedReflected(family, extend_by_zero(V, family.ambient))
    out = {}
    for t in family.fiber(q):
        vals = {phi: R.value(phi, t) for phi in sd.elements}
        edges = {
            (a, b): ChainMap.from_labels(vals[a], vals[b], lambda n, lab: {lab: 1}, check=False)
            for a, b in op.covers
        }
        out[t] = Diagram(op, vals, edges, family.field)
    return out


def _pointwise(X) -> Dict[Hashable, HomologyProfile]:
    if isinstance(X, ChainComplex):
        return {None: X.homology()}
    return {t: X[t].homology() for t in X.shape.elements}


def _compare(expected, got: Dict[Hashable, ChainComplex]) -> Tuple[bool, Optional[str]]:
    exp = _pointwise(expected)
    if None in exp:
        exp = {t: exp[None] for t in got}
    for t, C in got.items():
        h = C.homology()
        if h != exp[t]:
            where = "" if len(got) == 1 else f" at {label_text(t)}"
            return False, f"expected {exp[t]} but the formula gives {h}{where}"
    return True, None


def tfib_formula_check(family: Family, p, q, V) -> Tuple[bool, Optional[str]]:
    """Γ̌^p_q V against the total fiber of φ -> Σ^{-1}Γ_φ V."""
    cubes = gluing_cube(family, p, q, V)
    got = {t: shift(total_fiber(D), -1) for t, D in cubes.items()}
    return _compare(family.reflected_gluing(p, q, V), got)


def tcofib_formula_check(family: Family, p, q, V) -> Tuple[bool, Optional[str]]:
    """Γ^p_q V against the total cofiber of φ -> ΣΓ̌_φ V."""
    cubes = reflected_cube(family, p, q, V)
    got = {t: shift(total_cofiber(D), 1) for t, D in cubes.items()}
    return _compare(family.gluing(p, q, V), got)


def cover_formula_check(family: Family, p, q, V) -> Tuple[bool, Optional[str]]:
    """Γ̌^p_q ≃ Σ^{-1}Γ^p_q for a cover p ⋖ q."""
    if (p, q) not in set(family.poset.covers):
        raise NotComparable(f"{label_text(p)} -> {label_text(q)} is not a cover")
    G = family.gluing(p, q, V)
    H = family.reflected_gluing(p, q, V)
    if isinstance(G, ChainComplex):
        return _compare(H, {None: shift(G, -1)})
    return _compare(H, {t: shift(G[t], -1) for t in G.shape.elements})
