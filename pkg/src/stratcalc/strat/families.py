"""The two concrete stratified categories and their recollement functors.

``Tautological(P)`` is Fun(P, Ch) stratified over P: the closed piece for a
down-set D is the image of left Kan extension from D.  ``Fibered(f)`` is
Fun(T, Ch) for a monotone ``f: T -> P``, stratified over P^op: the closed
piece for an up-set U of P is the image of extension by zero from f^{-1}(U).

Both expose the same interface, so the checks in the sibling modules are
written once.  Stratum objects are chain complexes for the tautological
family and diagrams over the fiber T_p for the fibered family.
"""

from __future__ import annotations

from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

from ..diagram import (
    Diagram,
    DiagramMap,
    constant,
    delta,
    diagram_cone,
    diagram_fib,
    extend_by_zero,
    hocolim,
    hocolim_extension,
    hocolim_to,
    holim,
    holim_from,
    holim_restriction,
    lke,
    restrict,
    rke,
    rke_unit,
    total_cofiber,
    up_block,
)
from ..homalg import ChainComplex, ChainMap, HomologyProfile, cone, shift
from ..linalg import QQ, Field
from ..poset import ElementNotFound, FinitePoset, MonotoneMap, NotComparable, NotDownClosed, label_text

Stratum = Union[ChainComplex, Diagram]


def stratum_profile(obj: Stratum):
    """Homology of a stratum object (per element for diagram-valued strata)."""
    if isinstance(obj, ChainComplex):
        return obj.homology()
    return tuple((p, obj[p].homology()) for p in obj.shape.elements)


def profile_difference(a: Stratum, b: Stratum) -> Optional[str]:
    """None when the homology profiles agree, else a witness string."""
    if isinstance(a, ChainComplex):
        diff = a.homology().first_difference(b.homology())
        if diff is None:
            return None
        n, x, y = diff
        return f"H_{n}: {x} vs {y}"
    for p in a.shape.elements:
        diff = a[p].homology().first_difference(b[p].homology())
        if diff is not None:
            n, x, y = diff
            return f"at {label_text(p)}: H_{n}: {x} vs {y}"
    return None


def restrict_map(f: DiagramMap, S: Iterable[Hashable]) -> DiagramMap:
    S = list(S)
    src, tgt = restrict(f.source, S), restrict(f.target, S)
    return DiagramMap(src, tgt, {p: f[p] for p in src.shape.elements}, check=False)


def ext0_map(f: DiagramMap, P: FinitePoset) -> DiagramMap:
    src, tgt = extend_by_zero(f.source, P), extend_by_zero(f.target, P)
    return DiagramMap(src, tgt, {p: f[p] for p in f.source.shape.elements}, check=False)


def rke_map(f: DiagramMap, P: FinitePoset, R_src: Optional[Diagram] = None, R_tgt: Optional[Diagram] = None):
    """rke(f) for a map of diagrams on a full subposet of P."""
    R_src = R_src or rke(f.source, P)
    R_tgt = R_tgt or rke(f.target, P)
    comps = {}
    for q in P.elements:

        def image(n, lab):
            c, h = lab
            deg = n + len(c) - 1
            return {(c, y): v for y, v in f[c[-1]].image_of(deg, h).items()}

        comps[q] = ChainMap.from_labels(R_src[q], R_tgt[q], image, check=False)
    return DiagramMap(R_src, R_tgt, comps, check=False)


def lke_map(f: DiagramMap, P: FinitePoset, L_src: Optional[Diagram] = None, L_tgt: Optional[Diagram] = None):
    L_src = L_src or lke(f.source, P)
    L_tgt = L_tgt or lke(f.target, P)
    comps = {}
    for q in P.elements:

        def image(n, lab):
            c, g = lab
            deg = n - (len(c) - 1)
            return {(c, y): v for y, v in f[c[0]].image_of(deg, g).items()}

        comps[q] = ChainMap.from_labels(L_src[q], L_tgt[q], image, check=False)
    return DiagramMap(L_src, L_tgt, comps, check=False)


def counit_ext0(G: Diagram, S: Sequence[Hashable]) -> Tuple[Diagram, DiagramMap]:
    """ext_0(G|_S) -> G for an up-closed S (identity on S)."""
    E = extend_by_zero(restrict(G, S), G.shape)
    inside = set(S)
    comps = {p: (ChainMap.identity(G[p]) if p in inside else ChainMap.zero(E[p], G[p])) for p in G.shape.elements}
    comps = {p: ChainMap(E[p], G[p], m.components, check=False) for p, m in comps.items()}
    return E, DiagramMap(E, G, comps, check=False)


def unit_ext0(G: Diagram, S: Sequence[Hashable]) -> Tuple[Diagram, DiagramMap]:
    """G -> ext_0(G|_S) for a down-closed S (identity on S)."""
    E = extend_by_zero(restrict(G, S), G.shape)
    inside = set(S)
    comps = {}
    for p in G.shape.elements:
        m = ChainMap.identity(G[p]) if p in inside else ChainMap.zero(G[p], E[p])
        comps[p] = ChainMap(G[p], E[p], m.components, check=False)
    return E, DiagramMap(G, E, comps, check=False)


class Family:
    """Common interface of the stratified categories."""

    poset: FinitePoset  # stratifying poset
    ambient: FinitePoset  # shape of the ambient diagrams
    field: Field
    kind: str

    # subclasses implement: closed_support, C, L, phi, rho, psi, lam
    def check_down(self, D: Iterable[Hashable]) -> List[Hashable]:
        D = list(D)
        for p in D:
            self.poset.index(p)
        if not self.poset.is_down_closed(D):
            raise NotDownClosed(f"{[label_text(x) for x in D]} is not down-closed")
        return D

    def L_quotient(self, D, F: Diagram) -> Diagram:
        """L_{X/Y} F = cofib(C_D F -> F) (the image of ν p_L)."""
        _, eps = self.C(D, F)
        return diagram_cone(eps)

    def C_quotient(self, D, F: Diagram) -> Diagram:
        """C_{X/Y} F = fib(F -> L_D F) (the image of ν p_R)."""
        _, eta = self.L(D, F)
        return diagram_fib(eta)

    def gluing(self, p, q, V: Stratum) -> Stratum:
        """Γ^p_q = Φ_q ρ^p."""
        self.poset.index(p)
        self.poset.index(q)
        return self.phi(q, self.rho(p, V))

    def reflected_gluing(self, p, q, V: Stratum) -> Stratum:
        """Γ̌^p_q = Ψ_q λ^p."""
        self.poset.index(p)
        self.poset.index(q)
        return self.psi(q, self.lam(p, V))

    def L_point(self, p, F: Diagram) -> Tuple[Diagram, Optional[DiagramMap]]:
        """ρ^p Φ_p F with its unit when the unit is a strict map."""
        raise NotImplementedError

    def recollement(self, D) -> "Recollement":
        return Recollement(self, self.check_down(D))


class Recollement:
    """The six functors attached to a down-set D of the stratifying poset."""

    def __init__(self, family: Family, D: List[Hashable]):
        self.family = family
        self.D = D

    def i_L_y(self, F: Diagram) -> Diagram:
        return self.family.C(self.D, F)[0]

    def i_R_y(self, F: Diagram) -> Diagram:
        return self.family.L(self.D, F)[0]

    def nu_p_L(self, F: Diagram) -> Diagram:
        return self.family.L_quotient(self.D, F)

    def nu_p_R(self, F: Diagram) -> Diagram:
        return self.family.C_quotient(self.D, F)

    def y(self, F: Diagram) -> Diagram:
        return restrict(F, self.family.closed_support(self.D))

    def i_L(self, G: Diagram) -> Diagram:
        return self.family.include_left(self.D, G)

    def i_R(self, G: Diagram) -> Diagram:
        return self.family.include_right(self.D, G)


class Tautological(Family):
    kind = "taut"

    def __init__(self, P: FinitePoset, field: Field = QQ):
        self.poset = P
        self.ambient = P
        self.field = field

    def __repr__(self):
        return f"Tautological({self.poset.name or self.poset!r}, {self.field})"

    def closed_support(self, D) -> List[Hashable]:
        return list(D)

    def include_left(self, D, G: Diagram) -> Diagram:
        return lke(G, self.poset)

    def include_right(self, D, G: Diagram) -> Diagram:
        return extend_by_zero(G, self.poset)

    def C(self, D, F: Diagram) -> Tuple[Diagram, DiagramMap]:
        """lke from D with its counit to F."""
        D = self.check_down(D)
        P = self.poset
        G = restrict(F, D)
        L = lke(G, P)
        comps = {}
        for q in P.elements:

            def image(deg, lab, q=q):
                c, g = lab
                if len(c) != 1:
                    return {}
                return F.map(c[0], q).image_of(deg, g)

            comps[q] = ChainMap.from_labels(L[q], F[q], image, check=False)
        return L, DiagramMap(L, F, comps, check=False)

    def L(self, D, F: Diagram) -> Tuple[Diagram, DiagramMap]:
        """Extension by zero from D with the restriction unit."""
        D = self.check_down(D)
        return unit_ext0(F, D)

    def phi(self, p, F: Diagram) -> ChainComplex:
        self.poset.index(p)
        return total_cofiber(F, self.poset.down(p))

    def rho(self, p, V: ChainComplex) -> Diagram:
        return delta(self.poset, p, V)

    def psi(self, p, F: Diagram) -> ChainComplex:
        return F[p]

    def lam(self, p, V: ChainComplex) -> Diagram:
        return up_block(self.poset, p, V)

    def zero_stratum(self, p) -> ChainComplex:
        return ChainComplex.zero(self.field)


class Fibered(Family):
    """Fun(T, Ch) stratified over P^op through a monotone f: T -> P.

    Elements of the stratifying poset are the elements of P, ordered
    oppositely.  A down-set of P^op is an up-set U of P and its closed piece
    consists of diagrams supported on f^{-1}(U).
    """

    kind = "fibered"

    def __init__(self, f: MonotoneMap, field: Field = QQ):
        self.map = f
        self.base = f.target
        self.poset = f.target.opposite()
        self.ambient = f.source
        self.field = field
        self._fibers = {p: f.fiber(p) for p in self.base.elements}

    def __repr__(self):
        return f"Fibered({self.ambient.name or '?'} -> {self.base.name or '?'}, {self.field})"

    def fiber(self, p) -> List[Hashable]:
        return self._fibers[p]

    def fiber_poset(self, p) -> FinitePoset:
        return self.ambient.subposet(self._fibers[p])

    def closed_support(self, D) -> List[Hashable]:
        return self.map.preimage(D)

    def include_left(self, D, G: Diagram) -> Diagram:
        return extend_by_zero(G, self.ambient)

    def include_right(self, D, G: Diagram) -> Diagram:
        return rke(G, self.ambient)

    def C(self, D, F: Diagram) -> Tuple[Diagram, DiagramMap]:
        D = self.check_down(D)
        return counit_ext0(F, self.closed_support(D))

    def L(self, D, F: Diagram) -> Tuple[Diagram, DiagramMap]:
        D = self.check_down(D)
        S = self.closed_support(D)
        R = rke(restrict(F, S), self.ambient)
        return R, rke_unit(F, S, R)

    def L_point(self, p, F: Diagram) -> Tuple[Diagram, DiagramMap]:
        S = self.fiber(p)
        R = rke(restrict(F, S), self.ambient)
        return R, rke_unit(F, S, R)

    def phi(self, p, F: Diagram) -> Diagram:
        self.poset.index(p)
        return restrict(F, self.fiber_poset(p))

    def rho(self, p, V: Diagram) -> Diagram:
        return rke(V, self.ambient)

    def psi(self, p, F: Diagram) -> Diagram:
        """fib(F(a) -> holim of F over the later strata above a), a in T_p."""
        Tp = self.fiber_poset(p)
        above = self.map.preimage(self.base.strict_up(p))
        A = self.ambient
        vals = {}
        for a in Tp.elements:
            pts = [b for b in A.up(a) if b in set(above)]
            H = holim(F, pts)
            vals[a] = (H, shift(cone(holim_from(F, a, H, pts)), -1))
        out_vals = {a: v[1] for a, v in vals.items()}
        edges = {}
        for a, b in Tp.covers:
            Ha, Hb = vals[a][0], vals[b][0]
            r = holim_restriction(Ha, Hb)
            fa = F.map(a, b)

            def image(n, lab, fa=fa, r=r):
                kind, inner = lab
                if kind == "t":
                    return {("t", x): v for x, v in r.image_of(n + 1, inner).items()}
                return {("s", x): v for x, v in fa.image_of(n, inner).items()}

            edges[(a, b)] = ChainMap.from_labels(out_vals[a], out_vals[b], image, check=False)
        return Diagram(Tp, out_vals, edges, self.field, check=False)

    def lam(self, p, V: Diagram) -> Diagram:
        return extend_by_zero(V, self.ambient)

    def zero_stratum(self, p) -> Diagram:
        return Diagram.zero(self.fiber_poset(p), self.field)


def link_poset(f: MonotoneMap, p, q) -> FinitePoset:
    """{(a, b): a in T_p, b in T_q, b <= a}, ordered componentwise."""
    T = f.source
    pairs = [(a, b) for a in f.fiber(p) for b in f.fiber(q) if T.leq(b, a)]
    return FinitePoset.from_leq(pairs, lambda x, y: T.leq(x[0], y[0]) and T.leq(x[1], y[1]), name="link")


def link_gluing(f: MonotoneMap, p, q, V: Diagram, field: Optional[Field] = None) -> Diagram:
    """The gluing functor Fun(T_p) -> Fun(T_q) of a fibered stratification.

    For q < p in P: pull V back to the link along its first projection, then
    right Kan extend along the second projection, so the value at b is the
    holim over link pairs (a, b') with b <= b'.
    """
    P, T = f.target, f.source
    if not P.lt(q, p):
        raise NotComparable(f"{label_text(q)} is not strictly below {label_text(p)}")
    Tq = T.subposet(f.fiber(q))
    field = field or V.field
    link = link_poset(f, p, q)
    if not len(link):
        return Diagram.zero(Tq, field)
    W = Diagram(
        link,
        {x: V[x[0]] for x in link.elements},
        {(x, y): V.map(x[0], y[0]) for x, y in link.covers},
        field,
        check=False,
    )
    sets = {b: [x for x in link.elements if T.leq(b, x[1])] for b in Tq.elements}
    vals = {b: holim(W, sets[b]) for b in Tq.elements}
    edges = {(a, b): holim_restriction(vals[a], vals[b]) for a, b in Tq.covers}
    return Diagram(Tq, vals, edges, field, check=False)
