"""Strict diagrams of chain complexes indexed by a finite poset.

A diagram stores one complex per element and one chain map per Hasse edge;
maps along longer relations are composites, which are well defined because
diagrams are validated to be path independent.  Homotopy (co)limits are the
normalized bar and cobar totalizations over strictly increasing chains.
"""

from __future__ import annotations

import json
import random
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .homalg import (
    ChainComplex,
    ChainMap,
    ComplexError,
    FieldMismatch,
    HomologyProfile,
    Matrix,
    ShapeMismatch,
    cone,
    cone_functor,
    direct_sum,
    shift,
)
from .linalg import QQ, Field
from .poset import ElementNotFound, FinitePoset, PosetError, label_text


class DiagramError(ValueError):
    pass


class NotSubposet(DiagramError):
    pass


class NotPathIndependent(DiagramError):
    pass


class NoTerminal(DiagramError):
    pass


class NoInitial(DiagramError):
    pass


def chains_of(P: FinitePoset, S: Optional[Iterable[Hashable]] = None) -> List[Tuple[Hashable, ...]]:
    """Nonempty chains of P inside S, ascending, shortest first."""
    if S is None:
        return P.chains()
    S = P.sort(set(S))
    out: List[Tuple] = []
    frontier = [(x,) for x in S]
    pos = {x: i for i, x in enumerate(S)}
    while frontier:
        out.extend(frontier)
        nxt = []
        for c in frontier:
            top = c[-1]
            for y in S[pos[top] + 1:]:
                if P.lt(top, y):
                    nxt.append(c + (y,))
        frontier = nxt
    return out


class Diagram:
    """A strictly commuting functor ``shape -> Ch(field)``."""

    def __init__(
        self,
        shape: FinitePoset,
        values: Mapping[Hashable, ChainComplex],
        edges: Optional[Mapping[Tuple[Hashable, Hashable], ChainMap]] = None,
        field: Optional[Field] = None,
        check: bool = True,
    ):
        self.shape = shape
        if field is None:
            field = next(iter(values.values())).field if values else QQ
        self.field = field
        self.values: Dict[Hashable, ChainComplex] = {}
        for p in shape.elements:
            C = values.get(p)
            if C is None:
                C = ChainComplex.zero(field)
            elif C.field != field:
                raise FieldMismatch(f"value at {label_text(p)} is over {C.field}, expected {field}")
            self.values[p] = C
        extra = set(values) - set(shape.elements)
        if extra:
            raise ElementNotFound(f"values given off the shape: {sorted(map(label_text, extra))}")
        self.edges: Dict[Tuple[Hashable, Hashable], ChainMap] = {}
        edges = edges or {}
        for a, b in shape.covers:
            f = edges.get((a, b))
            if f is None:
                f = ChainMap.zero(self.values[a], self.values[b])
            elif f.source.dims != self.values[a].dims or f.target.dims != self.values[b].dims:
                raise ShapeMismatch(f"edge {label_text(a)} -> {label_text(b)} does not match the values")
            self.edges[(a, b)] = f
        for key in edges:
            if key not in self.edges:
                raise DiagramError(f"{key!r} is not a cover of the shape")
        self._maps: Dict[Tuple[Hashable, Hashable], ChainMap] = {}
        if check:
            self.validate()

    # maps ----------------------------------------------------------------------------
    def __getitem__(self, p) -> ChainComplex:
        try:
            return self.values[p]
        except KeyError:
            raise ElementNotFound(f"{p!r} is not in the shape") from None

    def map(self, a, b) -> ChainMap:
        """The structure map F(a) -> F(b) for a <= b."""
        key = (a, b)
        f = self._maps.get(key)
        if f is not None:
            return f
        P = self.shape
        if a == b:
            f = ChainMap.identity(self.values[a])
        elif not P.leq(a, b):
            raise DiagramError(f"{label_text(a)} is not below {label_text(b)}")
        elif key in self.edges:
            f = self.edges[key]
        else:
            for c in self._succ(a):
                if P.leq(c, b):
                    f = self.map(c, b) @ self.edges[(a, c)]
                    break
        f = ChainMap(self.values[a], self.values[b], f.components, check=False)
        self._maps[key] = f
        return f

    def _succ(self, a) -> List[Hashable]:
        return [y for x, y in self.shape.covers if x == a]

    def validate(self) -> None:
        """Check edges are chain maps and every square of composites commutes."""
        for (a, b), f in self.edges.items():
            f.validate()
        P = self.shape
        for a in reversed(P.linear_order):
            succ = self._succ(a)
            if len(succ) < 2:
                continue
            for b in P.strict_up(a):
                routes = [(c, self.map(c, b) @ self.edges[(a, c)]) for c in succ if P.leq(c, b)]
                c0, first = routes[0]
                for c, g in routes[1:]:
                    if g != first:
                        raise NotPathIndependent(
                            f"square {label_text(a)} -> {label_text(c0)}/{label_text(c)} -> {label_text(b)} does not commute"
                        )

    # basic data ----------------------------------------------------------------------
    def profile(self) -> Dict[Hashable, HomologyProfile]:
        return {p: C.homology() for p, C in self.values.items()}

    def is_acyclic(self) -> bool:
        return all(C.is_acyclic() for C in self.values.values())

    def is_zero(self) -> bool:
        return all(C.is_zero() for C in self.values.values())

    def total_dim(self) -> int:
        return sum(C.total_dim for C in self.values.values())

    def __repr__(self) -> str:
        return f"Diagram(shape={self.shape!r}, dims={ {label_text(p): C.dims for p, C in self.values.items()} })"

    def plain(self) -> "Diagram":
        """Same diagram with integer basis labels."""
        vals = {p: C.plain() for p, C in self.values.items()}
        edges = {
            (a, b): ChainMap(vals[a], vals[b], f.components, check=False) for (a, b), f in self.edges.items()
        }
        return Diagram(self.shape, vals, edges, self.field, check=False)

    @classmethod
    def from_functions(
        cls,
        shape: FinitePoset,
        value: Callable[[Hashable], ChainComplex],
        edge: Callable[[Hashable, Hashable, ChainComplex, ChainComplex], ChainMap],
        field: Field,
        check: bool = False,
    ) -> "Diagram":
        vals = {p: value(p) for p in shape.elements}
        edges = {(a, b): edge(a, b, vals[a], vals[b]) for a, b in shape.covers}
        return cls(shape, vals, edges, field, check=check)

    @classmethod
    def zero(cls, shape: FinitePoset, field: Field = QQ) -> "Diagram":
        return cls(shape, {}, {}, field, check=False)

    # JSON ---------------------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "poset": self.shape.to_json(),
            "field": self.field.tag,
            "values": {label_text(p): C.to_json() for p, C in self.values.items()},
            "edges": [
                {"from": label_text(a), "to": label_text(b), "map": f.to_json()} for (a, b), f in self.edges.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping, shape: Optional[FinitePoset] = None) -> "Diagram":
        try:
            if shape is None:
                shape = FinitePoset.from_json(data["poset"])
            field = Field.parse(str(data.get("field", "Q")))
            names = {label_text(p): p for p in shape.elements}
            vals = {}
            for k, v in data.get("values", {}).items():
                if k not in names:
                    raise ElementNotFound(f"value for unknown element {k!r}")
                C = ChainComplex.from_json(v)
                if C.field != field:
                    raise FieldMismatch(f"value at {k} is over a different field")
                vals[names[k]] = C
            for p in shape.elements:
                vals.setdefault(p, ChainComplex.zero(field))
            edges = {}
            for e in data.get("edges", []):
                a, b = names[str(e["from"])], names[str(e["to"])]
                edges[(a, b)] = ChainMap.from_json(e["map"], vals[a], vals[b])
        except (KeyError, TypeError) as exc:
            raise DiagramError(f"malformed diagram JSON: {exc}") from exc
        return cls(shape, vals, edges, field)


class DiagramMap:
    """A natural transformation of strict diagrams over the same shape."""

    def __init__(self, source: Diagram, target: Diagram, components: Mapping[Hashable, ChainMap], check: bool = True):
        if source.shape is not target.shape and source.shape != target.shape:
            raise ShapeMismatch("diagram map between different shapes")
        self.source = source
        self.target = target
        self.components: Dict[Hashable, ChainMap] = {}
        for p in source.shape.elements:
            f = components.get(p)
            if f is None:
                f = ChainMap.zero(source[p], target[p])
            self.components[p] = f
        if check:
            self.validate()

    def __getitem__(self, p) -> ChainMap:
        return self.components[p]

    def validate(self) -> None:
        for p, f in self.components.items():
            f.validate()
        for a, b in self.source.shape.covers:
            lhs = self.target.edges[(a, b)] @ self.components[a]
            rhs = self.components[b] @ self.source.edges[(a, b)]
            if lhs != rhs:
                raise DiagramError(f"not natural on the edge {label_text(a)} -> {label_text(b)}")

    def is_quasi_iso(self) -> bool:
        return all(f.is_quasi_iso() for f in self.components.values())

    def failing_points(self) -> List[Hashable]:
        return [p for p, f in self.components.items() if not f.is_quasi_iso()]

    def __matmul__(self, other: "DiagramMap") -> "DiagramMap":
        return DiagramMap(other.source, self.target, {p: self[p] @ other[p] for p in self.components}, check=False)

    @classmethod
    def identity(cls, F: Diagram) -> "DiagramMap":
        return cls(F, F, {p: ChainMap.identity(C) for p, C in F.values.items()}, check=False)

    @classmethod
    def from_labels(cls, source: Diagram, target: Diagram, image: Callable[[Hashable, int, Hashable], Mapping], check=True):
        comps = {
            p: ChainMap.from_labels(source[p], target[p], (lambda n, lab, p=p: image(p, n, lab)), check=False)
            for p in source.shape.elements
        }
        return cls(source, target, comps, check=check)


# --------------------------------------------------------------------------
# pointwise constructions
# --------------------------------------------------------------------------


def diagram_cone(f: DiagramMap) -> Diagram:
    S, T = f.source, f.target
    vals = {p: cone(f[p]) for p in S.shape.elements}
    edges = {
        (a, b): ChainMap(vals[a], vals[b], cone_functor(f[a], f[b], S.edges[(a, b)], T.edges[(a, b)]).components, check=False)
        for a, b in S.shape.covers
    }
    return Diagram(S.shape, vals, edges, S.field, check=False)


def diagram_fib(f: DiagramMap) -> Diagram:
    return diagram_shift(diagram_cone(f), -1)


def diagram_shift(F: Diagram, k: int) -> Diagram:
    vals = {p: shift(C, k) for p, C in F.values.items()}
    edges = {(a, b): ChainMap(vals[a], vals[b], {n + k: m for n, m in g.components.items()}, check=False) for (a, b), g in F.edges.items()}
    return Diagram(F.shape, vals, edges, F.field, check=False)


def diagram_sum(diagrams: Sequence[Diagram]) -> Diagram:
    shape = diagrams[0].shape
    vals = {p: direct_sum([D[p] for D in diagrams]) for p in shape.elements}

    def edge(a, b):
        def image(n, lab):
            i, inner = lab
            return {(i, x): c for x, c in diagrams[i].edges[(a, b)].image_of(n, inner).items()}

        return ChainMap.from_labels(vals[a], vals[b], image, check=False)

    edges = {(a, b): edge(a, b) for a, b in shape.covers}
    return Diagram(shape, vals, edges, diagrams[0].field, check=False)


def cone_inclusion_map(f: DiagramMap, C: Optional[Diagram] = None) -> DiagramMap:
    """The canonical map target(f) -> cone(f)."""
    C = C or diagram_cone(f)
    return DiagramMap.from_labels(f.target, C, lambda p, n, lab: {("t", lab): 1}, check=False)


def cone_projection_map(f: DiagramMap, C: Optional[Diagram] = None) -> DiagramMap:
    """The canonical map cone(f) -> shift(source(f), 1)."""
    C = C or diagram_cone(f)
    S1 = diagram_shift(f.source, 1)
    return DiagramMap.from_labels(C, S1, lambda p, n, lab: {lab[1]: 1} if lab[0] == "s" else {}, check=False)


def fib_projection_map(f: DiagramMap, Fb: Optional[Diagram] = None) -> DiagramMap:
    """The canonical map fib(f) -> source(f)."""
    Fb = Fb or diagram_fib(f)
    return DiagramMap.from_labels(Fb, f.source, lambda p, n, lab: {lab[1]: 1} if lab[0] == "s" else {}, check=False)


# --------------------------------------------------------------------------
# restriction and extension by zero
# --------------------------------------------------------------------------


def _check_sub(P: FinitePoset, S: FinitePoset) -> None:
    for x in S.elements:
        if x not in P:
            raise NotSubposet(f"{label_text(x)} is not an element of the ambient poset")
    for a in S.elements:
        for b in S.elements:
            if S.leq(a, b) != P.leq(a, b):
                raise NotSubposet("not a full subposet")


def restrict(F: Diagram, S) -> Diagram:
    """Restriction to a full subposet (given as a poset or an element list)."""
    if not isinstance(S, FinitePoset):
        S = F.shape.subposet(S)
    _check_sub(F.shape, S)
    vals = {p: F[p] for p in S.elements}
    edges = {(a, b): F.map(a, b) for a, b in S.covers}
    return Diagram(S, vals, edges, F.field, check=False)


def extend_by_zero(F: Diagram, P: FinitePoset) -> Diagram:
    """F on its shape, zero elsewhere, zero maps in and out of the complement."""
    S = F.shape
    _check_sub(P, S)
    inside = set(S.elements)
    vals = {p: (F[p] if p in inside else ChainComplex.zero(F.field)) for p in P.elements}
    edges = {}
    for a, b in P.covers:
        if a in inside and b in inside:
            edges[(a, b)] = F.map(a, b)
    return Diagram(P, vals, edges, F.field, check=False)


def delta(P: FinitePoset, p, V: ChainComplex) -> Diagram:
    """Dirac delta: V at p, zero elsewhere."""
    P.index(p)
    return Diagram(P, {p: V}, {}, V.field, check=False)


def constant(P: FinitePoset, V: ChainComplex, support: Optional[Iterable[Hashable]] = None) -> Diagram:
    """V on a convex support with identity maps inside it, zero elsewhere."""
    sup = set(P.elements if support is None else support)
    vals = {p: (V if p in sup else ChainComplex.zero(V.field)) for p in P.elements}
    edges = {(a, b): ChainMap.identity(V) for a, b in P.covers if a in sup and b in sup}
    return Diagram(P, vals, edges, V.field, check=False)


def up_block(P: FinitePoset, p, V: ChainComplex) -> Diagram:
    """V on (≥p) with identity maps: the left Kan extension of V at p."""
    return constant(P, V, P.up(p))


def down_block(P: FinitePoset, p, V: ChainComplex) -> Diagram:
    """V on (≤p) with identity maps: the right Kan extension of V at p."""
    return constant(P, V, P.down(p))


# --------------------------------------------------------------------------
# homotopy colimits and limits
# --------------------------------------------------------------------------


def hocolim(F: Diagram, over: Optional[Iterable[Hashable]] = None) -> ChainComplex:
    """Normalized bar construction.

    Cells are ``(σ, g)`` with σ = s0<...<sn a chain and g a cell of F(s0),
    in degree n + |g|.  The differential is Σ_i (-1)^i face_i + (-1)^n d,
    where face_0 drops s0 and transports g along F(s0 -> s1).
    """
    P = F.shape
    chains = chains_of(P, over)
    basis: Dict[int, list] = {}
    for c in chains:
        n = len(c) - 1
        for k, labs in F[c[0]].basis.items():
            basis.setdefault(n + k, []).extend((c, g) for g in labs)

    def boundary(deg, lab):
        c, g = lab
        n = len(c) - 1
        k = deg - n
        out: dict = {}
        if n > 0:
            tail = c[1:]
            for x, v in F.map(c[0], c[1]).image_of(k, g).items():
                out[(tail, x)] = v
            for i in range(1, n + 1):
                key = (c[:i] + c[i + 1:], g)
                out[key] = out.get(key, 0) + (-1) ** i
        sign = -1 if n % 2 else 1
        for x, v in F[c[0]].boundary_of(k, g).items():
            key = (c, x)
            out[key] = out.get(key, 0) + sign * v
        return out

    return ChainComplex.from_labels(F.field, basis, boundary, check=False)


def hocolim_inclusion(F: Diagram, s, C: ChainComplex) -> ChainMap:
    """F(s) -> hocolim, the inclusion at the length-zero chain (s)."""
    return ChainMap.from_labels(F[s], C, lambda n, g: {((s,), g): 1}, check=False)


def hocolim_to(F: Diagram, t, C: ChainComplex) -> ChainMap:
    """hocolim over elements below t -> F(t), nonzero on length-zero chains."""

    def image(deg, lab):
        c, g = lab
        if len(c) != 1:
            return {}
        return F.map(c[0], t).image_of(deg, g)

    return ChainMap.from_labels(C, F[t], image, check=False)


def _cofaces(P: FinitePoset, S: Sequence[Hashable], c: Tuple) -> List[Tuple[int, Hashable]]:
    """(position, element) pairs inserting an element of S into the chain c."""
    out = []
    n = len(c)
    for x in S:
        if x in c:
            continue
        i = 0
        while i < n and P.lt(c[i], x):
            i += 1
        if (i == 0 or P.lt(c[i - 1], x)) and (i == n or P.lt(x, c[i])):
            out.append((i, x))
    return out


def holim(F: Diagram, over: Optional[Iterable[Hashable]] = None) -> ChainComplex:
    """Normalized cobar construction.

    Cells are ``(σ, h)`` with h a cell of F(max σ), in degree |h| - n.  The
    differential is d + (-1)^{|h|} Σ_i (-1)^i coface_i; inserting a new
    maximum transports h along the structure map.
    """
    P = F.shape
    S = list(P.elements if over is None else P.sort(set(over)))
    chains = chains_of(P, S)
    basis: Dict[int, list] = {}
    for c in chains:
        n = len(c) - 1
        for k, labs in F[c[-1]].basis.items():
            basis.setdefault(k - n, []).extend((c, h) for h in labs)
    cof = {}

    def boundary(deg, lab):
        c, h = lab
        n = len(c) - 1
        k = deg + n
        out: dict = {}
        for x, v in F[c[-1]].boundary_of(k, h).items():
            out[(c, x)] = v
        ins = cof.get(c)
        if ins is None:
            ins = cof[c] = _cofaces(P, S, c)
        sgn = -1 if k % 2 else 1
        for i, x in ins:
            s = sgn * (-1 if i % 2 else 1)
            c2 = c[:i] + (x,) + c[i:]
            if i == n + 1:
                for y, v in F.map(c[-1], x).image_of(k, h).items():
                    key = (c2, y)
                    out[key] = out.get(key, 0) + s * v
            else:
                key = (c2, h)
                out[key] = out.get(key, 0) + s
        return out

    return ChainComplex.from_labels(F.field, basis, boundary, check=False)


def holim_projection(F: Diagram, p, C: ChainComplex) -> ChainMap:
    """holim -> F(p), reading off the length-zero chain (p)."""
    return ChainMap.from_labels(C, F[p], lambda n, lab: {lab[1]: 1} if lab[0] == (p,) else {}, check=False)


def holim_from(F: Diagram, i, C: ChainComplex, over: Optional[Iterable[Hashable]] = None) -> ChainMap:
    """F(i) -> holim over elements above i: h maps to Σ_p ((p), F(i->p) h)."""
    pts = list(F.shape.elements if over is None else over)

    def image(n, h):
        out = {}
        for p in pts:
            for y, v in F.map(i, p).image_of(n, h).items():
                out[((p,), y)] = v
        return out

    return ChainMap.from_labels(F[i], C, image, check=False)


def holim_restriction(C: ChainComplex, D: ChainComplex) -> ChainMap:
    """Projection of a holim onto the holim over a smaller index set."""
    idx = {n: D.index(n) for n in D.basis}

    def image(n, lab):
        return {lab: 1} if lab in idx.get(n, ()) else {}

    return ChainMap.from_labels(C, D, image, check=False)


def hocolim_extension(C: ChainComplex, D: ChainComplex) -> ChainMap:
    """Inclusion of a hocolim over a smaller index set."""
    return ChainMap.from_labels(C, D, lambda n, lab: {lab: 1}, check=False)


# --------------------------------------------------------------------------
# Kan extensions along full inclusions
# --------------------------------------------------------------------------


def lke(F: Diagram, P: FinitePoset) -> Diagram:
    """Left Kan extension along the inclusion of F's shape into P."""
    S = F.shape
    _check_sub(P, S)
    inside = set(S.elements)
    sets = {q: [s for s in P.down(q) if s in inside] for q in P.elements}
    vals = {q: hocolim(F, sets[q]) for q in P.elements}
    edges = {(a, b): hocolim_extension(vals[a], vals[b]) for a, b in P.covers}
    return Diagram(P, vals, edges, F.field, check=False)


def rke(F: Diagram, P: FinitePoset) -> Diagram:
    """Right Kan extension along the inclusion of F's shape into P."""
    S = F.shape
    _check_sub(P, S)
    inside = set(S.elements)
    sets = {q: [s for s in P.up(q) if s in inside] for q in P.elements}
    vals = {q: holim(F, sets[q]) for q in P.elements}
    edges = {(a, b): holim_restriction(vals[a], vals[b]) for a, b in P.covers}
    return Diagram(P, vals, edges, F.field, check=False)


def lke_unit(F: Diagram, L: Diagram) -> DiagramMap:
    """F -> restriction of lke(F): inclusion at length-zero chains."""
    R = restrict(L, F.shape.elements)
    return DiagramMap(F, R, {s: hocolim_inclusion(F, s, R[s]) for s in F.shape.elements}, check=False)


def lke_counit(G: Diagram, S: Iterable[Hashable], L: Diagram) -> DiagramMap:
    """lke(restriction of G to S) -> G."""
    comps = {}
    for q in G.shape.elements:

        def image(deg, lab, q=q):
            c, g = lab
            if len(c) != 1:
                return {}
            return G.map(c[0], q).image_of(deg, g)

        comps[q] = ChainMap.from_labels(L[q], G[q], image, check=False)
    return DiagramMap(L, G, comps, check=False)


def rke_unit(G: Diagram, S: Iterable[Hashable], R: Diagram) -> DiagramMap:
    """G -> rke(restriction of G to S)."""
    inside = set(S)
    comps = {}
    for q in G.shape.elements:
        pts = [s for s in G.shape.up(q) if s in inside]
        comps[q] = holim_from(G, q, R[q], pts)
    return DiagramMap(G, R, comps, check=False)


def rke_counit(F: Diagram, R: Diagram) -> DiagramMap:
    """restriction of rke(F) -> F: projection to the length-zero chain."""
    Rr = restrict(R, F.shape.elements)
    return DiagramMap(Rr, F, {s: holim_projection(F, s, Rr[s]) for s in F.shape.elements}, check=False)


# --------------------------------------------------------------------------
# total (co)fibers
# --------------------------------------------------------------------------


def total_cofiber(F: Diagram, over: Optional[Iterable[Hashable]] = None) -> ChainComplex:
    """cofib(hocolim over the punctured index set -> F(terminal))."""
    pts = list(F.shape.elements if over is None else over)
    t = F.shape.terminal(pts)
    if t is None:
        raise NoTerminal("index set has no terminal element")
    rest = [p for p in pts if p != t]
    C = hocolim(F, rest)
    return cone(hocolim_to(F, t, C))


def total_fiber(F: Diagram, over: Optional[Iterable[Hashable]] = None) -> ChainComplex:
    """fib(F(initial) -> holim over the punctured index set)."""
    pts = list(F.shape.elements if over is None else over)
    i = F.shape.initial(pts)
    if i is None:
        raise NoInitial("index set has no initial element")
    rest = [p for p in pts if p != i]
    C = holim(F, rest)
    return shift(cone(holim_from(F, i, C, rest)), -1)


# --------------------------------------------------------------------------
# derived hom
# --------------------------------------------------------------------------


def rhom(E: Diagram, F: Diagram) -> ChainComplex:
    """Cobar model of the derived hom of diagrams.

    Cells are ``(σ, i, a, b)`` for an elementary map sending the degree i
    cell a of E(min σ) to the cell b of F(max σ), in degree |b| - i - n.  Inserting a new minimum precomposes
    with E, inserting a new maximum postcomposes with F.
    """
    if E.shape != F.shape:
        raise ShapeMismatch("rhom needs diagrams over the same shape")
    if E.field != F.field:
        raise FieldMismatch("rhom over different fields")
    P = E.shape
    chains = chains_of(P)
    basis: Dict[int, list] = {}
    for c in chains:
        n = len(c) - 1
        for i, la in E[c[0]].basis.items():
            for j, lb in F[c[-1]].basis.items():
                basis.setdefault(j - i - n, []).extend((c, i, a, b) for a in la for b in lb)

    # transposed structure maps of E and differentials of E
    coimage: Dict[Tuple, Dict] = {}

    def pre(x, y, a, i):
        """Cells a' of E(x) in degree i with E(x->y)a' ∋ a, with coefficients."""
        key = (x, y, i)
        table = coimage.get(key)
        if table is None:
            table = {}
            f = E.map(x, y)
            m = f.components.get(i)
            if m is not None:
                src = E[x].basis[i]
                tgt = E[y].basis[i]
                for col, vec in enumerate(m.columns):
                    for r, v in vec.items():
                        table.setdefault(tgt[r], []).append((src[col], v))
            coimage[key] = table
        return table.get(a, ())

    dual_d: Dict[Tuple, Dict] = {}

    def codiff(p, a, i):
        """Cells a' of E(p) in degree i+1 whose boundary contains a."""
        key = (p, i)
        table = dual_d.get(key)
        if table is None:
            table = {}
            m = E[p].d.get(i + 1)
            if m is not None:
                src = E[p].basis[i + 1]
                tgt = E[p].basis[i]
                for col, vec in enumerate(m.columns):
                    for r, v in vec.items():
                        table.setdefault(tgt[r], []).append((src[col], v))
            dual_d[key] = table
        return table.get(a, ())

    ins_cache = {}
    elements = list(P.elements)

    def boundary(deg, lab):
        c, i, a, b = lab
        n = len(c) - 1
        j = deg + n + i
        hd = j - i  # degree as a map
        out: dict = {}

        def add(key, v):
            w = out.get(key, 0) + v
            if w:
                out[key] = w
            else:
                out.pop(key, None)

        # internal hom differential: d_F f - (-1)^hd f d_E
        for y, v in F[c[-1]].boundary_of(j, b).items():
            add((c, i, a, y), v)
        s = 1 if hd % 2 else -1
        for a2, v in codiff(c[0], a, i):
            add((c, i + 1, a2, b), s * v)
        # cofaces
        ins = ins_cache.get(c)
        if ins is None:
            ins = ins_cache[c] = _cofaces(P, elements, c)
        sgn = -1 if hd % 2 else 1
        for pos, x in ins:
            s2 = sgn * (-1 if pos % 2 else 1)
            c2 = c[:pos] + (x,) + c[pos:]
            if pos == 0:
                for a2, v in pre(x, c[0], a, i):
                    add((c2, i, a2, b), s2 * v)
            elif pos == n + 1:
                for y, v in F.map(c[-1], x).image_of(j, b).items():
                    add((c2, i, a, y), s2 * v)
            else:
                add((c2, i, a, b), s2)
        return out

    return ChainComplex.from_labels(E.field, basis, boundary, check=False)


# --------------------------------------------------------------------------
# random instances
# --------------------------------------------------------------------------

_SMALL = ("sphere", "disk")


def _small_complex(field: Field, kind: str, n: int) -> ChainComplex:
    if kind == "sphere":
        return ChainComplex.sphere(field, n)
    return ChainComplex.disk(field, n)


def _small_map(field: Field, A: Tuple[str, int], B: Tuple[str, int], scalar) -> Optional[Dict[int, Matrix]]:
    """A nonzero chain map between two small complexes, if one exists."""
    (ka, na), (kb, nb) = A, B
    one = lambda: Matrix(field, 1, 1, [{0: scalar}])
    if ka == "sphere" and kb == "sphere" and na == nb:
        return {na: one()}
    if ka == "sphere" and kb == "disk" and nb == na + 1:
        return {na: Matrix(field, 1, 1, [{0: scalar}])}
    if ka == "disk" and kb == "sphere" and na == nb:
        return {na: one()}
    if ka == "disk" and kb == "disk" and na == nb:
        return {na: one(), na - 1: one()}
    return None


def _block_support(P: FinitePoset, kind: str, base) -> List[Hashable]:
    return P.up(base) if kind == "up" else P.down(base)


def _map_support(P: FinitePoset, src: Tuple[str, Hashable], tgt: Tuple[str, Hashable]) -> Optional[List[Hashable]]:
    """Support of the generating map between two blocks, or None."""
    (ks, bs), (kt, bt) = src, tgt
    if ks == "up" and kt == "up":
        return P.up(bs) if P.leq(bt, bs) else None
    if ks == "down" and kt == "down":
        return P.down(bt) if P.leq(bt, bs) else None
    if ks == "up" and kt == "down":
        return P.interval(bs, bt) if P.leq(bs, bt) else None
    return None


def random_diagram(
    P: FinitePoset,
    seed: int = 0,
    complexity: int = 2,
    field: Field = QQ,
    degrees: Sequence[int] = (-1, 0, 1),
    down_blocks: bool = True,
) -> Diagram:
    """Cone of a random map between sums of up- and down-blocks.

    ``complexity`` is the number of blocks on each side.  Blocks are spheres
    or disks placed on up-closures (left Kan extensions of a point) or on
    down-closures; maps between blocks follow the adjunction constraints so
    the result is a strict diagram.  Deterministic in ``seed``.
    """
    if complexity <= 0:
        return Diagram.zero(P, field)
    rng = random.Random(f"{seed}:{complexity}:{field.tag}:{','.join(map(label_text, P.elements))}")
    els = list(P.elements)
    kinds = ("up", "down") if down_blocks else ("up",)

    def block():
        kind = rng.choice(kinds)
        small = ("sphere", rng.choice(degrees)) if rng.random() < 0.8 else ("disk", rng.choice(degrees) + 1)
        return (kind, rng.choice(els)), small

    sources = [block() for _ in range(complexity)]
    targets = [block() for _ in range(complexity)]
    # bias towards maps that exist: retarget some blocks below their source
    for i in range(complexity):
        if rng.random() < 0.6:
            (ks, bs), small = sources[i]
            below = P.down(bs)
            t = rng.randrange(complexity)
            targets[t] = (("up", rng.choice(below)), (small[0], small[1]) if small[0] == "sphere" else ("sphere", small[1]))

    def block_diagram(b):
        (kind, base), small = b
        V = _small_complex(field, *small)
        return constant(P, V, _block_support(P, kind, base))

    A = diagram_sum([block_diagram(b) for b in sources])
    B = diagram_sum([block_diagram(b) for b in targets])
    entries = []
    for i, s in enumerate(sources):
        for j, t in enumerate(targets):
            sup = _map_support(P, s[0], t[0])
            if sup is None or rng.random() < 0.25:
                continue
            c = 0
            while c == 0:
                c = field.scalar(rng.randint(-3, 3))
            m = _small_map(field, s[1], t[1], c)
            if m is not None:
                entries.append((i, j, set(sup), m))
    comps = {}
    for p in P.elements:
        Ap, Bp = A[p], B[p]

        def image(n, lab, p=p):
            i, g = lab
            out = {}
            for i2, j, sup, m in entries:
                if i2 != i or p not in sup:
                    continue
                mm = m.get(n)
                if mm is None:
                    continue
                for r, v in mm.columns[g].items():
                    out[(j, r)] = v
            return out

        comps[p] = ChainMap.from_labels(Ap, Bp, image, check=False)
    f = DiagramMap(A, B, comps, check=False)
    return diagram_cone(f).plain()


def random_complex(field: Field, seed: int, degrees: Sequence[int] = (-1, 0, 1), size: int = 2) -> ChainComplex:
    """Random complex with nontrivial differentials (a sum of spheres and disks, mixed)."""
    rng = random.Random(f"cx:{seed}:{field.tag}")
    parts = []
    for _ in range(size):
        if rng.random() < 0.7:
            parts.append(ChainComplex.sphere(field, rng.choice(degrees)))
        else:
            parts.append(ChainComplex.disk(field, rng.choice(degrees) + 1))
    C = direct_sum(parts)
    return C.plain()
