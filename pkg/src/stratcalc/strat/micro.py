"""Gluing diagrams over sd(P) and the microcosm reconstruction.

A gluing diagram assigns to every chain φ of the stratifying poset the
object L_φ F = ρΦ ... ρΦ F (one ρΦ per element of φ, innermost first) and
to every inclusion of chains the map built from units.  The limit over
sd(P) is computed cellularly: sd(P) is the face poset of the order complex,
so a strict diagram D on it has limit ⊕_φ D(φ)[-dim φ] with coboundary given
by the codimension one faces, signed by the position of the new vertex.

Tautological family
    ρ^pΦ_p G is concentrated at p, and the unit G -> ρ^pΦ_p G is not a
    strict natural map, so we use an explicit strict model.  For a chain
    φ = p0 < ... < pn the value at pn is the tensor product
    M^{p(n-1)}_{pn} ⊗ ... ⊗ M^{p0}_{p1} ⊗ Φ_{p0}F, with M the interval
    complexes and Φ modelled by chains σ in (<p0) carrying a cell of F(min σ).
    Adding a vertex s below the maximum deconcatenates the factor whose
    interval contains s.

Fibered family
    ρ^qΦ_q is right Kan extension from the fiber T_q, whose unit is strict,
    so the gluing diagram is computed literally.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from ..diagram import Diagram, DiagramMap, chains_of, restrict, rke, rke_unit
from ..homalg import ChainComplex, ChainMap, ComplexError, HomologyProfile, cone
from ..poset import FinitePoset, Subdivision, label_text, subdivision
from .families import Family, Fibered, Tautological, profile_difference, restrict_map, rke_map


def _eps(k: int, l: int) -> int:
    return -1 if (k + 1) * (l + 1) % 2 else 1


def _open_chains(P: FinitePoset, a, b) -> List[Tuple]:
    """All chains (including the empty one) in the open interval (a, b)."""
    return [()] + chains_of(P, P.open_interval(a, b))


class TautologicalModel:
    """Strict tensor model of the gluing diagram of a tautological object."""

    def __init__(self, family: Tautological, F: Diagram):
        self.family = family
        self.F = F
        self.P = family.poset
        self.field = F.field
        self._phi: Dict[Hashable, ChainComplex] = {}
        self._v: Dict[Tuple, ChainComplex] = {}
        self._delta: Dict[Tuple, ChainMap] = {}
        self._glue: Dict[Hashable, ChainComplex] = {}
        self._intervals: Dict[Tuple, List[Tuple]] = {}

    # building blocks ------------------------------------------------------------
    def interval_chains(self, a, b) -> List[Tuple]:
        key = (a, b)
        out = self._intervals.get(key)
        if out is None:
            out = self._intervals[key] = _open_chains(self.P, a, b)
        return out

    def phi_cells(self, p) -> List[Tuple[int, Tuple, Hashable]]:
        """(degree, σ, g) for the quotient-bar model of Φ_p F."""
        F = self.F
        out = []
        for k, labs in F[p].basis.items():
            out.extend((k, (), g) for g in labs)
        for sigma in chains_of(self.P, self.P.strict_down(p)):
            for k, labs in F[sigma[0]].basis.items():
                out.extend((len(sigma) + k, sigma, g) for g in labs)
        return out

    def phi_boundary(self, p, deg: int, sigma: Tuple, g) -> Dict[Tuple, object]:
        F = self.F
        k = deg - len(sigma)
        out: Dict[Tuple, object] = {}
        if sigma:
            nxt = sigma[1] if len(sigma) > 1 else p
            for y, v in F.map(sigma[0], nxt).image_of(k, g).items():
                out[(sigma[1:], y)] = v
            for i in range(1, len(sigma)):
                key = (sigma[:i] + sigma[i + 1:], g)
                out[key] = out.get(key, 0) + (-1) ** i
        base = sigma[0] if sigma else p
        sign = -1 if len(sigma) % 2 else 1
        for y, v in F[base].boundary_of(k, g).items():
            key = (sigma, y)
            out[key] = out.get(key, 0) + sign * v
        return out

    def phi(self, p) -> ChainComplex:
        C = self._phi.get(p)
        if C is None:
            basis: Dict[int, list] = {}
            for d, s, g in self.phi_cells(p):
                basis.setdefault(d, []).append((s, g))
            C = ChainComplex.from_labels(
                self.field, basis, lambda n, lab: self.phi_boundary(p, n, lab[0], lab[1]), check=False
            )
            self._phi[p] = C
        return C

    # tensor values ----------------------------------------------------------------
    def cells(self, phi: Tuple) -> List[Tuple[int, Tuple]]:
        """(degree, (taus, σ, g)) for V_φ, taus listed outermost interval first."""
        factors = [self.interval_chains(phi[i - 1], phi[i]) for i in range(len(phi) - 1, 0, -1)]
        out = []
        base = self.phi_cells(phi[0])

        def rec(i, taus, deg):
            if i == len(factors):
                for k, s, g in base:
                    out.append((deg + k, (taus, s, g)))
                return
            for t in factors[i]:
                rec(i + 1, taus + (t,), deg + len(t) + 1)

        rec(0, (), 0)
        return out

    def boundary(self, phi: Tuple, deg: int, lab: Tuple) -> Dict[Tuple, object]:
        taus, sigma, g = lab
        out: Dict[Tuple, object] = {}
        prefix = 0
        for i, t in enumerate(taus):
            sign = -1 if prefix % 2 else 1
            for k in range(len(t)):
                key = (taus[:i] + (t[:k] + t[k + 1:],) + taus[i + 1:], sigma, g)
                out[key] = out.get(key, 0) + sign * (-1) ** k
            prefix += len(t) + 1
        sign = -1 if prefix % 2 else 1
        for (s2, g2), v in self.phi_boundary(phi[0], deg - prefix, sigma, g).items():
            key = (taus, s2, g2)
            out[key] = out.get(key, 0) + sign * v
        return out

    def value(self, phi: Tuple) -> ChainComplex:
        C = self._v.get(phi)
        if C is None:
            basis: Dict[int, list] = {}
            for d, lab in self.cells(phi):
                basis.setdefault(d, []).append(lab)
            C = ChainComplex.from_labels(self.field, basis, lambda n, lab: self.boundary(phi, n, lab), check=False)
            self._v[phi] = C
        return C

    def insert_image(self, phi: Tuple, s, lab: Tuple) -> Tuple[Optional[Tuple], int]:
        """Image of a cell under the deconcatenation at s (s below max φ)."""
        taus, sigma, g = lab
        P = self.P
        n = len(phi) - 1
        pos = 0
        while pos <= n and P.lt(phi[pos], s):
            pos += 1
        if pos == 0:
            if s not in sigma:
                return None, 0
            j = sigma.index(s)
            lo, hi = sigma[:j], sigma[j + 1:]
            return (taus + (hi,), lo, g), _eps(len(lo), len(hi))
        t = taus[n - pos]
        if s not in t:
            return None, 0
        j = t.index(s)
        lo, hi = t[:j], t[j + 1:]
        new = taus[: n - pos] + (hi, lo) + taus[n - pos + 1:]
        return (new, sigma, g), _eps(len(lo), len(hi))

    def delta(self, phi: Tuple, s) -> ChainMap:
        """V_φ -> V_ψ for ψ = φ ∪ {s} with the same maximum."""
        key = (phi, s)
        f = self._delta.get(key)
        if f is None:
            psi = self.P.sort(phi + (s,))
            src, tgt = self.value(phi), self.value(psi)

            def image(n, lab):
                new, e = self.insert_image(phi, s, lab)
                return {} if new is None else {new: e}

            f = self._delta[key] = ChainMap.from_labels(src, tgt, image, check=False)
        return f

    # the limit over sd(P) evaluated at x -------------------------------------------
    def chains_to(self, x) -> List[Tuple]:
        return [c for c in chains_of(self.P, self.P.down(x)) if c[-1] == x]

    def glue(self, x) -> ChainComplex:
        C = self._glue.get(x)
        if C is not None:
            return C
        P = self.P
        basis: Dict[int, list] = {}
        for phi in self.chains_to(x):
            dim = len(phi) - 1
            for d, lab in self.cells(phi):
                basis.setdefault(d - dim, []).append((phi,) + lab)

        def boundary(n, cell):
            phi, lab = cell[0], cell[1:]
            dim = len(phi) - 1
            internal = n + dim
            out = {(phi,) + k: v for k, v in self.boundary(phi, internal, lab).items()}
            sgn = -1 if internal % 2 else 1
            below = [s for s in P.strict_down(x) if s not in phi and all(P.comparable(s, y) for y in phi)]
            for s in below:
                new, e = self.insert_image(phi, s, lab)
                if new is None:
                    continue
                psi = P.sort(phi + (s,))
                pos = psi.index(s)
                key = (psi,) + new
                out[key] = out.get(key, 0) + sgn * (-1) ** pos * e
            return out

        C = ChainComplex.from_labels(self.field, basis, boundary, check=False)
        self._glue[x] = C
        return C

    def unit(self, x) -> ChainMap:
        """F(x) -> glue(x), the inclusion of the cells of the chain (x)."""
        G = self.glue(x)
        return ChainMap.from_labels(self.F[x], G, lambda n, g: {((x,), (), (), g): 1}, check=False)

    def unit_is_quasi_iso(self, x) -> bool:
        G = self.glue(x)
        Q = G.quotient_by_labels(
            (n, lab) for n, labs in G.basis.items() for lab in labs if lab[0] == (x,) and lab[2] == ()
        )
        return Q.is_acyclic()


class FiberedModel:
    """The gluing diagram of a fibered object, computed literally."""

    def __init__(self, family: Fibered, F: Diagram):
        self.family = family
        self.F = F
        self.Q = family.poset
        self.T = family.ambient
        self.field = F.field
        self._val: Dict[Tuple, Diagram] = {}
        self._unit: Dict[Tuple, DiagramMap] = {}
        self._cover: Dict[Tuple, DiagramMap] = {}

    def value(self, phi: Tuple) -> Diagram:
        """L_{φn} ... L_{φ0} F."""
        if not phi:
            return self.F
        D = self._val.get(phi)
        if D is None:
            inner = self.value(phi[:-1])
            D, eta = self.family.L_point(phi[-1], inner)
            self._val[phi] = D
            self._unit[phi] = eta
        return D

    def apply_L(self, q, f: DiagramMap, src: Diagram, tgt: Diagram) -> DiagramMap:
        S = self.family.fiber(q)
        return rke_map(restrict_map(f, S), self.T, src, tgt)

    def cover_map(self, phi: Tuple, psi: Tuple) -> DiagramMap:
        """gd(φ) -> gd(ψ) for ψ = φ plus one element."""
        key = (phi, psi)
        f = self._cover.get(key)
        if f is not None:
            return f
        i = 0
        while i < len(phi) and phi[i] == psi[i]:
            i += 1
        # ψ inserts psi[i] after the common prefix phi[:i]
        self.value(psi[: i + 1])
        f = self._unit[psi[: i + 1]]
        for j in range(i, len(phi)):
            f = self.apply_L(phi[j], f, self.value(phi[: j + 1]), self.value(psi[: j + 2]))
        self._cover[key] = f
        return f

    def glue(self, t, sd: Optional[Subdivision] = None) -> ChainComplex:
        sd = sd or subdivision(self.Q)
        basis: Dict[int, list] = {}
        for phi in sd.elements:
            V = self.value(phi)[t]
            dim = len(phi) - 1
            for k, labs in V.basis.items():
                basis.setdefault(k - dim, []).extend((phi, h) for h in labs)
        up: Dict[Tuple, List[Tuple[Tuple, int]]] = {}
        for a, b in sd.covers:
            extra = [x for x in b if x not in a][0]
            up.setdefault(a, []).append((b, b.index(extra)))

        def boundary(n, cell):
            phi, h = cell
            k = n + len(phi) - 1
            out = {(phi, y): v for y, v in self.value(phi)[t].boundary_of(k, h).items()}
            sgn = -1 if k % 2 else 1
            for psi, pos in up.get(phi, ()):
                f = self.cover_map(phi, psi)[t]
                for y, v in f.image_of(k, h).items():
                    key = (psi, y)
                    out[key] = out.get(key, 0) + sgn * (-1) ** pos * v
            return out

        return ChainComplex.from_labels(self.field, basis, boundary, check=False)

    def unit(self, t, G: Optional[ChainComplex] = None) -> ChainMap:
        G = G or self.glue(t)
        pts = [q for q in self.Q.elements]

        def image(n, h):
            out = {}
            for q in pts:
                self.value((q,))
                for y, v in self._unit[(q,)][t].image_of(n, h).items():
                    out[((q,), y)] = v
            return out

        return ChainMap.from_labels(self.F[t], G, image, check=False)


def model_for(family: Family, F: Diagram):
    if isinstance(family, Tautological):
        return TautologicalModel(family, F)
    return FiberedModel(family, F)


def glue(family: Family, F: Diagram) -> Dict[Hashable, ChainComplex]:
    """The limit over sd(P) of gd(F), evaluated at every ambient element."""
    M = model_for(family, F)
    if isinstance(family, Tautological):
        return {x: M.glue(x) for x in family.ambient.elements}
    sd = subdivision(family.poset)
    return {t: M.glue(t, sd) for t in family.ambient.elements}


def microcosm_check(family: Family, F: Diagram, validate: bool = False) -> Tuple[bool, Optional[str]]:
    """Is the unit F -> glue(gd(F)) a quasi-isomorphism at every element?"""
    M = model_for(family, F)
    if isinstance(family, Tautological):
        for x in family.ambient.elements:
            if validate:
                M.glue(x).validate()
                M.unit(x).validate()
            if not M.unit_is_quasi_iso(x):
                return False, f"unit not a quasi-isomorphism at {label_text(x)}"
        return True, None
    sd = subdivision(family.poset)
    for t in family.ambient.elements:
        G = M.glue(t, sd)
        u = M.unit(t, G)
        if validate:
            G.validate()
            u.validate()
        C = cone(u)
        if not C.is_acyclic():
            n = min(C.homology())
            return False, f"unit not a quasi-isomorphism at {label_text(t)} (cone has H_{n})"
    return True, None


# --------------------------------------------------------------------------
# gluing diagrams as objects over sd(P)
# --------------------------------------------------------------------------


class SdDiagram:
    """An object-level functor sd(P) -> Fun(ambient, Ch).

    ``values[φ]`` is a diagram over the ambient poset.  ``maps[(φ, ψ)]``
    gives, for each cover of sd(P), a map per ambient element or ``None``
    where the model keeps no map (then one side is zero at that element).
    """

    def __init__(self, family: Family, values: Dict[Tuple, Diagram], maps: Dict[Tuple, Dict[Hashable, Optional[ChainMap]]]):
        self.family = family
        self.sd = subdivision(family.poset)
        self.values = values
        self.maps = maps

    @classmethod
    def zero(cls, family: Family) -> "SdDiagram":
        sd = subdivision(family.poset)
        vals = {phi: Diagram.zero(family.ambient, family.field) for phi in sd.elements}
        return cls(family, vals, {})


def gluing_diagram(family: Family, F: Diagram) -> SdDiagram:
    """gd(F) in the model of the family."""
    M = model_for(family, F)
    sd = subdivision(family.poset)
    vals: Dict[Tuple, Diagram] = {}
    maps: Dict[Tuple, Dict] = {}
    A = family.ambient
    if isinstance(family, Tautological):
        for phi in sd.elements:
            vals[phi] = Diagram(A, {phi[-1]: M.value(phi)}, {}, family.field, check=False)
        for a, b in sd.covers:
            if a[-1] == b[-1]:
                s = [x for x in b if x not in a][0]
                f = M.delta(a, s)
                maps[(a, b)] = {x: (f if x == a[-1] else None) for x in A.elements}
            else:
                maps[(a, b)] = {x: None for x in A.elements}
    else:
        for phi in sd.elements:
            vals[phi] = M.value(phi)
        for a, b in sd.covers:
            f = M.cover_map(a, b)
            maps[(a, b)] = {x: f[x] for x in A.elements}
    return SdDiagram(family, vals, maps)


def check_glue_conditions(G: SdDiagram) -> Dict[str, object]:
    """Membership of each value in the image of ρ^{max φ}, and locality of
    the covers adjoining a new maximum after Φ of that maximum."""
    fam = G.family
    membership = True
    locality = True
    witness = None
    for phi, D in G.values.items():
        x = phi[-1]
        if isinstance(fam, Tautological):
            bad = [y for y in fam.ambient.elements if y != x and not D[y].is_acyclic()]
            if bad:
                membership = False
                witness = witness or f"value at {label_text(phi)} is not acyclic at {label_text(bad[0])}"
        else:
            R, eta = fam.L_point(x, D)
            if not eta.is_quasi_iso():
                membership = False
                witness = witness or f"value at {label_text(phi)} is not in the image of ρ^{label_text(x)}"
    for a, b in G.sd.covers:
        if b[:-1] != a:
            continue
        y = b[-1]
        if isinstance(fam, Tautological):
            lhs = fam.phi(y, G.values[a])
            rhs = fam.phi(y, G.values[b])
            if lhs.homology() != rhs.homology():
                locality = False
                witness = witness or f"Φ_{label_text(y)} of {label_text(a)} -> {label_text(b)} changes homology"
        else:
            comps = G.maps.get((a, b), {})
            for t in fam.fiber(y):
                f = comps.get(t)
                if f is None:
                    ok = G.values[a][t].is_acyclic() and G.values[b][t].is_acyclic()
                else:
                    ok = f.is_quasi_iso()
                if not ok:
                    locality = False
                    witness = witness or f"Φ_{label_text(y)} of {label_text(a)} -> {label_text(b)} is not invertible"
                    break
    return {"strataMembership": membership, "localEquivalences": locality, "witness": witness}
