"""Reflected reconstruction: F as a colimit over sd(P)^op.

The reflected gluing diagram sends φ to λΨ ... λΨ F (one λΨ per element of
φ) and is contravariant in φ.  Its colimit is computed with cellular
chains ⊕_φ ǧd(φ)[dim φ].

Tautological
    ǧd(φ) is the up-block at max φ with value F(min φ).  At x the cellular
    chains are the bar complex of chains in (<= x) carrying a cell of
    F(min φ), and the counit applies F(min φ -> x) to the 0-dimensional part.

Fibered
    ǧd(φ)(t) is nonzero only for t over max φ.  We use a flattened model
    W_φ(t): chains c in T starting at t whose later elements lie over
    strictly later strata and whose image contains φ, carrying a cell of
    F(max c), with the relative cobar differential.  Removing an element of
    φ other than its maximum is the inclusion W_φ ⊆ W_{φ minus it}.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Optional, Tuple

from ..diagram import Diagram, chains_of
from ..homalg import ChainComplex, ChainMap, cone
from ..poset import label_text
from .families import Family, Fibered, Tautological


def _taut_boundary(F: Diagram, n: int, phi: Tuple, g) -> Dict:
    dim = len(phi) - 1
    k = n - dim
    out: Dict = {}
    if dim:
        for y, v in F.map(phi[0], phi[1]).image_of(k, g).items():
            out[(phi[1:], y)] = v
        for i in range(1, dim + 1):
            key = (phi[:i] + phi[i + 1:], g)
            out[key] = out.get(key, 0) + (-1) ** i
    sign = -1 if dim % 2 else 1
    for y, v in F[phi[0]].boundary_of(k, g).items():
        key = (phi, y)
        out[key] = out.get(key, 0) + sign * v
    return out


def taut_reflected_glue(F: Diagram, x) -> ChainComplex:
    P = F.shape
    basis: Dict[int, list] = {}
    for phi in chains_of(P, P.down(x)):
        dim = len(phi) - 1
        for k, labs in F[phi[0]].basis.items():
            basis.setdefault(k + dim, []).extend((phi, g) for g in labs)
    return ChainComplex.from_labels(F.field, basis, lambda n, lab: _taut_boundary(F, n, *lab), check=False)


def taut_counit(F: Diagram, x, G: ChainComplex) -> ChainMap:
    def image(n, lab):
        phi, g = lab
        if len(phi) > 1:
            return {}
        return F.map(phi[0], x).image_of(n, g)

    return ChainMap.from_labels(G, F[x], image, check=False)


class FiberedReflected:
    def __init__(self, family: Fibered, F: Diagram):
        self.family = family
        self.F = F
        self.T = family.ambient
        self.f = family.map
        self.base = family.base
        self._later: Dict[Hashable, List[Tuple]] = {}

    def tails(self, t) -> List[Tuple]:
        """Chains in T starting at t whose other elements lie over strata after f(t)."""
        out = self._later.get(t)
        if out is None:
            fa = self.f.assignment
            pts = [y for y in self.T.strict_up(t) if self.base.lt(fa[t], fa[y])]
            out = [(t,)] + [(t,) + c for c in chains_of(self.T, pts)]
            self._later[t] = out
        return out

    def w_boundary(self, n: int, c: Tuple, h, allowed) -> Dict:
        """Relative cobar differential on (c, h) in degree n = |h| - (len(c) - 1)."""
        F, T = self.F, self.T
        k = n + len(c) - 1
        out: Dict = {(c, y): v for y, v in F[c[-1]].boundary_of(k, h).items()}
        sgn = -1 if k % 2 else 1
        m = len(c)
        for i in range(1, m):
            for y in T.open_interval(c[i - 1], c[i]):
                if y in allowed:
                    key = (c[:i] + (y,) + c[i:], h)
                    out[key] = out.get(key, 0) + sgn * (-1) ** i
        for y in T.strict_up(c[-1]):
            if y in allowed:
                for z, v in F.map(c[-1], y).image_of(k, h).items():
                    key = (c + (y,), z)
                    out[key] = out.get(key, 0) + sgn * (-1) ** m * v
        return out

    def _allowed(self, t):
        fa = self.f.assignment
        return {y for y in self.T.strict_up(t) if self.base.lt(fa[t], fa[y])}

    def value(self, phi: Tuple, t) -> ChainComplex:
        """W_φ(t); φ is a chain of the stratifying poset ending at f(t)."""
        fa = self.f.assignment
        need = set(phi)
        basis: Dict[int, list] = {}
        for c in self.tails(t):
            if not need <= {fa[y] for y in c}:
                continue
            for k, labs in self.F[c[-1]].basis.items():
                basis.setdefault(k - len(c) + 1, []).extend((c, h) for h in labs)
        allowed = self._allowed(t)

        def boundary(n, lab):
            c, h = lab
            return {key: v for key, v in self.w_boundary(n, c, h, allowed).items() if need <= {fa[y] for y in key[0]}}

        return ChainComplex.from_labels(self.F.field, basis, boundary, check=False)

    def glue(self, t) -> ChainComplex:
        fa = self.f.assignment
        q = fa[t]
        Q = self.family.poset
        phis = [phi for phi in chains_of(Q, Q.down(q)) if phi[-1] == q]
        images = {c: {fa[y] for y in c} for c in self.tails(t)}
        basis: Dict[int, list] = {}
        for phi in phis:
            dim = len(phi) - 1
            need = set(phi)
            for c in self.tails(t):
                if not need <= images[c]:
                    continue
                for k, labs in self.F[c[-1]].basis.items():
                    basis.setdefault(k - len(c) + 1 + dim, []).extend((phi, c, h) for h in labs)
        allowed = self._allowed(t)

        def boundary(n, cell):
            phi, c, h = cell
            dim = len(phi) - 1
            out: Dict = {}
            for i in range(dim):
                out[(phi[:i] + phi[i + 1:], c, h)] = (-1) ** i
            sign = -1 if dim % 2 else 1
            for (c2, h2), v in self.w_boundary(n - dim, c, h, allowed).items():
                key = (phi, c2, h2)
                out[key] = out.get(key, 0) + sign * v
            return out

        return ChainComplex.from_labels(self.F.field, basis, boundary, check=False)

    def counit(self, t, G: ChainComplex) -> ChainMap:
        q = self.f.assignment[t]

        def image(n, cell):
            phi, c, h = cell
            return {h: 1} if phi == (q,) and c == (t,) else {}

        return ChainMap.from_labels(G, self.F[t], image, check=False)


def reflected_gluing_value(family: Family, F: Diagram, phi: Tuple) -> Diagram:
    """ǧd(F)(φ) computed literally by iterating λ^p Ψ_p."""
    G = F
    for p in phi:
        G = family.lam(p, family.psi(p, G))
    return G


def reflected_reconstruction(family: Family, F: Diagram, validate: bool = False) -> Tuple[bool, Optional[str]]:
    """Is the counit colim over sd(P)^op of ǧd(F) -> F a quasi-isomorphism?"""
    if isinstance(family, Tautological):
        for x in family.ambient.elements:
            G = taut_reflected_glue(F, x)
            e = taut_counit(F, x, G)
            if validate:
                G.validate()
                e.validate()
            if not cone(e).is_acyclic():
                return False, f"counit not a quasi-isomorphism at {label_text(x)}"
        return True, None
    R = FiberedReflected(family, F)
    for t in family.ambient.elements:
        G = R.glue(t)
        e = R.counit(t, G)
        if validate:
            G.validate()
            e.validate()
        if not cone(e).is_acyclic():
            return False, f"counit not a quasi-isomorphism at {label_text(t)}"
    return True, None
