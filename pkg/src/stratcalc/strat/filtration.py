"""The four canonical filtrations of an object and their graded pieces.

For p in the stratifying poset:

    fil^L_p = C_{≤p} F          ascending, indexed by P, graded pieces tcofib over (≤p)
    fil_R^p = L_{≤p} F          descending, indexed by P^op, tfib over (≤p)^op
    fil_L^p = cofib(C_{≱p}F -> F)   indexed by P, tfib over (≥p)
    fil^R_p = fib(F -> L_{≱p}F)     indexed by P^op, tcofib over (≥p)^op

All pieces of one filtration are built on nested label sets, so the
transition maps are label inclusions or label projections and the
filtration is a strict diagram of diagrams.  Evaluating at an ambient
element gives an ordinary Diagram of complexes.
"""

from __future__ import annotations

from enum import Enum
from typing import Dict, Hashable, List, Optional, Tuple

from ..diagram import (
    Diagram,
    DiagramMap,
    hocolim,
    hocolim_extension,
    holim,
    holim_restriction,
    total_cofiber,
    total_fiber,
)
from ..homalg import ChainComplex, ChainMap, HomologyProfile, cone, fib, shift
from ..poset import FinitePoset, label_text
from .families import Family


class FiltrationKind(str, Enum):
    ASC_LEFT = "AscLeft"  # fil^L
    DESC_RIGHT = "DescRight"  # fil_R
    DESC_LEFT = "DescLeft"  # fil_L
    ASC_RIGHT = "AscRight"  # fil^R

    @classmethod
    def parse(cls, s: str) -> "FiltrationKind":
        for k in cls:
            if s.lower() in (k.value.lower(), k.name.lower()):
                return k
        raise ValueError(f"unknown filtration kind {s!r}")


_INCLUDES = {FiltrationKind.ASC_LEFT: True, FiltrationKind.DESC_LEFT: True,
             FiltrationKind.DESC_RIGHT: False, FiltrationKind.ASC_RIGHT: False}


def label_inclusion(src: ChainComplex, tgt: ChainComplex) -> ChainMap:
    return hocolim_extension(src, tgt)


def label_projection(src: ChainComplex, tgt: ChainComplex) -> ChainMap:
    return holim_restriction(src, tgt)


class Filtration:
    """A functor index -> Fun(ambient, Ch) given by its pieces."""

    def __init__(
        self,
        family: Family,
        kind: FiltrationKind,
        F: Diagram,
        pieces: Dict[Hashable, Diagram],
        structure: Optional[Dict[Hashable, DiagramMap]] = None,
    ):
        self.family = family
        self.kind = kind
        self.F = F
        self.pieces = pieces
        # counits C F -> F (AscLeft) or units F -> L F (DescRight)
        self.structure = structure or {}
        P = family.poset
        self.index = P if kind in (FiltrationKind.ASC_LEFT, FiltrationKind.DESC_LEFT) else P.opposite()
        self._at: Dict[Hashable, Diagram] = {}

    def __getitem__(self, p) -> Diagram:
        return self.pieces[p]

    def at(self, x) -> Diagram:
        """The filtration evaluated at an ambient element."""
        D = self._at.get(x)
        if D is None:
            vals = {p: self.pieces[p][x] for p in self.index.elements}
            make = label_inclusion if _INCLUDES[self.kind] else label_projection
            edges = {(a, b): make(vals[a], vals[b]) for a, b in self.index.covers}
            D = self._at[x] = Diagram(self.index, vals, edges, self.family.field, check=False)
        return D

    def graded(self, p) -> Dict[Hashable, ChainComplex]:
        """The p-th graded piece, one complex per ambient element."""
        P = self.family.poset
        out = {}
        for x in self.family.ambient.elements:
            D = self.at(x)
            if self.kind == FiltrationKind.ASC_LEFT:
                out[x] = total_cofiber(D, P.down(p))
            elif self.kind == FiltrationKind.DESC_RIGHT:
                out[x] = total_fiber(D, P.down(p))
            elif self.kind == FiltrationKind.DESC_LEFT:
                out[x] = total_fiber(D, P.up(p))
            else:
                out[x] = total_cofiber(D, P.up(p))
        return out


def filtration(family: Family, kind, F: Diagram) -> Filtration:
    kind = FiltrationKind.parse(kind) if isinstance(kind, str) else kind
    P = family.poset
    pieces, structure = {}, {}
    for p in P.elements:
        if kind == FiltrationKind.ASC_LEFT:
            pieces[p], structure[p] = family.C(P.down(p), F)
        elif kind == FiltrationKind.DESC_RIGHT:
            pieces[p], structure[p] = family.L(P.down(p), F)
        elif kind == FiltrationKind.DESC_LEFT:
            pieces[p] = family.L_quotient(P.not_above(p), F)
        else:
            pieces[p] = family.C_quotient(P.not_above(p), F)
    return Filtration(family, kind, F, pieces, structure)


def graded_piece(family: Family, kind, p, F: Diagram) -> Dict[Hashable, ChainComplex]:
    family.poset.index(p)
    return filtration(family, kind, F).graded(p)


def expected_graded(family: Family, kind, p, F: Diagram) -> Diagram:
    """λ^pΦ_p F for the left-handed filtrations, ρ^pΨ_p F for the right-handed ones."""
    kind = FiltrationKind.parse(kind) if isinstance(kind, str) else kind
    if kind in (FiltrationKind.ASC_LEFT, FiltrationKind.DESC_LEFT):
        return family.lam(p, family.phi(p, F))
    return family.rho(p, family.psi(p, F))


# --------------------------------------------------------------------------
# comparison maps between a filtration and F
# --------------------------------------------------------------------------


def _out_of_hocolim(C: ChainComplex, X: ChainComplex, maps: Dict[Hashable, ChainMap]) -> ChainMap:
    def image(n, lab):
        c, g = lab
        return maps[c[0]].image_of(n, g) if len(c) == 1 else {}

    return ChainMap.from_labels(C, X, image, check=False)


def _into_holim(X: ChainComplex, C: ChainComplex, maps: Dict[Hashable, ChainMap]) -> ChainMap:
    def image(n, h):
        out = {}
        for p, f in maps.items():
            for y, v in f.image_of(n, h).items():
                out[((p,), y)] = v
        return out

    return ChainMap.from_labels(X, C, image, check=False)


def _to_F(fil: Filtration, x) -> Dict[Hashable, ChainMap]:
    """Pieces -> F(x): counits for fil^L, the fiber projection for fil^R."""
    F = fil.F
    out = {}
    for p in fil.index.elements:
        V = fil.pieces[p][x]
        if fil.kind == FiltrationKind.ASC_LEFT:
            out[p] = fil.structure[p][x]
        else:  # fib(F -> L F): the source part is labelled ('s', h)
            out[p] = ChainMap.from_labels(
                V, F[x], lambda n, lab: {lab[1]: 1} if lab[0] == "s" else {}, check=False
            )
    return out


def _from_F(fil: Filtration, x) -> Dict[Hashable, ChainMap]:
    """F(x) -> pieces: units for fil_R, the cone inclusion for fil_L."""
    F = fil.F
    out = {}
    for p in fil.index.elements:
        V = fil.pieces[p][x]
        if fil.kind == FiltrationKind.DESC_RIGHT:
            out[p] = fil.structure[p][x]
        else:  # cofib(C F -> F): the target part is labelled ('t', h)
            out[p] = ChainMap.from_labels(F[x], V, lambda n, h: {("t", h): 1}, check=False)
    return out


def retract_map(fil: Filtration, x) -> ChainMap:
    """colim fil -> F(x) (ascending kinds) or F(x) -> lim fil (descending kinds)."""
    D = fil.at(x)
    if fil.kind in (FiltrationKind.ASC_LEFT, FiltrationKind.ASC_RIGHT):
        return _out_of_hocolim(hocolim(D), fil.F[x], _to_F(fil, x))
    return _into_holim(fil.F[x], holim(D), _from_F(fil, x))


def interchange(
    family: Family, kind, p, F: Diagram, cache: Optional[Dict[FiltrationKind, Filtration]] = None
) -> Dict[Hashable, Tuple[ChainComplex, ChainComplex]]:
    """Both sides of the interchange formula at every ambient element.

    DescLeft:  fil_L^p ≃ cofib(colim_{q ≱ p} fil^L_q -> F)
    AscRight:  fil^R_p ≃ fib(F -> lim_{q ≱ p} fil_R^q)
    """
    kind = FiltrationKind.parse(kind) if isinstance(kind, str) else kind
    P = family.poset
    rest = P.not_above(p)
    cache = {} if cache is None else cache

    def get(k):
        if k not in cache:
            cache[k] = filtration(family, k, F)
        return cache[k]

    out = {}
    if kind == FiltrationKind.DESC_LEFT:
        lhs = get(kind)[p]
        src = get(FiltrationKind.ASC_LEFT)
        for x in family.ambient.elements:
            maps = _to_F(src, x)
            C = hocolim(src.at(x), rest)
            out[x] = (lhs[x], cone(_out_of_hocolim(C, F[x], {q: maps[q] for q in rest})))
    elif kind == FiltrationKind.ASC_RIGHT:
        lhs = get(kind)[p]
        src = get(FiltrationKind.DESC_RIGHT)
        for x in family.ambient.elements:
            maps = _from_F(src, x)
            C = holim(src.at(x), rest)
            out[x] = (lhs[x], fib(_into_holim(F[x], C, {q: maps[q] for q in rest})))
    else:
        raise ValueError("interchange formulas express DescLeft and AscRight")
    return out


def filtration_identities(family: Family, F: Diagram) -> Tuple[bool, Optional[str]]:
    """Graded pieces, retracts and interchange formulas for all four kinds."""
    P = family.poset
    cache: Dict[FiltrationKind, Filtration] = {}
    for kind in FiltrationKind:
        fil = cache[kind] = filtration(family, kind, F)
        for x in family.ambient.elements:
            f = retract_map(fil, x)
            if not f.is_quasi_iso():
                return False, f"{kind.value} retract fails at {label_text(x)}"
        for p in P.elements:
            got = fil.graded(p)
            exp = expected_graded(family, kind, p, F)
            for x, C in got.items():
                if C.homology() != exp[x].homology():
                    return False, (
                        f"{kind.value} graded piece at {label_text(p)} evaluated at {label_text(x)}: "
                        f"{C.homology()} vs {exp[x].homology()}"
                    )
    for kind in (FiltrationKind.DESC_LEFT, FiltrationKind.ASC_RIGHT):
        for p in P.elements:
            for x, (a, b) in interchange(family, kind, p, F, cache).items():
                if a.homology() != b.homology():
                    return False, f"{kind.value} interchange at {label_text(p)}, {label_text(x)}: {a.homology()} vs {b.homology()}"
    return True, None
