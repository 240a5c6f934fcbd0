"""Strict objects and their reconstruction over twisted arrows.

An object is strict when its gluing diagram inverts every isominmax cover
of sd(P).  Such a diagram factors through the localization sd(P) ->
TwAr(P), and F is recovered as the limit over TwAr(P) of the right Kan
extension H, where H(p <= q) is the limit of gd(F) over the chains φ with
min φ <= p and max φ >= q.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Optional, Tuple

from ..diagram import Diagram, holim, holim_projection, holim_restriction
from ..homalg import ChainComplex
from ..poset import ISOMINMAX, MonotoneMap, TwistedArrows, label_text, named_poset, subdivision
from .families import Family, Fibered, Tautological
from .micro import FiberedModel, TautologicalModel


class NotStrict(ValueError):
    pass


def _chain_text(phi) -> str:
    return "{" + ",".join(label_text(x) for x in phi) + "}"


def strictness_check(family: Family, F: Diagram) -> Tuple[bool, Optional[str]]:
    """Does gd(F) send every isominmax cover to a quasi-isomorphism?"""
    sd = subdivision(family.poset)
    covers = [(a, b) for a, b, k in sd.classified_covers() if k == ISOMINMAX]
    if isinstance(family, Tautological):
        M = TautologicalModel(family, F)
        for a, b in covers:
            s = [x for x in b if x not in a][0]
            f = M.delta(a, s)
            if not f.is_quasi_iso():
                return False, _witness(a, b, f.source.homology(), f.target.homology())
        return True, None
    M = FiberedModel(family, F)
    for a, b in covers:
        f = M.cover_map(a, b)
        for t in family.ambient.elements:
            if not f[t].is_quasi_iso():
                return False, _witness(a, b, f[t].source.homology(), f[t].target.homology(), t)
    return True, None


def _witness(a, b, ha, hb, t=None) -> str:
    where = "" if t is None else f" at {label_text(t)}"
    return f"isominmax cover {_chain_text(a)} ⊂ {_chain_text(b)} is not invertible{where}: {ha} vs {hb}"


def sd_diagram_at(family: Fibered, M: FiberedModel, t, sd=None) -> Diagram:
    """gd(F) evaluated at an ambient element, as a diagram over sd(P)."""
    sd = sd or subdivision(family.poset)
    vals = {phi: M.value(phi)[t] for phi in sd.elements}
    edges = {(a, b): M.cover_map(a, b)[t] for a, b in sd.covers}
    return Diagram(sd, vals, edges, family.field, check=False)


def twisted_reconstruction(family: Family, F: Diagram) -> Dict[str, object]:
    """Factor gd(F) through TwAr(P) and reconstruct F from it.

    Returns the verdicts of the counit check (H(min φ <= max φ) -> gd(F)(φ)
    invertible) and of the profile comparison of lim_{TwAr} H with F.
    """
    ok, w = strictness_check(family, F)
    if not ok:
        raise NotStrict(w)
    if not isinstance(family, Fibered):
        raise NotStrict("twisted reconstruction is implemented for fibered families")
    Q = family.poset
    sd = subdivision(Q)
    tw = TwistedArrows(Q)
    M = FiberedModel(family, F)
    index: Dict[Hashable, List] = {}
    for a in tw.elements:
        p, q = a
        index[a] = [phi for phi in sd.elements if Q.leq(phi[0], p) and Q.leq(q, phi[-1])]
    counit_ok, profile_ok, witness = True, True, None
    for t in family.ambient.elements:
        G = sd_diagram_at(family, M, t, sd)
        Hv = {a: holim(G, index[a]) for a in tw.elements}
        for phi in sd.elements:
            a = (phi[0], phi[-1])
            if not holim_projection(G, phi, Hv[a]).is_quasi_iso():
                counit_ok = False
                witness = witness or f"H({label_text(a)}) -> gd(F){_chain_text(phi)} not invertible at {label_text(t)}"
        edges = {(a, b): holim_restriction(Hv[a], Hv[b]) for a, b in tw.covers}
        H = Diagram(tw, Hv, edges, family.field, check=False)
        if holim(H).homology() != F[t].homology():
            profile_ok = False
            witness = witness or f"limit over twisted arrows differs from F at {label_text(t)}"
    return {"counit": counit_ok, "reconstruction": profile_ok, "witness": witness}


def fibered_instances() -> Dict[str, MonotoneMap]:
    """Five maps to chains whose fibered stratifications are strict."""
    I = named_poset("[1]")
    C2 = named_poset("[2]")
    sq = I.product(I)
    V = named_poset("V")
    lo = V.minimal()
    return {
        "id [1]": MonotoneMap.identity(I),
        "[1]x[1] -> [1]": MonotoneMap(sq, I, {x: x[0] for x in sq.elements}),
        "[2] -> [1]": MonotoneMap(C2, I, {"0": "0", "1": "0", "2": "1"}),
        "id [2]": MonotoneMap.identity(C2),
        "V -> [1]": MonotoneMap(V, I, {x: ("0" if x in lo else "1") for x in V.elements}),
    }


def tautological_witness(field=None) -> Tuple[Tautological, Diagram]:
    """F = δ_0(k) over [2]: Φ_0 F = k, so the cover {0,2} ⊂ {0,1,2} compares Σ²k with 0."""
    from ..diagram import delta
    from ..linalg import QQ

    field = field or QQ
    P = named_poset("[2]")
    k = ChainComplex.from_dims(field, {0: 1})
    return Tautological(P, field), delta(P, "0", k)
