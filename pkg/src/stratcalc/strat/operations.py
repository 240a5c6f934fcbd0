"""Fundamental operations on stratifications, checked stratum by stratum.

restricted   Z_D is stratified over D with the same strata.
quotient     X/Z_D (modelled by cofibers of C_D) is stratified over the
             complement of D: its strata vanish on D and are unchanged off D.
pushforward  along α: P -> Q the q-th stratum is stratified over the fiber
             P_q with the original strata.
refined      the tautological stratification over a wreath product P ≀ R
             refines its pushforward to P by tautological stratifications of
             Fun(R_p); the (p, r)-stratum is the r-th stratum of the p-th one.
"""

from __future__ import annotations

from typing import Dict, Hashable, Mapping, Optional, Tuple

from ..diagram import Diagram, restrict
from ..homalg import ChainComplex
from ..poset import FinitePoset, MonotoneMap, PosetError, label_text
from .families import Family, Fibered, Tautological, profile_difference


def _is_zero(obj) -> bool:
    if isinstance(obj, ChainComplex):
        return obj.is_acyclic()
    return all(obj[x].is_acyclic() for x in obj.shape.elements)


def restricted_family(family: Family, D) -> Tuple[Family, list]:
    """The restricted stratification of Z_D and the ambient support of Z_D."""
    D = family.check_down(D)
    if isinstance(family, Tautological):
        return Tautological(family.poset.subposet(D), family.field), D
    S = family.closed_support(D)
    U = family.base.subposet(D)
    T = family.ambient.subposet(S)
    f = MonotoneMap(T, U, {t: family.map.assignment[t] for t in S})
    return Fibered(f, family.field), S


def restricted_check(family: Family, F: Diagram, D) -> Tuple[bool, Optional[str]]:
    sub, S = restricted_family(family, D)
    G = family.C(D, F)[0]  # an object of Z_D
    H = restrict(G, S)
    for p in sub.poset.elements:
        a = sub.phi(p, H)
        for b in (family.phi(p, G), family.phi(p, F)):
            w = profile_difference(a, b)
            if w:
                return False, f"restricted stratum {label_text(p)}: {w}"
    return True, None


def quotient_check(family: Family, F: Diagram, D) -> Tuple[bool, Optional[str]]:
    D = family.check_down(D)
    G = family.L_quotient(D, F)
    inside = set(D)
    for p in family.poset.elements:
        a = family.phi(p, G)
        if p in inside:
            if not _is_zero(a):
                return False, f"quotient stratum {label_text(p)} should vanish"
        else:
            w = profile_difference(a, family.phi(p, F))
            if w:
                return False, f"quotient stratum {label_text(p)}: {w}"
    return True, None


def pushforward_stratum(family: Tautological, F: Diagram, alpha: MonotoneMap, q) -> Tuple[Tautological, Diagram]:
    """The q-th stratum of the pushforward as a diagram over the fiber P_q."""
    P = family.poset
    below = alpha.preimage(alpha.target.strict_down(q))
    Pq = P.subposet(alpha.fiber(q))
    G = family.L_quotient(below, F)
    return Tautological(Pq, family.field), restrict(G, Pq)


def pushforward_check(family: Family, F: Diagram, alpha: MonotoneMap) -> Tuple[bool, Optional[str]]:
    src = family.base if isinstance(family, Fibered) else family.poset
    if list(alpha.source.elements) != list(src.elements):
        raise PosetError("the map must start at the poset being coarsened")
    if isinstance(family, Fibered):
        # coarsen f: T -> P to α∘f: T -> P'
        f = family.map
        g = MonotoneMap(f.source, alpha.target, {t: alpha.assignment[f.assignment[t]] for t in f.source.elements})
        coarse = Fibered(g, family.field)
        for q in alpha.target.elements:
            Pq = family.base.subposet(alpha.fiber(q))
            S = coarse.fiber(q)
            sub = Fibered(MonotoneMap(family.ambient.subposet(S), Pq, {t: f.assignment[t] for t in S}), family.field)
            stratum = coarse.phi(q, F)
            for p in Pq.elements:
                w = profile_difference(sub.phi(p, stratum), family.phi(p, F))
                if w:
                    return False, f"pushforward stratum {label_text(q)}, point {label_text(p)}: {w}"
        return True, None
    for q in alpha.target.elements:
        sub, G = pushforward_stratum(family, F, alpha, q)
        for p in sub.poset.elements:
            w = profile_difference(sub.phi(p, G), family.phi(p, F))
            if w:
                return False, f"pushforward stratum {label_text(q)}, point {label_text(p)}: {w}"
    return True, None


def refined_check(base: FinitePoset, fibers: Mapping[Hashable, FinitePoset], F: Diagram) -> Tuple[bool, Optional[str]]:
    """F lives over the wreath product base ≀ fibers."""
    W = F.shape
    proj = MonotoneMap(W, base, {x: x[0] for x in W.elements})
    fam = Tautological(W, F.field)
    for p in base.elements:
        sub, G = pushforward_stratum(fam, F, proj, p)
        R = fibers[p]
        inner = Tautological(R, F.field)
        # Fun(R_p) and Fun(π^{-1}(p)) are identified by r <-> (p, r)
        relabelled = Diagram(
            R,
            {r: G[(p, r)] for r in R.elements},
            {(a, b): G.map((p, a), (p, b)) for a, b in R.covers},
            F.field,
            check=False,
        )
        for r in R.elements:
            w = profile_difference(inner.phi(r, relabelled), fam.phi((p, r), F))
            if w:
                return False, f"refined stratum ({label_text(p)}, {label_text(r)}): {w}"
    return True, None


def fundamental_ops(
    family: Family,
    F: Diagram,
    D=None,
    alpha: Optional[MonotoneMap] = None,
) -> Dict[str, object]:
    """Verdicts for restriction and quotient along every down-set (or the
    given one) and for pushforward along alpha when supplied."""
    downs = [D] if D is not None else family.poset.down_sets()
    out: Dict[str, object] = {"witness": None}
    for name, fn in (("restricted", restricted_check), ("quotient", quotient_check)):
        ok = True
        for E in downs:
            good, w = fn(family, F, E)
            if not good:
                ok = False
                out["witness"] = out["witness"] or w
                break
        out[name] = ok
    if alpha is not None:
        good, w = pushforward_check(family, F, alpha)
        out["pushforward"] = good
        out["witness"] = out["witness"] or w
    return out
