"""The glued t-structure.

An object is connective when every stratum Φ_p F has no homology in
negative degrees, and coconnective when every Ψ_p F has no homology in
positive degrees.  Maps from a connective object to a Σ^{-1}-coconnective
one are null: H_0 rhom(X, Y) = 0.
"""

from __future__ import annotations

from typing import Dict, Optional, Tuple

from ..diagram import Diagram, rhom
from ..homalg import ChainComplex
from ..poset import label_text
from .families import Family


def _complexes(obj):
    if isinstance(obj, ChainComplex):
        return [obj]
    return [obj[x] for x in obj.shape.elements]


def _degrees(obj):
    out = set()
    for C in _complexes(obj):
        out.update(n for n, d in C.homology().items() if d)
    return out


def connective_witness(family: Family, F: Diagram, bound: int = 0) -> Optional[str]:
    """None when H_n(Φ_p F) = 0 for all n < bound and all p."""
    for p in family.poset.elements:
        bad = [n for n in _degrees(family.phi(p, F)) if n < bound]
        if bad:
            return f"Φ_{label_text(p)} has H_{min(bad)} below {bound}"
    return None


def coconnective_witness(family: Family, F: Diagram, bound: int = 0) -> Optional[str]:
    """None when H_n(Ψ_p F) = 0 for all n > bound and all p."""
    for p in family.poset.elements:
        bad = [n for n in _degrees(family.psi(p, F)) if n > bound]
        if bad:
            return f"Ψ_{label_text(p)} has H_{max(bad)} above {bound}"
    return None


def is_connective(family: Family, F: Diagram) -> bool:
    return connective_witness(family, F) is None


def is_coconnective(family: Family, F: Diagram) -> bool:
    return coconnective_witness(family, F) is None


def tstructure_report(family: Family, X: Diagram, Y: Diagram) -> Dict[str, object]:
    """Predicates for X, Y and the orthogonality H_0 rhom(X, Y) = 0 when X is
    connective and Y is coconnective after one desuspension."""
    cx = connective_witness(family, X)
    cy = coconnective_witness(family, Y, bound=-1)
    applicable = cx is None and cy is None
    h0 = rhom(X, Y).homology()[0]
    return {
        "connective": cx is None,
        "coconnective": is_coconnective(family, Y),
        "applicable": applicable,
        "orthogonal": (h0 == 0) if applicable else None,
        "witness": cx or cy or (f"H_0 rhom = {h0}" if applicable and h0 else None),
    }


def orthogonality_check(family: Family, X: Diagram, Y: Diagram) -> Tuple[bool, Optional[str]]:
    r = tstructure_report(family, X, Y)
    if not r["applicable"]:
        return True, None
    return bool(r["orthogonal"]), r["witness"]
