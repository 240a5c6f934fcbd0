"""Euler-characteristic bookkeeping for tautological stratifications.

Over a field K₀ collapses to the Euler characteristic, so an object F of
Fun(P, Ch) has two integer vectors on P:

    phiCheck(p) = χ(F(p))       (the filtration pieces)
    phi(p)      = χ(Φ_p F)      (the strata)

related by Möbius inversion: phiCheck(p) = Σ_{r<=p} phi(r) and
phi(p) = Σ_{r<=p} μ(r, p) phiCheck(r).
"""

from __future__ import annotations

import csv
import io
import json
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

from .diagram import Diagram
from .homalg import ChainComplex, ShapeMismatch, tensor
from .linalg import QQ, Field
from .poset import FinitePoset, interval_complex, label_text, mobius

K0Vector = Dict[Hashable, int]


def k0_profiles(family, F: Diagram) -> Dict[str, K0Vector]:
    """phiCheck and phi of a tautological object."""
    from .strat.families import Tautological

    if not isinstance(family, Tautological):
        raise TypeError("K₀ profiles are defined for the tautological family")
    P = family.poset
    return {
        "phiCheck": {p: F[p].euler for p in P.elements},
        "phi": {p: family.phi(p, F).euler for p in P.elements},
    }


def inversion_witness(P: FinitePoset, phi_check: K0Vector, phi: K0Vector) -> Optional[str]:
    """None when both inversion identities hold, else the first failure."""
    keys = set(P.elements)
    if set(phi_check) != keys or set(phi) != keys:
        raise ShapeMismatch("K₀ vectors must be indexed by the poset elements")
    mu = mobius(P)
    for p in P.elements:
        below = P.down(p)
        s = sum(phi[r] for r in below)
        if s != phi_check[p]:
            return f"Σ_(r<={label_text(p)}) phi = {s} but phiCheck = {phi_check[p]}"
        m = sum(mu[(r, p)] * phi_check[r] for r in below)
        if m != phi[p]:
            return f"Σ_(r<={label_text(p)}) μ·phiCheck = {m} but phi = {phi[p]}"
    return None


def inversion_check(P: FinitePoset, phi_check: K0Vector, phi: K0Vector) -> bool:
    return inversion_witness(P, phi_check, phi) is None


def interval_euler_witness(P: FinitePoset, field: Field = QQ) -> Optional[str]:
    """None when χ(M^r_p) = μ(r, p) for all r <= p."""
    mu = mobius(P)
    for (r, p), m in mu.items():
        chi = interval_complex(P, r, p, field).euler
        if chi != m:
            return f"χ(M^{label_text(r)}_{label_text(p)}) = {chi} but μ = {m}"
    return None


def gluing_euler_witness(family, V: ChainComplex) -> Optional[str]:
    """None when χ(Γ^r_p V) = μ(r, p)·χ(V) for all r <= p."""
    P = family.poset
    mu = mobius(P)
    for (r, p), m in mu.items():
        chi = family.gluing(r, p, V).euler
        if chi != m * V.euler:
            return f"χ(Γ^{label_text(r)}_{label_text(p)} V) = {chi} but μ·χ(V) = {m * V.euler}"
    return None


def gluing_matches_interval(family, r, p, V: ChainComplex) -> bool:
    """H(Γ^r_p V) agrees with H(M^r_p ⊗ V)."""
    M = interval_complex(family.poset, r, p, V.field)
    return family.gluing(r, p, V).homology() == tensor(M, V).homology()


def total_phi(profile: Dict[str, K0Vector]) -> int:
    return sum(profile["phi"].values())


# --------------------------------------------------------------------------
# emitters
# --------------------------------------------------------------------------


def k0_table(P: FinitePoset, profile: Dict[str, K0Vector]) -> List[Dict[str, object]]:
    """One row per element: p, phi, phiCheck and the μ(-, p) row."""
    mu = mobius(P)
    rows = []
    for p in P.elements:
        rows.append(
            {
                "p": label_text(p),
                "phi": profile["phi"][p],
                "phiCheck": profile["phiCheck"][p],
                "mu": {label_text(r): mu[(r, p)] for r in P.down(p)},
            }
        )
    return rows


def k0_csv(P: FinitePoset, profile: Dict[str, K0Vector]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = [label_text(r) for r in P.elements]
    w.writerow(["p", "phi", "phiCheck"] + [f"mu({r},p)" for r in names])
    for row in k0_table(P, profile):
        w.writerow([row["p"], row["phi"], row["phiCheck"]] + [row["mu"].get(r, "") for r in names])
    return buf.getvalue()


def k0_json(P: FinitePoset, profile: Dict[str, K0Vector]) -> str:
    return json.dumps({"poset": P.to_json(), "rows": k0_table(P, profile)}, indent=2, sort_keys=True)


def mobius_table(P: FinitePoset) -> List[Tuple[str, str, int]]:
    mu = mobius(P)
    return [(label_text(r), label_text(p), mu[(r, p)]) for r in P.elements for p in P.elements if (r, p) in mu]
