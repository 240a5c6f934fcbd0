"""Named property checks on random instances.

A check takes a family, a random object F of it and a seed, and returns
``(ok, witness)``.  ``run_check`` wraps the result into the verdict record
``{check, poset, seed, field, pass, witness}`` shared by the command line
and the test-suite.
"""

from __future__ import annotations

import copy
import time
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Tuple

from .diagram import Diagram, diagram_shift, random_complex, random_diagram
from .linalg import QQ, Field
from .poset import FinitePoset, MonotoneMap, PosetError, label_text, named_poset, wreath
from .strat.alignment import excision_C, excision_L, mayer_vietoris_C, mayer_vietoris_L, y_commutation
from .strat.families import Family, Fibered, Tautological
from .strat.filtration import filtration_identities
from .strat.formulas import cover_formula_check, tcofib_formula_check, tfib_formula_check
from .strat.micro import microcosm_check
from .strat.nanocosm import nanocosm_check
from .strat.operations import pushforward_check, quotient_check, refined_check, restricted_check
from .strat.reflected import reflected_reconstruction
from .strat.strictness import strictness_check, twisted_reconstruction
from .strat.tstructure import orthogonality_check

Result = Tuple[bool, Optional[str]]

FIELDS = {"Q": QQ, "F2": Field(2), "F3": Field(3)}


class InputError(ValueError):
    """Malformed or inconsistent input (exit code 2)."""


def parse_field(text: str) -> Field:
    try:
        return Field.parse(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def height_map(P: FinitePoset) -> MonotoneMap:
    """p -> length of the longest chain ending at p, as a map to a chain."""
    h: Dict[Hashable, int] = {}
    for x in P.linear_order:
        below = [h[y] for y in P.strict_down(x)]
        h[x] = 1 + max(below) if below else 0
    C = FinitePoset.chain(max(h.values()) if h else 0)
    return MonotoneMap(P, C, {x: str(v) for x, v in h.items()})


def make_family(kind: str, P: FinitePoset, field: Field = QQ, f: Optional[MonotoneMap] = None) -> Family:
    """``taut`` over P, or ``fibered`` along f: P -> Q (identity by default)."""
    if kind in ("taut", "tautological"):
        return Tautological(P, field)
    if kind == "fibered":
        if f is None:
            f = MonotoneMap.identity(P)
        if f.source is not P and list(f.source.elements) != list(P.elements):
            raise InputError("the map must start at the given poset")
        return Fibered(f, field)
    raise InputError(f"unknown family {kind!r}")


def random_object(family: Family, seed: int, complexity: int = 2) -> Diagram:
    return random_diagram(family.ambient, seed, complexity=complexity, field=family.field)


def cached_family(family: Family) -> Family:
    """A shallow copy of ``family`` whose C_D and L_D are memoized.

    Used when many down-set pairs share pieces.  Inputs are kept alive so
    their ids stay unique for the lifetime of the copy.
    """
    fam = copy.copy(family)
    cache: Dict[Tuple, object] = {}
    keep: List[Diagram] = []

    def memo(kind, original):
        def call(D, F):
            key = (kind, frozenset(D), id(F))
            if key not in cache:
                cache[key] = original(D, F)
                keep.append(F)
            return cache[key]

        return call

    fam.C = memo("C", family.C)
    fam.L = memo("L", family.L)
    return fam


# --------------------------------------------------------------------------
# individual checks
# --------------------------------------------------------------------------


def _all_pairs(family: Family, F: Diagram, fns, symmetric=()) -> Result:
    """Run every fn on all ordered pairs of down-sets; fns in ``symmetric``
    only on pairs D <= E in the enumeration order (the statement is symmetric)."""
    fam = cached_family(family)
    downs = family.poset.down_sets()
    for i, D in enumerate(downs):
        for j, E in enumerate(downs):
            for fn in fns:
                if fn in symmetric and j < i:
                    continue
                ok, w = fn(fam, D, E, F)
                if not ok:
                    return False, f"D={[label_text(x) for x in D]}, E={[label_text(x) for x in E]}: {w}"
    return True, None


def check_excision(family, F, seed, options) -> Result:
    return _all_pairs(family, F, (excision_C, excision_L))


def check_mv(family, F, seed, options) -> Result:
    mv = (mayer_vietoris_C, mayer_vietoris_L)
    return _all_pairs(family, F, mv + (y_commutation,), symmetric=mv)


def check_quotient(family, F, seed, options) -> Result:
    for D in family.poset.down_sets():
        for fn in (restricted_check, quotient_check):
            ok, w = fn(family, F, D)
            if not ok:
                return False, w
    return True, None


def check_pushforward(family, F, seed, options) -> Result:
    alpha = options.get("alpha")
    if alpha is None:
        raise InputError("pushforward needs a map α out of the stratifying poset (--alpha or --map)")
    try:
        return pushforward_check(family, F, alpha)
    except PosetError as exc:
        raise InputError(str(exc)) from None


def check_refine(family, F, seed, options) -> Result:
    if not isinstance(family, Tautological):
        raise InputError("refinement is checked for the tautological family")
    P = family.poset
    fibers = options.get("fibers") or {p: named_poset("[1]") for p in P.elements}
    W = wreath(P, fibers)
    G = random_diagram(W, seed, field=family.field)
    return refined_check(P, fibers, G)


def check_nanocosm(family, F, seed, options) -> Result:
    E = random_object(family, seed + 7919)
    return nanocosm_check(family, E, F)


def _stratum_degrees(family: Family, F: Diagram, which: str) -> List[int]:
    out = []
    for p in family.poset.elements:
        S = family.phi(p, F) if which == "phi" else family.psi(p, F)
        parts = [S] if not isinstance(S, Diagram) else [S[x] for x in S.shape.elements]
        for C in parts:
            out.extend(n for n, d in C.homology().items() if d)
    return out


def check_tstructure(family, F, seed, options) -> Result:
    """Shift F to be connective and a second object below -1, then test orthogonality."""
    G = random_object(family, seed + 104729)
    lo = _stratum_degrees(family, F, "phi")
    hi = _stratum_degrees(family, G, "psi")
    X = diagram_shift(F, -min(lo)) if lo else F
    Y = diagram_shift(G, -1 - max(hi)) if hi else G
    return orthogonality_check(family, X, Y)


def check_mobius_gluing(family, F, seed, options) -> Result:
    from .mobius import gluing_euler_witness, gluing_matches_interval, inversion_witness, k0_profiles

    if not isinstance(family, Tautological):
        raise InputError("mobius-gluing is defined for the tautological family")
    P = family.poset
    V = random_complex(family.field, seed)
    for r in P.elements:
        for p in P.up(r):
            if not gluing_matches_interval(family, r, p, V):
                return False, f"H(Γ^{label_text(r)}_{label_text(p)} V) differs from H(M ⊗ V)"
    w = gluing_euler_witness(family, V)
    if w:
        return False, w
    prof = k0_profiles(family, F)
    w = inversion_witness(P, prof["phiCheck"], prof["phi"])
    return (w is None), w


def check_strict(family, F, seed, options) -> Result:
    ok, w = strictness_check(family, F)
    if not ok or not isinstance(family, Fibered):
        return ok, w
    r = twisted_reconstruction(family, F)
    return bool(r["counit"] and r["reconstruction"]), r["witness"]


def check_formulas(family, F, seed, options) -> Result:
    """Reflection formulas on every interval p < q with a random coefficient."""
    P = family.poset
    covers = set(P.covers)
    for p in P.elements:
        for q in P.up(p):
            if p == q:
                continue
            if isinstance(family, Tautological):
                V = random_complex(family.field, seed)
            else:
                V = random_diagram(family.fiber_poset(p), seed, field=family.field)
            fns = [tfib_formula_check, tcofib_formula_check]
            if (p, q) in covers:
                fns.append(cover_formula_check)
            for fn in fns:
                ok, w = fn(family, p, q, V)
                if not ok:
                    return False, f"{label_text(p)} < {label_text(q)}: {w}"
    return True, None


def check_specseq(family, F, seed, options) -> Result:
    from .specseq import SpectralSequence, tower_from_stratification
    from .strat.filtration import FiltrationKind

    P = family.poset
    d = options.get("degrees") or {x: int(v) for x, v in height_map(P).assignment.items()}
    for kind in FiltrationKind:
        ok, w = SpectralSequence(tower_from_stratification(family, F, d, kind)).all_checks()
        if not ok:
            return False, f"{kind.value}: {w}"
    return True, None


CHECKS: Dict[str, Callable] = {
    "microcosm": lambda fam, F, seed, opt: microcosm_check(fam, F),
    "reflection": lambda fam, F, seed, opt: reflected_reconstruction(fam, F),
    "mobius-gluing": check_mobius_gluing,
    "filtration": lambda fam, F, seed, opt: filtration_identities(fam, F),
    "excision": check_excision,
    "mv": check_mv,
    "nanocosm": check_nanocosm,
    "pushforward": check_pushforward,
    "quotient": check_quotient,
    "refine": check_refine,
    "tstructure": check_tstructure,
    "strict": check_strict,
    "formulas": check_formulas,
    "specseq": check_specseq,
}


def run_check(
    name: str,
    family: Family,
    seed: int,
    poset_name: str = "",
    options: Optional[Mapping] = None,
    F: Optional[Diagram] = None,
) -> Dict[str, object]:
    """One verdict record, with wall-clock seconds."""
    if name not in CHECKS:
        raise InputError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    F = random_object(family, seed) if F is None else F
    t0 = time.perf_counter()
    ok, w = CHECKS[name](family, F, seed, dict(options or {}))
    return {
        "check": name,
        "poset": poset_name or family.poset.name or "",
        "seed": seed,
        "field": str(family.field),
        "pass": bool(ok),
        "witness": w,
        "seconds": round(time.perf_counter() - t0, 4),
    }
