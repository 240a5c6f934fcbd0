"""Mapping complexes from gluing data.

For objects E, F the derived hom rhom(E, F) is the limit over sd(P) of

    N(φ) = Hom(Φ_{max φ} E, Γ_φ Φ_{min φ} F).

A cover adding a vertex below max φ postcomposes with the corresponding
gluing map of F.  A cover adding a new maximum y precomposes with the
gluing data of E, Φ_y E -> Γ^x_y Φ_x E, and tensors with the interval factor.
"""

from __future__ import annotations

from typing import Callable, Dict, Hashable, List, Optional, Tuple

from ..diagram import Diagram, rhom
from ..homalg import ChainComplex, ChainMap, HomologyProfile, hom_complex
from ..poset import PosetError, Subdivision, label_text, subdivision
from .families import Family, Fibered, Tautological
from .micro import FiberedModel, TautologicalModel, _eps


class NanocosmUnsupported(PosetError):
    pass


def cellular_holim(
    sd: Subdivision,
    values: Dict[Tuple, ChainComplex],
    cover_image: Callable[[Tuple, Tuple, int, Hashable], Dict[Hashable, object]],
    field,
) -> ChainComplex:
    """Limit of a strict diagram over a face poset: ⊕ N(φ)[-dim φ] with
    coboundary from codimension one faces, signed by the new vertex."""
    basis: Dict[int, list] = {}
    for phi in sd.elements:
        dim = len(phi) - 1
        for k, labs in values[phi].basis.items():
            basis.setdefault(k - dim, []).extend((phi, h) for h in labs)
    up: Dict[Tuple, List[Tuple[Tuple, int]]] = {}
    for a, b in sd.covers:
        extra = [x for x in b if x not in a][0]
        up.setdefault(a, []).append((b, b.index(extra)))

    def boundary(n, cell):
        phi, h = cell
        k = n + len(phi) - 1
        out = {(phi, y): v for y, v in values[phi].boundary_of(k, h).items()}
        sgn = -1 if k % 2 else 1
        for psi, pos in up.get(phi, ()):
            for y, v in cover_image(phi, psi, k, h).items():
                key = (psi, y)
                out[key] = out.get(key, 0) + sgn * (-1) ** pos * v
        return out

    return ChainComplex.from_labels(field, basis, boundary, check=False)


def _tautological_limit(family: Tautological, E: Diagram, F: Diagram) -> ChainComplex:
    P = family.poset
    sd = subdivision(P)
    ME, MF = TautologicalModel(family, E), TautologicalModel(family, F)
    values = {phi: hom_complex(ME.phi(phi[-1]), MF.value(phi)) for phi in sd.elements}

    def image(phi, psi, k, h):
        i, a, b = h
        if psi[-1] == phi[-1]:  # postcompose with Δ_s on F
            s = [x for x in psi if x not in phi][0]
            new, e = MF.insert_image(phi, s, b)
            return {} if new is None else {(i, a, new): e}
        x, y = phi[-1], psi[-1]
        sigma_a, g = a
        taus, sigma_b, g_b = b
        out = {}
        # Φ_y E cells whose deconcatenation at x is (m, a): σ_c = σ_a + (x,) + m
        for m in MF.interval_chains(x, y):
            c = (sigma_a + (x,) + m, g)
            e = _eps(len(sigma_a), len(m))
            sign = -1 if (k * (len(m) + 1)) % 2 else 1
            out[(i + len(m) + 1, c, ((m,) + taus, sigma_b, g_b))] = e * sign
        return out

    return cellular_holim(sd, values, image, family.field)


def _fibered_limit(family: Fibered, E: Diagram, F: Diagram) -> ChainComplex:
    Q = family.poset
    sd = subdivision(Q)
    point = {}
    for q in Q.elements:
        S = family.fiber(q)
        if len(S) > 1:
            raise NanocosmUnsupported(
                f"the fibered nanocosm needs fibers with at most one element; {label_text(q)} has {len(S)}"
            )
        point[q] = S[0] if S else None
    M = FiberedModel(family, F)
    zero = ChainComplex.zero(family.field)
    values = {}
    for phi in sd.elements:
        t = point[phi[-1]]
        values[phi] = zero if t is None else hom_complex(E[t], M.value(phi)[t])
    A = family.ambient

    def image(phi, psi, k, h):
        i, a, b = h
        if psi[-1] == phi[-1]:
            t = point[phi[-1]]
            return {(i, a, y): v for y, v in M.cover_map(phi, psi)[t].image_of(k + i, b).items()}
        tx, ty = point[phi[-1]], point[psi[-1]]
        if ty is None or not A.leq(ty, tx):
            return {}
        M.value(psi)
        unit = M._unit[psi][ty]
        out = {}
        pre = E.map(ty, tx)
        for a2 in E[ty].basis.get(i, ()):
            v = pre.image_of(i, a2).get(a)
            if not v:
                continue
            for y, w in unit.image_of(k + i, b).items():
                out[(i, a2, y)] = out.get((i, a2, y), 0) + v * w
        return out

    return cellular_holim(sd, values, image, family.field)


def nanocosm_limit(family: Family, E: Diagram, F: Diagram) -> ChainComplex:
    """lim_{sd(P)} Hom(Φ_{max φ} E, Γ_φ Φ_{min φ} F) as a complex."""
    if E.shape != family.ambient or F.shape != family.ambient:
        raise PosetError("both objects must live over the ambient poset")
    if isinstance(family, Tautological):
        return _tautological_limit(family, E, F)
    return _fibered_limit(family, E, F)


def nanocosm_check(family: Family, E: Diagram, F: Diagram, validate: bool = False) -> Tuple[bool, Optional[str]]:
    """Compare the homology of the gluing-data limit with rhom(E, F)."""
    N = nanocosm_limit(family, E, F)
    if validate:
        N.validate()
    a, b = N.homology(), rhom(E, F).homology()
    if a != b:
        return False, f"gluing-data mapping complex {a} differs from rhom {b}"
    return True, None
