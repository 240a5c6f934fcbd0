"""Subgroup-lattice combinatorics for genuine equivariant stratifications.

For a finite group G the strata are indexed by P_G, the conjugacy classes
of subgroups ordered by subconjugacy.  This module enumerates P_G, Weyl
groups, fixed points of coset spaces and the double cosets that control the
gluing functors between strata, and decides which gluing maps vanish for
combinatorial reasons:

* no g with H ⊆ gKg⁻¹ ⊆ N(H) (the set C̃(H, K) is empty), or
* every summand has a double-coset index |gKg⁻¹ : H| that is not a prime
  power (index 1 counts as a prime power).

Everything else is reported as possibly nonzero.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

from .poset import FinitePoset, NotComparable, PosetError, subdivision

Perm = Tuple[int, ...]
Subgroup = FrozenSet[Perm]

ORDER_CAP = 10_000
SUBGROUP_CAP = 60


class GroupError(ValueError):
    pass


class GroupTooLarge(GroupError):
    pass


class NotASubgroup(GroupError):
    pass


# --------------------------------------------------------------------------
# permutations
# --------------------------------------------------------------------------


def compose(p: Perm, q: Perm) -> Perm:
    """p∘q: apply q first."""
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def identity(n: int) -> Perm:
    return tuple(range(n))


def conjugate(g: Perm, S: Iterable[Perm]) -> Subgroup:
    """g S g⁻¹."""
    gi = inverse(g)
    return frozenset(compose(compose(g, s), gi) for s in S)


def cycles_to_perm(cycles: Sequence[Sequence[int]], n: int) -> Perm:
    """Product of cycles on {1..n} (rightmost applied first)."""
    p = list(range(n))
    for cyc in reversed(cycles):
        step = list(range(n))
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            step[a - 1] = b - 1
        p = [step[i] for i in p]
    return tuple(p)


def perm_to_cycles(p: Perm) -> str:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def closure(gens: Iterable[Perm], n: int, cap: int = ORDER_CAP) -> Subgroup:
    gens = [g for g in gens]
    e = identity(n)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise GroupTooLarge(f"group order exceeds {cap}")
        frontier = nxt
    return frozenset(seen)


def element_order(p: Perm) -> int:
    k, q, e = 1, p, identity(len(p))
    while q != e:
        q = compose(p, q)
        k += 1
    return k


# --------------------------------------------------------------------------
# groups
# --------------------------------------------------------------------------


class PermGroup:
    """A permutation group on {1..n} given by generators."""

    def __init__(self, degree: int, generators: Sequence[Perm], name: str = ""):
        for g in generators:
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise GroupError(f"{g!r} is not a permutation of {degree} points")
        self.degree = degree
        self.generators = list(generators)
        self.name = name
        self.elements: Subgroup = closure(self.generators, degree)
        self._sorted = sorted(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __repr__(self):
        return f"PermGroup({self.name or self.degree}, order={self.order})"

    def subgroup(self, gens: Iterable[Perm]) -> Subgroup:
        return closure(gens, self.degree)

    def check_subgroup(self, S: Iterable[Perm]) -> Subgroup:
        S = frozenset(S)
        if not S or not S <= self.elements:
            raise NotASubgroup("not a subset of the group")
        for a in S:
            for b in S:
                if compose(a, inverse(b)) not in S:
                    raise NotASubgroup("not closed under the group law")
        return S

    def normalizer(self, H: Subgroup) -> Subgroup:
        return frozenset(g for g in self.elements if conjugate(g, H) == H)

    def subgroups(self) -> List[Subgroup]:
        """All subgroups, by joining cyclic subgroups until nothing new appears."""
        if self.order > SUBGROUP_CAP:
            raise GroupTooLarge(f"subgroup enumeration is capped at order {SUBGROUP_CAP} (got {self.order})")
        n = self.degree
        cyclic = {closure([g], n) for g in self._sorted}
        subs = set(cyclic)
        frontier = list(cyclic)
        while frontier:
            nxt = []
            for S in frontier:
                for C in cyclic:
                    if C <= S:
                        continue
                    T = closure(list(S) + list(C), n)
                    if T not in subs:
                        subs.add(T)
                        nxt.append(T)
            frontier = nxt
        return sorted(subs, key=lambda S: (len(S), sorted(S)))


def cyclic_group(n: int) -> PermGroup:
    if n < 1:
        raise GroupError("C_n needs n >= 1")
    gen = tuple((i + 1) % n for i in range(n))
    return PermGroup(n, [gen], name=f"C{n}")


def symmetric_group(n: int) -> PermGroup:
    if n < 1:
        raise GroupError("S_n needs n >= 1")
    gens = []
    if n > 1:
        gens = [cycles_to_perm([[1, 2]], n), cycles_to_perm([list(range(1, n + 1))], n)]
    return PermGroup(n, gens, name=f"S{n}")


def alternating_group(n: int) -> PermGroup:
    if n < 1:
        raise GroupError("A_n needs n >= 1")
    gens = [cycles_to_perm([[1, 2, k]], n) for k in range(3, n + 1)]
    return PermGroup(n, gens, name=f"A{n}")


def dihedral_group(order: int) -> PermGroup:
    """The dihedral group of the given order (D2n has order 2n)."""
    if order < 2 or order % 2:
        raise GroupError("dihedral groups have even order >= 2")
    n = order // 2
    if n == 1:
        return PermGroup(2, [(1, 0)], name="D2")
    if n == 2:
        return PermGroup(4, [cycles_to_perm([[1, 2], [3, 4]], 4), cycles_to_perm([[1, 3], [2, 4]], 4)], name="D4")
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return PermGroup(n, [rot, ref], name=f"D{order}")


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_group(spec: str) -> PermGroup:
    """'Cn', 'Sn', 'An', 'D2n' or generators in cycle notation, e.g.
    '(1 2 3); (1 2)' or '(1,2)(3,4), (1,3)(2,4)'."""
    text = spec.strip()
    m = re.fullmatch(r"([CSAD])(\d+)", text)
    if m:
        kind, k = m.group(1), int(m.group(2))
        return {"C": cyclic_group, "S": symmetric_group, "A": alternating_group, "D": dihedral_group}[kind](k)
    if "(" not in text:
        raise GroupError(f"cannot parse group {spec!r}")
    body = text.strip("[] ")
    # generators are separated by ';' or by ',' / whitespace between ')' and '('
    parts = [p for p in re.split(r";|\)\s*,\s*\(", body) if p.strip()]
    gens_cycles = []
    for part in parts:
        part = part.strip()
        if not part.startswith("("):
            part = "(" + part
        if not part.endswith(")"):
            part = part + ")"
        cycles = []
        for c in _CYCLE.findall(part):
            pts = [int(x) for x in re.split(r"[,\s]+", c.strip()) if x]
            if len(set(pts)) != len(pts) or any(x < 1 for x in pts):
                raise GroupError(f"bad cycle ({c})")
            if pts:
                cycles.append(pts)
        if _CYCLE.sub("", part).strip():
            raise GroupError(f"cannot parse generator {part!r}")
        gens_cycles.append(cycles)
    n = max((x for g in gens_cycles for c in g for x in c), default=1)
    return PermGroup(n, [cycles_to_perm(g, n) for g in gens_cycles], name=text)


# --------------------------------------------------------------------------
# naming subgroups up to isomorphism (small orders)
# --------------------------------------------------------------------------


def _is_abelian(S: Subgroup) -> bool:
    return all(compose(a, b) == compose(b, a) for a, b in combinations(S, 2))


def _is_prime_power(n: int) -> bool:
    if n == 1:
        return True
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            return n == 1
        p += 1
    return True


def iso_type(S: Subgroup) -> str:
    n = len(S)
    if n == 1:
        return "e"
    orders = sorted(element_order(g) for g in S)
    if orders[-1] == n:
        return f"C{n}"
    ab = _is_abelian(S)
    if ab:
        if all(o <= 2 for o in orders):
            k = n.bit_length() - 1
            return "V4" if n == 4 else f"C2^{k}"
        return f"Ab{n}"
    if n == 6:
        return "S3"
    if n == 8:
        return "Q8" if orders.count(2) == 1 else "D8"
    if n == 2 * (n // 2) and orders.count(n // 2) >= 2 and orders.count(2) == n // 2 + (1 if (n // 2) % 2 == 0 else 0):
        return f"D{n}"
    if n == 12 and orders.count(3) == 8:
        return "A4"
    if n == 24 and orders.count(4) == 6 and orders.count(3) == 8:
        return "S4"
    if n == 60:
        return "A5"
    return f"G{n}"


# --------------------------------------------------------------------------
# the poset of conjugacy classes
# --------------------------------------------------------------------------


@dataclass
class SubgroupClass:
    name: str
    representative: Subgroup
    members: List[Subgroup]
    order: int
    normalizer_order: int
    weyl_order: int

    @property
    def class_size(self) -> int:
        return len(self.members)


class SubgroupPoset:
    """Conjugacy classes of subgroups of G ordered by subconjugacy."""

    def __init__(self, G: PermGroup):
        self.group = G
        subs = G.subgroups()
        classes: List[List[Subgroup]] = []
        seen = set()
        for S in subs:
            if S in seen:
                continue
            orbit = {conjugate(g, S) for g in G.elements}
            seen |= orbit
            classes.append(sorted(orbit, key=sorted))
        names = [iso_type(c[0]) for c in classes]
        if classes:
            names[-1] = G.name if re.fullmatch(r"[CSAD]\d+", G.name or "") else names[-1]
        counts: Dict[str, int] = {}
        for nm in names:
            counts[nm] = counts.get(nm, 0) + 1
        seen_names: Dict[str, int] = {}
        self.classes: List[SubgroupClass] = []
        for c, nm in zip(classes, names):
            if counts[nm] > 1:
                seen_names[nm] = seen_names.get(nm, 0) + 1
                nm = f"{nm}#{seen_names[nm]}"
            rep = c[0]
            N = G.normalizer(rep)
            self.classes.append(SubgroupClass(nm, rep, c, len(rep), len(N), len(N) // len(rep)))
        self.by_name = {c.name: c for c in self.classes}
        self._class_of = {S: c.name for c in self.classes for S in c.members}
        rel = []
        for a in self.classes:
            for b in self.classes:
                if a is not b and a.order < b.order and b.order % a.order == 0:
                    if any(a.representative <= S for S in b.members):
                        rel.append((a.name, b.name))
        self.poset = FinitePoset.from_relations([c.name for c in self.classes], rel, name=f"P_{G.name}")

    def class_of(self, S: Subgroup) -> str:
        try:
            return self._class_of[frozenset(S)]
        except KeyError:
            raise NotASubgroup("not a subgroup of the group") from None

    def __getitem__(self, name: str) -> SubgroupClass:
        try:
            return self.by_name[name]
        except KeyError:
            raise NotASubgroup(f"no subgroup class named {name!r}") from None

    def to_json(self) -> dict:
        return {
            "group": self.group.name,
            "order": self.group.order,
            "poset": self.poset.to_json(),
            "classes": [
                {
                    "name": c.name,
                    "order": c.order,
                    "classSize": c.class_size,
                    "normalizerOrder": c.normalizer_order,
                    "weylOrder": c.weyl_order,
                    "generators": [perm_to_cycles(g) for g in _small_generators(c.representative)],
                }
                for c in self.classes
            ],
        }


def _small_generators(S: Subgroup) -> List[Perm]:
    """A short generating list of S (greedy)."""
    n = len(next(iter(S)))
    gens: List[Perm] = []
    span = frozenset([identity(n)])
    for g in sorted(S, key=lambda x: (-element_order(x), x)):
        if g not in span:
            gens.append(g)
            span = closure(gens, n)
            if span == S:
                break
    return gens


def subgroup_poset(G: PermGroup) -> SubgroupPoset:
    return SubgroupPoset(G)


# --------------------------------------------------------------------------
# Weyl groups, fixed points, double cosets
# --------------------------------------------------------------------------


def _left_cosets(G: PermGroup, H: Subgroup, within: Optional[Iterable[Perm]] = None) -> List[Tuple[Perm, FrozenSet[Perm]]]:
    out, seen = [], set()
    for g in sorted(within if within is not None else G.elements):
        if g in seen:
            continue
        coset = frozenset(compose(g, h) for h in H)
        seen |= coset
        out.append((g, coset))
    return out


def _resolve(PG: SubgroupPoset, H) -> Subgroup:
    if isinstance(H, str):
        return PG[H].representative
    return PG.group.check_subgroup(H)


def weyl_data(PG: SubgroupPoset, H, K=None) -> Dict[str, object]:
    """W(H) = N(H)/H acting on the cosets N(H)/H; with K ⊆ H also the
    relative Weyl group order |(N(K) ∩ N(H))/K|."""
    G = PG.group
    Hs = _resolve(PG, H)
    N = G.normalizer(Hs)
    cosets = _left_cosets(G, Hs, N)
    pos = {c: i for i, (_, c) in enumerate(cosets)}
    gens = []
    for n in _small_generators(N) if len(N) > 1 else []:
        perm = tuple(pos[frozenset(compose(n, x) for x in c)] for _, c in cosets)
        if perm != identity(len(cosets)):
            gens.append(perm)
    W = PermGroup(max(len(cosets), 1), gens or [identity(max(len(cosets), 1))], name="")
    W.name = iso_type(W.elements)
    out: Dict[str, object] = {"weyl": W, "order": W.order, "type": W.name}
    if K is not None:
        Ks = _resolve(PG, K)
        if not Ks <= Hs:
            raise NotASubgroup("the relative Weyl group needs K ⊆ H")
        NK = G.normalizer(Ks)
        out["relativeWeyl"] = len(NK & N) // len(Ks)
    return out


def fixed_points(PG: SubgroupPoset, H, K) -> Dict[str, object]:
    """(G/H)^K: cosets gH with K g H = g H, with the right action of W(H)."""
    G = PG.group
    Hs, Ks = _resolve(PG, H), _resolve(PG, K)
    fixed = []
    for g, coset in _left_cosets(G, Hs):
        if all(frozenset(compose(k, x) for x in coset) == coset for k in Ks):
            fixed.append((g, coset))
    pos = {c: i for i, (_, c) in enumerate(fixed)}
    action = []
    for n in _small_generators(G.normalizer(Hs)) if len(Hs) < G.order else []:
        perm = tuple(pos[frozenset(compose(compose(g, n), h) for h in Hs)] for g, _ in fixed)
        action.append(perm)
    return {"size": len(fixed), "representatives": [perm_to_cycles(g) for g, _ in fixed], "weylAction": action}


def subconjugate(PG: SubgroupPoset, H, K) -> bool:
    return PG.poset.leq(PG.class_of(_resolve(PG, H)), PG.class_of(_resolve(PG, K)))


@dataclass
class Summand:
    representative: str
    index: int
    stabilizer: int  # |N(H) ∩ gN(K)g⁻¹|, the subgroup the summand is induced from

    @property
    def prime_power(self) -> bool:
        return _is_prime_power(self.index)


def double_coset_data(PG: SubgroupPoset, H, K) -> Dict[str, object]:
    """C̃(H, K) = {g : H ⊆ gKg⁻¹ ⊆ N(H)} and its N(H) \\ C̃ / N(K) double cosets."""
    G = PG.group
    Hs, Ks = _resolve(PG, H), _resolve(PG, K)
    if not subconjugate(PG, Hs, Ks):
        raise NotComparable("double cosets need H subconjugate to K")
    NH, NK = G.normalizer(Hs), G.normalizer(Ks)
    ctilde = [g for g in sorted(G.elements) if Hs <= conjugate(g, Ks) <= NH]
    remaining = set(ctilde)
    summands = []
    for g in ctilde:
        if g not in remaining:
            continue
        dc = {compose(compose(a, g), b) for a in NH for b in NK}
        remaining -= dc
        gK = conjugate(g, Ks)
        stab = NH & conjugate(g, NK)
        summands.append(Summand(perm_to_cycles(g), len(gK) // len(Hs), len(stab)))
    return {"cTilde": len(ctilde), "cosets": summands}


# --------------------------------------------------------------------------
# skeletons
# --------------------------------------------------------------------------


@dataclass
class EdgeVerdict:
    source: str
    target: str
    verdict: str  # "Zero" or "PossiblyNonzero"
    reason: Optional[str]  # "EmptyCTilde" or "NoPrimePowerSummand" for Zero
    summands: List[Summand]

    def to_json(self) -> dict:
        out = {"from": self.source, "to": self.target, "verdict": self.verdict}
        if self.reason:
            out["reason"] = self.reason
        if self.verdict == "PossiblyNonzero":
            out["summands"] = [
                {"representative": s.representative, "index": s.index, "inducedFrom": s.stabilizer}
                for s in self.summands
                if s.prime_power
            ]
        return out


def edge_verdict(PG: SubgroupPoset, H: str, K: str, reps: Optional[Dict[str, Subgroup]] = None) -> EdgeVerdict:
    reps = reps or {}
    Hs = reps.get(H, PG[H].representative)
    Ks = reps.get(K, PG[K].representative)
    data = double_coset_data(PG, Hs, Ks)
    summands = data["cosets"]
    if not data["cTilde"]:
        return EdgeVerdict(H, K, "Zero", "EmptyCTilde", [])
    if not any(s.prime_power for s in summands):
        return EdgeVerdict(H, K, "Zero", "NoPrimePowerSummand", summands)
    return EdgeVerdict(H, K, "PossiblyNonzero", None, summands)


def skeleton(G: PermGroup, PG: Optional[SubgroupPoset] = None, reps: Optional[Dict[str, Subgroup]] = None) -> List[EdgeVerdict]:
    """A verdict for every strict pair H < K of P_G."""
    PG = PG or subgroup_poset(G)
    P = PG.poset
    out = []
    for H in P.elements:
        for K in P.elements:
            if H != K and P.leq(H, K):
                out.append(edge_verdict(PG, H, K, reps))
    return out


def skeleton_summary(report: List[EdgeVerdict]) -> Dict[str, List[str]]:
    out: Dict[str, List[str]] = {"PossiblyNonzero": [], "Zero": []}
    for e in report:
        out[e.verdict].append(f"{e.source}->{e.target}")
    return out


def skeleton_json(G: PermGroup, report: List[EdgeVerdict]) -> str:
    return json.dumps({"group": G.name, "order": G.order, "edges": [e.to_json() for e in report]}, indent=2)


def skeleton_dot(PG: SubgroupPoset, report: List[EdgeVerdict]) -> str:
    """Hasse diagram of P_G; every comparable pair drawn with its verdict."""
    lines = [f'digraph "P_{PG.group.name}" {{', "  rankdir=BT;"]
    for c in PG.classes:
        lines.append(f'  "{c.name}" [label="{c.name}\\n|W|={c.weyl_order}"];')
    covers = set(PG.poset.covers)
    for e in report:
        style = "solid" if e.verdict == "PossiblyNonzero" else "dashed"
        color = "black" if e.verdict == "PossiblyNonzero" else "gray"
        extra = "" if (e.source, e.target) in covers else ", constraint=false"
        lines.append(
            f'  "{e.source}" -> "{e.target}" [style={style}, color={color}, label="{e.reason or ""}"{extra}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def table_of_marks(PG: SubgroupPoset) -> Dict[Tuple[str, str], int]:
    """m(H, K) = |(G/H)^K| for all classes."""
    return {
        (a.name, b.name): fixed_points(PG, a.representative, b.representative)["size"]
        for a in PG.classes
        for b in PG.classes
    }


# --------------------------------------------------------------------------
# limit shapes for categorical fixed points
# --------------------------------------------------------------------------


def _word(phi: Tuple[str, ...]) -> str:
    if len(phi) == 1:
        return f"Φ^{phi[0]}"
    return "Γ_{" + "<".join(phi) + "}Φ^" + phi[0]


def fixedpoint_shape(PG: SubgroupPoset, H: str) -> Dict[str, object]:
    """The indexing poset of the categorical H-fixed points: chains of P_G
    whose maximum K has (G/H)^K nonempty, labelled by that fixed-point count
    and the functor word Γ_φΦ^{min φ}."""
    Hs = PG[H].representative
    P = PG.poset
    sizes = {K: fixed_points(PG, Hs, PG[K].representative)["size"] for K in P.elements}
    sd = subdivision(P)
    nodes = [phi for phi in sd.elements if sizes[phi[-1]] > 0]
    keep = set(nodes)
    edges = [(a, b) for a, b in sd.covers if a in keep and b in keep]
    return {
        "group": PG.group.name,
        "subgroup": H,
        "nodes": [{"chain": list(phi), "fixedPoints": sizes[phi[-1]], "word": _word(phi)} for phi in nodes],
        "edges": [{"from": list(a), "to": list(b), "class": sd.classify(a, b)} for a, b in edges],
    }


def restriction_shape(PG: SubgroupPoset, K: str, H: str) -> Dict[str, object]:
    """Res^H_K: the inclusion sd(≤K) -> sd(≤H) of indexing posets, with
    precomposition along the projection G/K -> G/H at every node."""
    if not PG.poset.leq(K, H):
        raise NotASubgroup(f"{K} is not subconjugate to {H}")
    small = fixedpoint_shape(PG, K)
    big = fixedpoint_shape(PG, H)
    big_nodes = {tuple(n["chain"]): n for n in big["nodes"]}
    return {
        "group": PG.group.name,
        "from": K,
        "to": H,
        "direction": "contravariant",
        "functor": [
            {
                "chain": n["chain"],
                "image": n["chain"],
                "precompose": f"(G/{K})^{n['chain'][-1]} -> (G/{H})^{n['chain'][-1]}",
                "sizes": [n["fixedPoints"], big_nodes[tuple(n["chain"])]["fixedPoints"]],
            }
            for n in small["nodes"]
            if tuple(n["chain"]) in big_nodes
        ],
    }


def transfer_shape(PG: SubgroupPoset, K: str, H: str) -> Dict[str, object]:
    """Tr^H_K: the same indexing functor with the transfer along G/K -> G/H
    (covariant in the coset spaces)."""
    out = restriction_shape(PG, K, H)
    out["direction"] = "covariant"
    for row in out["functor"]:
        row["transfer"] = row.pop("precompose").replace(" -> ", " => ")
    return out
