"""Finite posets and the combinatorics indexed over them.

Order relations are stored transitively closed as integer bitmasks, so
comparability is a single bit test.  Elements may be any hashable labels;
loaded posets use strings, derived posets (subdivisions, twisted arrows,
products) use tuples.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from functools import cached_property
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .homalg import ChainComplex
from .linalg import QQ, Field

SD_CAP = 12


class PosetError(ValueError):
    pass


class CycleDetected(PosetError):
    pass


class UnknownLabel(PosetError):
    pass


class ElementNotFound(PosetError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class NotComparable(PosetError):
    pass


class NotMonotone(PosetError):
    pass


class NotDownClosed(PosetError):
    pass


class TooLarge(PosetError):
    pass


def label_text(x) -> str:
    """Human readable rendering of an element label."""
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return "{" + ",".join(label_text(y) for y in x) + "}"
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(label_text(y) for y in x)) + "}"
    return str(x)


class FinitePoset:
    """A finite partially ordered set with a fixed element order."""

    def __init__(self, elements: Sequence[Hashable], up: Sequence[int], name: str = ""):
        self.elements: Tuple[Hashable, ...] = tuple(elements)
        self._pos = {e: i for i, e in enumerate(self.elements)}
        if len(self._pos) != len(self.elements):
            raise PosetError("element labels must be unique")
        self._up = tuple(up)
        self.name = name

    # construction ------------------------------------------------------------
    @classmethod
    def from_relations(cls, elements: Sequence[Hashable], relations: Iterable[Tuple[Hashable, Hashable]], name: str = ""):
        """Smallest order containing the relations ``a <= b``."""
        elements = list(elements)
        pos = {e: i for i, e in enumerate(elements)}
        if len(pos) != len(elements):
            raise PosetError("element labels must be unique")
        n = len(elements)
        up = [1 << i for i in range(n)]
        for a, b in relations:
            if a not in pos:
                raise UnknownLabel(f"unknown element {a!r}")
            if b not in pos:
                raise UnknownLabel(f"unknown element {b!r}")
            up[pos[a]] |= 1 << pos[b]
        # Warshall closure on bitmasks
        for k in range(n):
            bit = 1 << k
            uk = up[k]
            for i in range(n):
                if up[i] & bit:
                    up[i] |= uk
        for i in range(n):
            for j in range(i + 1, n):
                if up[i] >> j & 1 and up[j] >> i & 1:
                    raise CycleDetected(f"{elements[i]!r} and {elements[j]!r} would be identified")
        return cls(elements, up, name)

    @classmethod
    def from_leq(cls, elements: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool], name: str = ""):
        """Poset from an order predicate already known to be a partial order."""
        elements = list(elements)
        up = []
        for a in elements:
            mask = 0
            for j, b in enumerate(elements):
                if a == b or leq(a, b):
                    mask |= 1 << j
            up.append(mask)
        P = cls(elements, up, name)
        return P

    @classmethod
    def chain(cls, n: int) -> "FinitePoset":
        """The totally ordered set [n] = {0 < 1 < ... < n}."""
        els = [str(i) for i in range(n + 1)]
        return cls.from_relations(els, zip(els, els[1:]), name=f"[{n}]")

    @classmethod
    def discrete(cls, elements: Sequence[Hashable]) -> "FinitePoset":
        return cls.from_relations(elements, [], name="discrete")

    @classmethod
    def boolean(cls, n: int) -> "FinitePoset":
        """Subsets of {1..n}; labelled by bit strings."""
        els = ["".join("1" if m >> i & 1 else "0" for i in range(n)) for m in range(1 << n)]
        rel = [(els[a], els[b]) for a in range(1 << n) for b in range(1 << n) if a & b == a and a != b]
        return cls.from_relations(els, rel, name=f"B{n}")

    @classmethod
    def from_json(cls, data: Mapping) -> "FinitePoset":
        try:
            elements = [str(e) for e in data["elements"]]
            relations = [(str(a), str(b)) for a, b in data.get("relations", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise PosetError(f"malformed poset JSON: {exc}") from exc
        return cls.from_relations(elements, relations, name=str(data.get("name", "")))

    def to_json(self) -> dict:
        return {
            "elements": [label_text(e) for e in self.elements],
            "relations": [[label_text(a), label_text(b)] for a, b in self.covers],
        }

    # basic queries ------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._pos

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"FinitePoset{tag}({', '.join(label_text(e) for e in self.elements)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitePoset):
            return NotImplemented
        if set(self.elements) != set(other.elements):
            return False
        return all(self.leq(a, b) == other.leq(a, b) for a in self.elements for b in self.elements)

    def __hash__(self):
        return hash(frozenset(self.elements))

    def index(self, x) -> int:
        try:
            return self._pos[x]
        except KeyError:
            raise ElementNotFound(f"{x!r} is not an element") from None

    def mask(self, xs: Iterable[Hashable]) -> int:
        m = 0
        for x in xs:
            m |= 1 << self.index(x)
        return m

    def unmask(self, m: int) -> List[Hashable]:
        return [e for i, e in enumerate(self.elements) if m >> i & 1]

    def leq(self, a, b) -> bool:
        return bool(self._up[self.index(a)] >> self.index(b) & 1)

    def lt(self, a, b) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a, b) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    @cached_property
    def _down(self) -> Tuple[int, ...]:
        n = len(self.elements)
        down = [0] * n
        for i, u in enumerate(self._up):
            for j in range(n):
                if u >> j & 1:
                    down[j] |= 1 << i
        return tuple(down)

    def up_mask(self, p) -> int:
        return self._up[self.index(p)]

    def down_mask(self, p) -> int:
        return self._down[self.index(p)]

    def up(self, p) -> List[Hashable]:
        """(≥p)"""
        return self.unmask(self.up_mask(p))

    def down(self, p) -> List[Hashable]:
        """(≤p)"""
        return self.unmask(self.down_mask(p))

    def strict_up(self, p) -> List[Hashable]:
        return [q for q in self.up(p) if q != p]

    def strict_down(self, p) -> List[Hashable]:
        return [q for q in self.down(p) if q != p]

    def not_above(self, p) -> List[Hashable]:
        """(≱p): elements q with q ≱ p, a down-closed set."""
        m = self.up_mask(p)
        return [e for i, e in enumerate(self.elements) if not m >> i & 1]

    def not_below(self, p) -> List[Hashable]:
        """(≰p): elements q with q ≰ p, an up-closed set."""
        m = self.down_mask(p)
        return [e for i, e in enumerate(self.elements) if not m >> i & 1]

    def interval(self, p, q) -> List[Hashable]:
        if not self.leq(p, q):
            raise NotComparable(f"{p!r} is not below {q!r}")
        return self.unmask(self.up_mask(p) & self.down_mask(q))

    def open_interval(self, p, q) -> List[Hashable]:
        return [x for x in self.interval(p, q) if x != p and x != q]

    @cached_property
    def covers(self) -> List[Tuple[Hashable, Hashable]]:
        """Hasse edges ``(a, b)`` with ``a ⋖ b``, in element order."""
        out = []
        n = len(self.elements)
        for i in range(n):
            above = self._up[i] & ~(1 << i)
            for j in range(n):
                if not above >> j & 1:
                    continue
                between = above & self._down[j] & ~(1 << j)
                if not between:
                    out.append((self.elements[i], self.elements[j]))
        return out

    @cached_property
    def linear_order(self) -> Tuple[Hashable, ...]:
        """A linear extension, stable with respect to element order."""
        n = len(self.elements)
        placed = 0
        out = []
        while len(out) < n:
            for i in range(n):
                if placed >> i & 1:
                    continue
                if (self._down[i] & ~(1 << i)) & ~placed == 0:
                    out.append(self.elements[i])
                    placed |= 1 << i
                    break
        return tuple(out)

    @cached_property
    def rank_in_linear_order(self) -> Dict[Hashable, int]:
        return {e: i for i, e in enumerate(self.linear_order)}

    def sort(self, xs: Iterable[Hashable]) -> Tuple[Hashable, ...]:
        """Sort elements along the linear extension (chains come out ascending)."""
        r = self.rank_in_linear_order
        return tuple(sorted(xs, key=r.__getitem__))

    def minimal(self, xs: Optional[Iterable[Hashable]] = None) -> List[Hashable]:
        xs = list(self.elements if xs is None else xs)
        m = self.mask(xs)
        return [x for x in xs if not (self.down_mask(x) & m & ~(1 << self.index(x)))]

    def maximal(self, xs: Optional[Iterable[Hashable]] = None) -> List[Hashable]:
        xs = list(self.elements if xs is None else xs)
        m = self.mask(xs)
        return [x for x in xs if not (self.up_mask(x) & m & ~(1 << self.index(x)))]

    def terminal(self, xs: Optional[Iterable[Hashable]] = None) -> Optional[Hashable]:
        xs = list(self.elements if xs is None else xs)
        for x in xs:
            if all(self.leq(y, x) for y in xs):
                return x
        return None

    def initial(self, xs: Optional[Iterable[Hashable]] = None) -> Optional[Hashable]:
        xs = list(self.elements if xs is None else xs)
        for x in xs:
            if all(self.leq(x, y) for y in xs):
                return x
        return None

    # subsets ----------------------------------------------------------------------
    def is_down_closed(self, xs: Iterable[Hashable]) -> bool:
        m = self.mask(xs)
        return all(self._down[i] & ~m == 0 for i in range(len(self)) if m >> i & 1)

    def is_up_closed(self, xs: Iterable[Hashable]) -> bool:
        m = self.mask(xs)
        return all(self._up[i] & ~m == 0 for i in range(len(self)) if m >> i & 1)

    def is_convex(self, xs: Iterable[Hashable]) -> bool:
        m = self.mask(xs)
        n = len(self)
        for i in range(n):
            if not m >> i & 1:
                continue
            for j in range(n):
                if m >> j & 1 and self._up[i] >> j & 1:
                    if (self._up[i] & self._down[j]) & ~m:
                        return False
        return True

    def down_closure(self, xs: Iterable[Hashable]) -> List[Hashable]:
        m = 0
        for x in xs:
            m |= self.down_mask(x)
        return self.unmask(m)

    def up_closure(self, xs: Iterable[Hashable]) -> List[Hashable]:
        m = 0
        for x in xs:
            m |= self.up_mask(x)
        return self.unmask(m)

    def down_sets(self) -> List[Tuple[Hashable, ...]]:
        """All down-closed subsets, each in element order, empty set first."""
        order = self.linear_order
        out: List[int] = []

        def grow(k: int, m: int):
            if k == len(order):
                out.append(m)
                return
            i = self.index(order[k])
            grow(k + 1, m)
            if self._down[i] & ~(1 << i) & ~m == 0:
                grow(k + 1, m | 1 << i)

        grow(0, 0)
        out.sort(key=lambda m: (bin(m).count("1"), [-(m >> i & 1) for i in range(len(self))]))
        return [tuple(self.unmask(m)) for m in out]

    def up_sets(self) -> List[Tuple[Hashable, ...]]:
        full = self.mask(self.elements)
        return [tuple(self.unmask(full & ~self.mask(D))) for D in self.down_sets()]

    def convex_subsets(self) -> List[Tuple[Hashable, ...]]:
        """Nonempty convex subsets."""
        n = len(self)
        if n > 20:
            raise TooLarge("convex subset enumeration is capped at 20 elements")
        out = []
        for m in range(1, 1 << n):
            xs = self.unmask(m)
            if self.is_convex(xs):
                out.append(tuple(xs))
        return out

    def subsets(self) -> dict:
        return {
            "downClosed": self.down_sets(),
            "convex": self.convex_subsets(),
            "covers": self.covers,
            "isDownFinite": True,
        }

    # derived posets -------------------------------------------------------------------
    def subposet(self, xs: Iterable[Hashable], name: str = "") -> "FinitePoset":
        """Full subposet on ``xs`` (kept in this poset's element order)."""
        keep = set(xs)
        for x in keep:
            self.index(x)
        els = [e for e in self.elements if e in keep]
        pos = [self.index(e) for e in els]
        up = []
        for i in pos:
            m = 0
            for k, j in enumerate(pos):
                if self._up[i] >> j & 1:
                    m |= 1 << k
            up.append(m)
        return FinitePoset(els, up, name)

    def opposite(self) -> "FinitePoset":
        return FinitePoset(self.elements, self._down, name=f"{self.name}^op" if self.name else "")

    def product(self, other: "FinitePoset") -> "FinitePoset":
        els = [(a, b) for a in self.elements for b in other.elements]
        return FinitePoset.from_leq(
            els, lambda x, y: self.leq(x[0], y[0]) and other.leq(x[1], y[1]), name=f"{self.name}x{other.name}"
        )

    def chains(self) -> List[Tuple[Hashable, ...]]:
        """All nonempty chains, ascending, ordered by length then position."""
        order = self.linear_order
        rank = self.rank_in_linear_order
        out: List[Tuple[Hashable, ...]] = []
        frontier = [(x,) for x in self.elements]
        while frontier:
            out.extend(frontier)
            nxt = []
            for c in frontier:
                top = c[-1]
                for y in order[rank[top] + 1:]:
                    if self.lt(top, y):
                        nxt.append(c + (y,))
            nxt.sort(key=lambda c: [self.index(x) for x in c])
            frontier = nxt
        return out

    def chains_between(self, lo: Optional[Hashable] = None, hi: Optional[Hashable] = None) -> List[Tuple]:
        return [c for c in self.chains() if (lo is None or c[0] == lo) and (hi is None or c[-1] == hi)]

    def is_isomorphic(self, other: "FinitePoset") -> bool:
        return len(self) == len(other) and canonical_form(self) == canonical_form(other)

    # emitters --------------------------------------------------------------------------
    def to_dot(self, edge_labels: Optional[Mapping[Tuple, str]] = None, name: str = "P") -> str:
        lines = [f"digraph {json.dumps(name)} {{", "  rankdir=BT;"]
        for e in self.elements:
            lines.append(f"  {json.dumps(label_text(e))};")
        for a, b in self.covers:
            extra = ""
            if edge_labels and (a, b) in edge_labels:
                extra = f" [label={json.dumps(edge_labels[(a, b)])}]"
            lines.append(f"  {json.dumps(label_text(a))} -> {json.dumps(label_text(b))}{extra};")
        lines.append("}")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# monotone maps
# --------------------------------------------------------------------------


class MonotoneMap:
    def __init__(self, source: FinitePoset, target: FinitePoset, assignment: Mapping[Hashable, Hashable]):
        self.source = source
        self.target = target
        self.assignment = {}
        for x in source.elements:
            if x not in assignment:
                raise NotMonotone(f"map undefined on {x!r}")
            y = assignment[x]
            target.index(y)
            self.assignment[x] = y
        for a, b in source.covers:
            if not target.leq(self.assignment[a], self.assignment[b]):
                raise NotMonotone(f"{a!r} <= {b!r} but images are not ordered")

    def __call__(self, x):
        return self.assignment[x]

    def fiber(self, q) -> List[Hashable]:
        return [x for x in self.source.elements if self.assignment[x] == q]

    def preimage(self, qs: Iterable[Hashable]) -> List[Hashable]:
        qs = set(qs)
        return [x for x in self.source.elements if self.assignment[x] in qs]

    def is_injective_on_comparables(self) -> bool:
        S = self.source
        return all(self.assignment[a] != self.assignment[b] for a, b in S.covers)

    @classmethod
    def identity(cls, P: FinitePoset) -> "MonotoneMap":
        return cls(P, P, {x: x for x in P.elements})

    @classmethod
    def from_json(cls, data: Mapping, source: FinitePoset, target: Optional[FinitePoset] = None) -> "MonotoneMap":
        if target is None:
            target = FinitePoset.from_json(data["target"]) if "target" in data else None
        try:
            assign = {str(k): str(v) for k, v in data["assignment"].items()}
        except (KeyError, AttributeError) as exc:
            raise PosetError(f"malformed map JSON: {exc}") from exc
        if target is None:
            raise PosetError("map JSON needs a target poset")
        return cls(source, target, assign)

    def to_json(self) -> dict:
        return {
            "target": self.target.to_json(),
            "assignment": {label_text(k): label_text(v) for k, v in self.assignment.items()},
        }


# --------------------------------------------------------------------------
# subdivisions and twisted arrows
# --------------------------------------------------------------------------

ISOMIN = "isomin"
ISOMAX = "isomax"
ISOMINMAX = "isominmax"
GENERIC = "generic"


class Subdivision(FinitePoset):
    """sd(P): nonempty chains of P ordered by inclusion."""

    def __init__(self, base: FinitePoset, chains: Optional[Sequence[Tuple]] = None):
        if len(base) > SD_CAP:
            raise TooLarge(f"subdivision is capped at {SD_CAP} base elements (got {len(base)})")
        self.base = base
        chains = list(base.chains() if chains is None else chains)
        masks = [base.mask(c) for c in chains]
        up = []
        for m in masks:
            u = 0
            for j, m2 in enumerate(masks):
                if m & m2 == m:
                    u |= 1 << j
            up.append(u)
        super().__init__(chains, up, name=f"sd({base.name})" if base.name else "sd")

    def max_of(self, phi) -> Hashable:
        return phi[-1]

    def min_of(self, phi) -> Hashable:
        return phi[0]

    def max_map(self) -> MonotoneMap:
        return MonotoneMap(self, self.base, {c: c[-1] for c in self.elements})

    def min_map(self) -> MonotoneMap:
        """min as a monotone map sd(P)^op -> P."""
        return MonotoneMap(self.opposite(), self.base, {c: c[0] for c in self.elements})

    def classify(self, phi, psi) -> str:
        """Morphism class of an inclusion ``phi ⊆ psi``."""
        if not self.leq(phi, psi):
            raise NotComparable(f"{phi!r} is not contained in {psi!r}")
        same_min = phi[0] == psi[0]
        same_max = phi[-1] == psi[-1]
        if same_min and same_max:
            return ISOMINMAX
        if same_min:
            return ISOMIN
        if same_max:
            return ISOMAX
        return GENERIC

    def classified_covers(self) -> List[Tuple[Tuple, Tuple, str]]:
        return [(a, b, self.classify(a, b)) for a, b in self.covers]

    def is_cocartesian_cover(self, phi, psi) -> bool:
        """Covers adjoining a new maximal element."""
        return len(psi) == len(phi) + 1 and psi[:-1] == phi

    def dim(self, phi) -> int:
        return len(phi) - 1


def subdivision(P: FinitePoset) -> Subdivision:
    return Subdivision(P)


def restricted_subdivision(P: FinitePoset, lo=None, hi=None) -> Subdivision:
    """Chains with prescribed minimum and/or maximum: sd^{|lo}_{|hi}."""
    if lo is not None:
        P.index(lo)
    if hi is not None:
        P.index(hi)
    if lo is not None and hi is not None and not P.leq(lo, hi):
        raise NotComparable(f"{lo!r} is not below {hi!r}")
    return Subdivision(P, P.chains_between(lo, hi))


def isomax_under(P: FinitePoset, phi: Tuple) -> Subdivision:
    """sd(P)_{φ/isomax}: chains containing φ with the same maximum."""
    keep = set(phi)
    for x in phi:
        P.index(x)
    chains = [c for c in P.chains_between(hi=phi[-1]) if keep <= set(c)]
    return Subdivision(P, chains)


class TwistedArrows(FinitePoset):
    """TwAr(P): pairs p <= q with (p,q) <= (p',q') iff p' <= p and q <= q'."""

    def __init__(self, base: FinitePoset):
        self.base = base
        pairs = [(p, q) for p in base.elements for q in base.elements if base.leq(p, q)]
        up = []
        for p, q in pairs:
            m = 0
            for j, (p2, q2) in enumerate(pairs):
                if base.leq(p2, p) and base.leq(q, q2):
                    m |= 1 << j
            up.append(m)
        super().__init__(pairs, up, name=f"TwAr({base.name})" if base.name else "TwAr")

    def localization(self, sd: Optional[Subdivision] = None) -> MonotoneMap:
        sd = sd or Subdivision(self.base)
        return MonotoneMap(sd, self, {c: (c[0], c[-1]) for c in sd.elements})


def twisted_arrows(P: FinitePoset) -> TwistedArrows:
    return TwistedArrows(P)


# --------------------------------------------------------------------------
# Möbius function and interval complexes
# --------------------------------------------------------------------------


def mobius(P: FinitePoset) -> Dict[Tuple[Hashable, Hashable], int]:
    """μ(r, p) for r <= p by the recursion μ(r,p) = -Σ_{r<=s<p} μ(r,s)."""
    mu: Dict[Tuple[Hashable, Hashable], int] = {}
    order = P.linear_order
    for r in order:
        for p in order:
            if not P.leq(r, p):
                continue
            if r == p:
                mu[(r, p)] = 1
            else:
                mu[(r, p)] = -sum(mu[(r, s)] for s in P.interval(r, p) if s != p)
    return mu


def interval_complex(P: FinitePoset, r, p, field: Field = QQ) -> ChainComplex:
    """M^r_p: reduced chains of the open interval (r, p), shifted up by two.

    A chain with k+1 elements sits in degree k+2 and the empty chain in
    degree 1.  For r = p this is the field in degree 0.
    """
    if not P.leq(r, p):
        raise NotComparable(f"{r!r} is not below {p!r}")
    if r == p:
        return ChainComplex(field, {0: ((),)})
    inner = P.subposet(P.open_interval(r, p))
    basis: Dict[int, list] = {1: [()]}
    for c in inner.chains():
        basis.setdefault(len(c) + 1, []).append(c)

    def boundary(n, c):
        if not c:
            return {}
        return {c[:i] + c[i + 1:]: (-1) ** i for i in range(len(c))}

    return ChainComplex.from_labels(field, basis, boundary)


def reduced_euler(C: ChainComplex) -> int:
    return C.euler


# --------------------------------------------------------------------------
# wreath products
# --------------------------------------------------------------------------


class Wreath(FinitePoset):
    """Lexicographic wreath product P ≀ R with its projection to P."""

    def __init__(self, base: FinitePoset, fibers: Mapping[Hashable, FinitePoset]):
        self.base = base
        self.fibers = {p: fibers[p] for p in base.elements}
        els = [(p, r) for p in base.elements for r in self.fibers[p].elements]

        def leq(x, y):
            if x[0] == y[0]:
                return self.fibers[x[0]].leq(x[1], y[1])
            return base.lt(x[0], y[0])

        proto = FinitePoset.from_leq(els, leq)
        super().__init__(proto.elements, proto._up, name=f"{base.name}≀R" if base.name else "wreath")

    def projection(self) -> MonotoneMap:
        return MonotoneMap(self, self.base, {x: x[0] for x in self.elements})


def wreath(P: FinitePoset, fibers: Mapping[Hashable, FinitePoset]) -> Wreath:
    missing = [p for p in P.elements if p not in fibers]
    if missing:
        raise ElementNotFound(f"no refinement given for {missing[0]!r}")
    return Wreath(P, fibers)


# --------------------------------------------------------------------------
# isomorphism classes and the bundled catalog
# --------------------------------------------------------------------------


def canonical_form(P: FinitePoset) -> Tuple[int, ...]:
    """Lexicographically least relation matrix over all relabellings."""
    n = len(P)
    best = None
    up = P._up
    # only consider permutations that are linear extensions (upper-triangular forms)
    for perm in itertools.permutations(range(n)):
        ok = True
        for a in range(n):
            for b in range(a):
                if up[perm[a]] >> perm[b] & 1:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        rows = tuple(sum(1 << b for b in range(n) if up[perm[a]] >> perm[b] & 1) for a in range(n))
        if best is None or rows < best:
            best = rows
    return best or ()


def all_posets(n: int) -> List[FinitePoset]:
    """One representative of every isomorphism class of n-element posets."""
    if n > 6:
        raise TooLarge("exhaustive enumeration is capped at 6 elements")
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    seen = {}
    for bits in range(1 << len(pairs)):
        up = [1 << i for i in range(n)]
        for k, (a, b) in enumerate(pairs):
            if bits >> k & 1:
                up[a] |= 1 << b
        # keep only relation sets that are already transitively closed
        closed = True
        for a in range(n):
            for b in range(n):
                if a != b and up[a] >> b & 1 and up[b] & ~up[a]:
                    closed = False
                    break
            if not closed:
                break
        if not closed:
            continue
        P = FinitePoset([str(i) for i in range(n)], up)
        key = canonical_form(P)
        if key not in seen:
            seen[key] = P
    return [seen[k] for k in sorted(seen)]


_NAMED: Dict[str, Callable[[], FinitePoset]] = {}


def named_poset(name: str) -> FinitePoset:
    """Small posets used throughout examples and tests."""
    if name.startswith("[") and name.endswith("]") and name[1:-1].isdigit():
        return FinitePoset.chain(int(name[1:-1]))
    if name == "B2" or name == "square":
        return FinitePoset.from_relations(["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")], name="B2")
    if name == "B3":
        return FinitePoset.boolean(3)
    if name == "V":
        return FinitePoset.from_relations(["a", "b", "c"], [("a", "c"), ("b", "c")], name="V")
    if name == "Λ":
        return FinitePoset.from_relations(["a", "b", "c"], [("a", "b"), ("a", "c")], name="Λ")
    if name == "pt":
        return FinitePoset.chain(0)
    raise ElementNotFound(f"no named poset {name!r}")


def catalog(max_size: int = 5) -> List[FinitePoset]:
    """Every poset with at most ``max_size`` elements, up to isomorphism."""
    out = []
    for n in range(1, max_size + 1):
        for i, P in enumerate(all_posets(n)):
            P.name = f"P{n}.{i}"
            out.append(P)
    return out


def extended_catalog() -> List[FinitePoset]:
    """The bundled catalog plus a few larger posets (up to 8 elements)."""
    extra = [
        FinitePoset.chain(5),
        FinitePoset.chain(7),
        FinitePoset.boolean(3),
        named_poset("B2").product(FinitePoset.chain(1)),
        FinitePoset.chain(2).product(FinitePoset.chain(1)),
        FinitePoset.from_relations(
            [str(i) for i in range(7)],
            [("0", "1"), ("0", "2"), ("0", "3"), ("1", "4"), ("2", "4"), ("2", "5"), ("3", "5"), ("4", "6"), ("5", "6")],
            name="zigzag7",
        ),
    ]
    extra[3].name = "B2x[1]"
    extra[4].name = "[2]x[1]"
    return catalog(5) + extra


# --------------------------------------------------------------------------
# emitters
# --------------------------------------------------------------------------


def subdivision_json(sd: Subdivision) -> dict:
    return {
        "base": sd.base.to_json(),
        "chains": [[label_text(x) for x in c] for c in sd.elements],
        "covers": [
            {"from": [label_text(x) for x in a], "to": [label_text(x) for x in b], "class": k}
            for a, b, k in sd.classified_covers()
        ],
    }


def twisted_arrows_json(tw: TwistedArrows) -> dict:
    loc = tw.localization()
    return {
        "base": tw.base.to_json(),
        "objects": [[label_text(p), label_text(q)] for p, q in tw.elements],
        "covers": [[[label_text(x) for x in a], [label_text(x) for x in b]] for a, b in tw.covers],
        "localization": [
            {"chain": [label_text(x) for x in c], "arrow": [label_text(loc(c)[0]), label_text(loc(c)[1])]}
            for c in loc.source.elements
        ],
    }


def mobius_csv(P: FinitePoset) -> str:
    mu = mobius(P)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "p", "mu"])
    for r in P.elements:
        for p in P.elements:
            if (r, p) in mu:
                w.writerow([label_text(r), label_text(p), mu[(r, p)]])
    return buf.getvalue()
