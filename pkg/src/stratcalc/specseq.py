"""Spectral sequences of stratification filtrations.

A degree map d from the stratifying poset to the integers turns one of the
four filtrations of F into a bounded tower

    X_s = H(hocolim_{d(i) <= s} fil_i F),     X_{s0-1} = 0,

for an exact functor H (evaluation at an element, the global limit, or a
stratum Φ_p).  Pages come from the exact couple of the tower:

    D = ⊕ H_n(X_s),  E = ⊕ H_n(cofib(X_{s-1} -> X_s)),
    E^r_{s,n} = k^{-1}(im i^{r-1}) / j(ker i^{r-1}),  d^r = j (i^{r-1})^{-1} k,

with d^r: E^r_{s,t} -> E^r_{s-r,t+r-1} (n = s + t).
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field as dc_field
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

from .diagram import Diagram, hocolim, holim, total_cofiber
from .homalg import ChainComplex, ChainMap, HomologyProfile, cone, homology_basis, tensor
from .linalg import Echelon, Field, kernel_basis
from .poset import FinitePoset, MonotoneMap, PosetError, interval_complex, label_text
from .strat.families import Family, Tautological
from .strat.filtration import Filtration, FiltrationKind, filtration

Vector = Dict[int, object]


class NotConservative(PosetError):
    pass


# --------------------------------------------------------------------------
# towers
# --------------------------------------------------------------------------


@dataclass
class Tower:
    """X_{s0} -> ... -> X_{s1}; ``maps[s]`` is X_{s-1} -> X_s (absent for s0)."""

    start: int
    complexes: List[ChainComplex]
    maps: Dict[int, ChainMap] = dc_field(default_factory=dict)

    @property
    def stop(self) -> int:
        return self.start + len(self.complexes) - 1

    def __getitem__(self, s: int) -> ChainComplex:
        if s < self.start:
            return ChainComplex.zero(self.field)
        return self.complexes[min(s, self.stop) - self.start]

    @property
    def field(self) -> Field:
        return self.complexes[0].field

    def map(self, s: int) -> ChainMap:
        """X_{s-1} -> X_s, the zero map out of 0 at the bottom."""
        if s <= self.start:
            return ChainMap.zero(ChainComplex.zero(self.field), self[self.start] if s == self.start else self[s])
        if s > self.stop:
            return ChainMap.identity(self[self.stop])
        return self.maps[s]

    def validate(self) -> None:
        for C in self.complexes:
            C.validate()
        for f in self.maps.values():
            f.validate()

    @classmethod
    def from_sequence(cls, complexes: Sequence[ChainComplex], maps: Sequence[ChainMap], start: int = 0) -> "Tower":
        if len(maps) != len(complexes) - 1:
            raise ValueError("a tower of k complexes needs k - 1 maps")
        return cls(start, list(complexes), {start + i + 1: f for i, f in enumerate(maps)})

    def is_nested(self) -> bool:
        """True when every X_{s-1} is a subcomplex of X_s on the same labels."""
        for s, f in self.maps.items():
            A, B = f.source, f.target
            for n, labs in A.basis.items():
                idx = B.basis.get(n)
                if idx is None or not set(labs) <= set(idx):
                    return False
            for n, labs in A.basis.items():
                inside = set(labs)
                if _boundaries(A, n) != {k: v for k, v in _boundaries(B, n).items() if k in inside}:
                    return False
        return True

    def reduced(self) -> "Tower":
        """A smaller nested tower with the same pages from E^1 on.

        Pairs of cells (b, a) with a unit coefficient of a in d(b) and the
        same filtration level are cancelled by Gaussian elimination.  Both
        cells enter the tower at the same stage, so the result is a filtered
        homotopy equivalent tower.
        """
        top = self.complexes[-1]
        field = top.field
        level: Dict[tuple, int] = {}
        for i, C in enumerate(self.complexes):
            for n, labs in C.basis.items():
                for lab in labs:
                    level.setdefault((n, lab), self.start + i)
        bd: Dict[tuple, Dict[tuple, object]] = {}
        cob: Dict[tuple, set] = {cell: set() for cell in level}
        for n in top.basis:
            for lab, col in _boundaries(top, n).items():
                bd[(n, lab)] = {(n - 1, k): v for k, v in col.items()}
                for k in col:
                    cob[(n - 1, k)].add((n, lab))
        for b in sorted(bd, key=lambda c: c[0]):
            while b in bd:
                cands = [a for a in bd[b] if level[a] == level[b]]
                if not cands:
                    break
                a = min(cands, key=lambda c: len(cob[c]))
                _cancel(field, bd, cob, b, a)
        order = {cell: j for j, cell in enumerate(level)}
        complexes = []
        for i in range(len(self.complexes)):
            s = self.start + i
            basis: Dict[int, List] = {}
            for n, lab in (c for c in bd if level[c] <= s):
                basis.setdefault(n, []).append(lab)
            for n in basis:
                basis[n].sort(key=lambda lab, n=n: order[(n, lab)])
            complexes.append(
                ChainComplex.from_labels(
                    field, basis, lambda n, lab: {k[1]: v for k, v in bd[(n, lab)].items()}, check=False
                )
            )
        maps = {self.start + i: _label_inclusion(complexes[i - 1], complexes[i]) for i in range(1, len(complexes))}
        return Tower(self.start, complexes, maps)


def _boundaries(C: ChainComplex, n: int) -> Dict[Hashable, Dict[Hashable, object]]:
    labs = C.basis.get(n, ())
    below = C.basis.get(n - 1, ())
    m = C.d.get(n)
    if m is None:
        return {lab: {} for lab in labs}
    return {lab: {below[i]: v for i, v in col.items()} for lab, col in zip(labs, m.columns)}


def _cancel(field: Field, bd, cob, b, a) -> None:
    """Eliminate the pair d(b) = u a + ...: every x with a in d(x) gets
    d(x) - (c/u) d(b), then a and b are dropped."""
    u_inv = field.inv(bd[b][a])
    db = bd[b]
    for x in list(cob[a]):
        if x == b:
            continue
        col = bd[x]
        factor = field.neg(field.mul(col[a], u_inv))
        for k, v in db.items():
            w = field.add(col.get(k, 0), field.mul(factor, v))
            if w:
                if k not in col:
                    cob[k].add(x)
                col[k] = w
            elif k in col:
                del col[k]
                cob[k].discard(x)
    for y in cob.pop(b):
        del bd[y][b]
    for k in bd.pop(b):
        cob[k].discard(b)
    for k in bd.pop(a):
        cob[k].discard(a)
    for y in cob.pop(a):
        # only b could still point at a, and it is gone
        raise ArithmeticError(f"cell {y!r} still has {a!r} in its boundary")


def normalize_degrees(P: FinitePoset, d: Union[Mapping, MonotoneMap]) -> Dict[Hashable, int]:
    """Integer degrees per element, from a dict or a monotone map to a chain."""
    if isinstance(d, MonotoneMap):
        order = d.target.linear_order
        return {p: order.index(d.assignment[p]) for p in P.elements}
    out = {}
    for p in P.elements:
        key = p if p in d else label_text(p)
        if key not in d:
            raise PosetError(f"no degree for {label_text(p)}")
        out[p] = int(d[key])
    return out


def conservative_witness(P: FinitePoset, deg: Mapping[Hashable, int]) -> Optional[str]:
    """None when p < q implies d(p) < d(q)."""
    for p in P.elements:
        for q in P.elements:
            if p != q and P.leq(p, q) and not deg[p] < deg[q]:
                return f"d({label_text(p)}) = {deg[p]} is not below d({label_text(q)}) = {deg[q]}"
    return None


def _label_inclusion(A: ChainComplex, B: ChainComplex) -> ChainMap:
    return ChainMap.from_labels(A, B, lambda n, lab: {lab: 1}, check=False)


def _colimit_diagram(fil: Filtration, S: List[Hashable]) -> Diagram:
    """x -> hocolim_{i in S} fil_i(x), as a diagram over the ambient poset."""
    A = fil.family.ambient
    vals = {x: hocolim(fil.at(x), S) for x in A.elements}

    def edge(x, y):
        def image(n, lab):
            c, g = lab
            k = n - len(c) + 1
            return {(c, h): v for h, v in fil.pieces[c[0]].map(x, y).image_of(k, g).items()}

        return ChainMap.from_labels(vals[x], vals[y], image, check=False)

    return Diagram(A, vals, {(x, y): edge(x, y) for x, y in A.covers}, fil.family.field, check=False)


def _apply(H, family: Family, Y: Diagram) -> ChainComplex:
    kind, arg = H
    if kind == "eval":
        return Y[arg]
    if kind == "holim":
        return holim(Y)
    if kind == "stratum":
        if not isinstance(family, Tautological):
            raise TypeError("the stratum functor is implemented for the tautological family")
        return total_cofiber(Y, family.poset.down(arg))
    raise ValueError(f"unknown functor {kind!r}")


def parse_functor(text: Optional[str]) -> Tuple[str, Optional[str]]:
    """'holim', 'eval:<x>' or 'stratum:<p>'."""
    if text is None or text == "holim":
        return ("holim", None)
    kind, _, arg = text.partition(":")
    if kind not in ("eval", "stratum") or not arg:
        raise ValueError(f"functor must be holim, eval:<element> or stratum:<element>, not {text!r}")
    return (kind, arg)


def _resolve(P: FinitePoset, arg):
    if arg is None or arg in P.elements:
        return arg
    for x in P.elements:
        if label_text(x) == str(arg):
            return x
    raise PosetError(f"unknown element {arg!r}")


def tower_from_stratification(
    family: Family,
    F: Diagram,
    d: Union[Mapping, MonotoneMap],
    kind=FiltrationKind.ASC_LEFT,
    H: Tuple[str, Optional[Hashable]] = ("holim", None),
) -> Tower:
    """The tower of d_! fil for the given filtration and exact functor H.

    d is a degree function on the stratifying poset.  Filtrations indexed by
    the opposite poset use -d, so the tower is always increasing.
    """
    kind = FiltrationKind.parse(kind) if isinstance(kind, str) else kind
    P = family.poset
    deg = normalize_degrees(P, d)
    w = conservative_witness(P, deg)
    if w:
        raise NotConservative(w)
    H = (H[0], _resolve(family.ambient if H[0] == "eval" else P, H[1]))
    fil = filtration(family, kind, F)
    if fil.index is not P:
        deg = {p: -v for p, v in deg.items()}
    lo, hi = min(deg.values()), max(deg.values())
    complexes, maps = [], {}
    for s in range(lo, hi + 1):
        S = [p for p in fil.index.elements if deg[p] <= s]
        X = _apply(H, family, _colimit_diagram(fil, S))
        if complexes:
            maps[s] = _label_inclusion(complexes[-1], X)
        complexes.append(X)
    return Tower(lo, complexes, maps)


# --------------------------------------------------------------------------
# linear algebra on homology
# --------------------------------------------------------------------------


class _Homology:
    """Bases of H_n(C) with coordinates."""

    def __init__(self, C: ChainComplex):
        self.C = C
        self._data: Dict[int, tuple] = {}

    def _get(self, n: int):
        if n not in self._data:
            if n in self.C.basis and self.C.homology()[n]:
                self._data[n] = homology_basis(self.C, n)
            else:
                self._data[n] = ([], lambda z: {})
        return self._data[n]

    def dim(self, n: int) -> int:
        return self.C.homology()[n]

    def reps(self, n: int) -> List[Vector]:
        return self._get(n)[0]

    def coords(self, n: int, z: Vector) -> Vector:
        return self._get(n)[1](z) if z else {}


def _induced(f: ChainMap, src: _Homology, tgt: _Homology, n: int, m: Optional[int] = None) -> List[Vector]:
    """Columns of H_n(source) -> H_m(target) for a map of degree m - n."""
    m = n if m is None else m
    comp = f.component(n) if n in f.source.basis else None
    cols = []
    for z in src.reps(n):
        cols.append(tgt.coords(m, comp.apply(z)) if comp is not None else {})
    return cols


def _apply_cols(field: Field, cols: List[Vector], v: Vector) -> Vector:
    out: Vector = {}
    for j, a in v.items():
        for i, b in cols[j].items():
            w = field.add(out.get(i, 0), field.mul(a, b))
            if w:
                out[i] = w
            else:
                out.pop(i, None)
    return out


def _compose(field: Field, g: List[Vector], f: List[Vector]) -> List[Vector]:
    return [_apply_cols(field, g, c) for c in f]


def _span(field: Field, vectors) -> List[Vector]:
    ech = Echelon(field)
    out = []
    for v in vectors:
        if v and ech.add(v):
            out.append(v)
    return out


def _preimage(field: Field, A: List[Vector], U: List[Vector]) -> List[Vector]:
    """Basis of {x : A x in span U}; x keyed by the columns of A."""
    m = len(A)
    cols = list(A) + [{k: field.neg(v) for k, v in u.items()} for u in U]
    out = []
    for k in kernel_basis(field, cols):
        x = {j: v for j, v in k.items() if j < m}
        if x:
            out.append(x)
    return _span(field, out)


def _kernel(field: Field, A: List[Vector]) -> List[Vector]:
    return kernel_basis(field, A)


# --------------------------------------------------------------------------
# pages
# --------------------------------------------------------------------------


@dataclass
class Page:
    """E^r with entries (s, t) -> dimension and d^r as column lists."""

    r: int
    entries: Dict[Tuple[int, int], int]
    differentials: Dict[Tuple[int, int], List[Vector]]  # source (s, t) -> columns in target coordinates
    field: Optional[Field] = None

    def dim(self, s: int, t: int) -> int:
        return self.entries.get((s, t), 0)

    def total(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for (s, t), k in self.entries.items():
            if k:
                out[s + t] = out.get(s + t, 0) + k
        return out

    def nonzero(self) -> Dict[Tuple[int, int], int]:
        return {k: v for k, v in self.entries.items() if v}

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "entries": [{"s": s, "t": t, "dim": k} for (s, t), k in sorted(self.entries.items()) if k],
            "differentials": [
                {"from": [s, t], "to": [s - self.r, t + self.r - 1], "rank": self.rank(s, t)}
                for (s, t), cols in sorted(self.differentials.items())
                if any(cols)
            ],
        }

    def rank(self, s: int, t: int) -> int:
        return len(_span(self.field, self.differentials.get((s, t), [])))

    def chart(self) -> str:
        """Plain-text grid: columns s, rows t (top row largest t)."""
        nz = self.nonzero()
        if not nz:
            return f"E^{self.r}: zero\n"
        ss = [s for s, _ in nz]
        ts = [t for _, t in nz]
        s_rng = range(min(ss), max(ss) + 1)
        t_rng = range(max(ts), min(ts) - 1, -1)
        width = max(3, max(len(str(s)) for s in s_rng) + 1)
        lines = [f"E^{self.r}"]
        for t in t_rng:
            row = "".join(f"{(str(nz.get((s, t), '.'))):>{width}}" for s in s_rng)
            lines.append(f"{t:>4} |{row}")
        lines.append("     +" + "-" * (width * len(s_rng)))
        lines.append("      " + "".join(f"{s:>{width}}" for s in s_rng))
        return "\n".join(lines) + "\n"


def _memo(method):
    """Per-instance cache for the exact-couple maps, which every page reuses."""

    @functools.wraps(method)
    def call(self, *args):
        key = (method.__name__,) + args
        if key not in self._memo:
            self._memo[key] = method(self, *args)
        return self._memo[key]

    return call


class SpectralSequence:
    """Pages of a tower computed from its exact couple.

    Nested towers (subcomplex inclusions, as produced from a stratification)
    are first shrunk by filtered cancellation unless ``reduce`` is False;
    this leaves every page from E^1 on unchanged.
    """

    def __init__(self, tower: Tower, reduce: bool = True):
        if reduce and tower.maps and tower.is_nested():
            tower = tower.reduced()
        self.tower = tower
        self.field = tower.field
        T = tower
        self.s0, self.s1 = T.start, T.stop
        self.H = {s: _Homology(T[s]) for s in range(self.s0, self.s1 + 1)}
        self.cones = {s: cone(T.map(s)) for s in range(self.s0, self.s1 + 1)}
        self.HE = {s: _Homology(C) for s, C in self.cones.items()}
        degs = set()
        for s in range(self.s0, self.s1 + 1):
            degs.update(self.cones[s].basis)
            degs.update(T[s].basis)
        self.degrees = sorted(degs) if degs else [0]
        self._pages: Dict[int, Page] = {}
        self._quot: Dict[int, Dict[Tuple[int, int], tuple]] = {}
        self._memo: Dict[tuple, object] = {}

    # the exact couple ---------------------------------------------------------
    def dim_D(self, s: int, n: int) -> int:
        if s < self.s0:
            return 0
        return self.H[min(s, self.s1)].dim(n)

    @_memo
    def i_power(self, a: int, b: int, n: int) -> List[Vector]:
        """H_n(X_a) -> H_n(X_b) for a <= b, as columns."""
        if a < self.s0:
            return []
        a2, b2 = min(a, self.s1), min(b, self.s1)
        cols = [{k: 1} for k in range(self.H[a2].dim(n))]
        for s in range(a2 + 1, b2 + 1):
            step = _induced(self.tower.maps[s], self.H[s - 1], self.H[s], n)
            cols = _compose(self.field, step, cols)
        return cols

    @_memo
    def j(self, s: int, n: int) -> List[Vector]:
        C = self.cones[s]
        inc = ChainMap.from_labels(self.tower[s], C, lambda m, lab: {("t", lab): 1}, check=False)
        return _induced(inc, self.H[s], self.HE[s], n)

    @_memo
    def k(self, s: int, n: int) -> List[Vector]:
        """H_n(cofib_s) -> H_{n-1}(X_{s-1})."""
        if s - 1 < self.s0:
            return [{} for _ in range(self.HE[s].dim(n))]
        C = self.cones[s]
        src = self.tower[s - 1]
        tgt = self.H[s - 1]
        cols = []
        if n not in C.basis:
            return []
        idx = C.basis[n]
        pos = src.index(n - 1) if (n - 1) in src.basis else {}
        for z in self.HE[s].reps(n):
            y: Vector = {}
            for i, v in z.items():
                kind, lab = idx[i]
                if kind == "s":
                    y[pos[lab]] = v
            cols.append(tgt.coords(n - 1, y))
        return cols

    # derived pages ------------------------------------------------------------
    def _subquotient(self, r: int, s: int, n: int):
        """(Z basis, B basis, complement basis Q, echelon for quotient coords)."""
        f = self.field
        dimE = self.HE[s].dim(n)
        k = self.k(s, n)
        if r == 1:
            Z = [{i: 1} for i in range(dimE)]
        elif s - r < self.s0:
            Z = _span(f, _kernel(f, k))
        else:
            Z = _preimage(f, k, _span(f, self.i_power(s - r, s - 1, n - 1)))
        ker = _kernel(f, self.i_power(s, s + r - 1, n)) if r > 1 else []
        jcols = self.j(s, n)
        B = _span(f, [_apply_cols(f, jcols, v) for v in ker])
        ech = Echelon(f, track=True)
        for b in B:
            ech.add(b)
        nb = ech.count
        Q = []
        for z in Z:
            if ech.add(z):
                Q.append(z)
        return Z, B, Q, ech, nb

    def _quotient_coords(self, r: int, s: int, n: int, v: Vector) -> Vector:
        Z, B, Q, ech, nb = self._quot[r][(s, n)]
        combo = ech.express(v)
        if combo is None:
            raise ArithmeticError("vector outside the cycles of the page")
        return {t - nb: a for t, a in combo.items() if t >= nb and a}

    def page(self, r: int) -> Page:
        if r in self._pages:
            return self._pages[r]
        f = self.field
        data = {}
        for s in range(self.s0, self.s1 + 1):
            for n in self.degrees:
                data[(s, n)] = self._subquotient(r, s, n)
        self._quot[r] = data
        entries = {(s, n - s): len(d[2]) for (s, n), d in data.items()}
        diffs: Dict[Tuple[int, int], List[Vector]] = {}
        for (s, n), (Z, B, Q, ech, nb) in data.items():
            if not Q or s - r < self.s0:
                continue
            k = self.k(s, n)
            ip = self.i_power(s - r, s - 1, n - 1)
            jt = self.j(s - r, n - 1)
            cols = []
            for q in Q:
                target = _apply_cols(f, k, q)
                y = _solve(f, ip, target)
                if y is None:
                    raise ArithmeticError("cycle outside the image of the tower maps")
                e = _apply_cols(f, jt, y)
                cols.append(self._quotient_coords(r, s - r, n - 1, e) if (s - r, n - 1) in data else {})
            diffs[(s, n - s)] = cols
        P = Page(r, entries, diffs, f)
        self._pages[r] = P
        return P

    @property
    def stable_page(self) -> int:
        return self.s1 - self.s0 + 2

    def pages(self, upto: Optional[int] = None) -> List[Page]:
        last = self.stable_page if upto is None else upto
        return [self.page(r) for r in range(1, last + 1)]

    def e_infinity(self) -> Page:
        return self.page(self.stable_page)

    # checks -------------------------------------------------------------------
    def differential_square_witness(self, r: int) -> Optional[str]:
        P = self.page(r)
        f = self.field
        for (s, t), cols in P.differentials.items():
            nxt = P.differentials.get((s - r, t + r - 1))
            if not nxt:
                continue
            for c in cols:
                if _apply_cols(f, nxt, c):
                    return f"d^{r} d^{r} != 0 at ({s}, {t})"
        return None

    def next_page_witness(self, r: int) -> Optional[str]:
        """dim E^{r+1} equals the homology of (E^r, d^r) entrywise."""
        P, Nx = self.page(r), self.page(r + 1)
        f = self.field
        for (s, t), dim in P.entries.items():
            out = P.differentials.get((s, t), [])
            rank_out = len(_span(f, out))
            incoming = P.differentials.get((s + r, t - r + 1), [])
            rank_in = len(_span(f, incoming))
            h = dim - rank_out - rank_in
            if h != Nx.dim(s, t):
                return f"E^{r + 1}_({s},{t}) has dimension {Nx.dim(s, t)}, homology of E^{r} gives {h}"
        return None

    def convergence_witness(self) -> Optional[str]:
        E = self.e_infinity()
        tot = E.total()
        top = self.tower[self.s1].homology()
        for n in set(tot) | set(top):
            if tot.get(n, 0) != top[n]:
                return f"Σ dim E^∞ in total degree {n} is {tot.get(n, 0)} but H_{n} of the abutment is {top[n]}"
        return None

    def all_checks(self) -> Tuple[bool, Optional[str]]:
        for r in range(1, self.stable_page + 1):
            w = self.differential_square_witness(r) or self.next_page_witness(r)
            if w:
                return False, w
        w = self.convergence_witness()
        return (w is None), w


def _solve(field: Field, cols: List[Vector], target: Vector) -> Optional[Vector]:
    if not target:
        return {}
    ech = Echelon(field, track=True)
    for c in cols:
        ech.add(c)
    return ech.express(target)


def e1_page(tower: Tower) -> Page:
    return SpectralSequence(tower).page(1)


def e_infinity(tower: Tower) -> Page:
    return SpectralSequence(tower).e_infinity()


def convergence_check(tower: Tower) -> bool:
    return SpectralSequence(tower).convergence_witness() is None


# --------------------------------------------------------------------------
# the Möbius stratification
# --------------------------------------------------------------------------


def mobius_e1_expected(family: Tautological, F: Diagram, d, p) -> Dict[Tuple[int, int], int]:
    """⊕_{r <= p, -d(r) = s} H_{s+t}(M^r_p ⊗ F(r))."""
    P = family.poset
    deg = normalize_degrees(P, d)
    out: Dict[Tuple[int, int], int] = {}
    for r in P.down(p):
        s = -deg[r]
        h = tensor(interval_complex(P, r, p, family.field), F[r]).homology()
        for n, k in h.items():
            if k:
                out[(s, n - s)] = out.get((s, n - s), 0) + k
    return out


def mobius_e1_check(family: Tautological, F: Diagram, d, p) -> Tuple[bool, Optional[str]]:
    """E¹ of fil^R through the stratum Φ_p against the Möbius-weighted formula."""
    T = tower_from_stratification(family, F, d, FiltrationKind.ASC_RIGHT, ("stratum", p))
    got = e1_page(T).nonzero()
    exp = mobius_e1_expected(family, F, d, p)
    if got != exp:
        return False, f"E¹ at {label_text(p)}: {sorted(got.items())} vs expected {sorted(exp.items())}"
    return True, None


def pages_json(ss: SpectralSequence, pages: Optional[List[Page]] = None) -> str:
    pages = pages or ss.pages()
    return json.dumps(
        {
            "range": [ss.s0, ss.s1],
            "pages": [P.to_json() for P in pages],
            "abutment": ss.tower[ss.s1].homology().as_dict(),
        },
        indent=2,
        sort_keys=True,
    )
