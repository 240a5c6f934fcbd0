"""Exact scalar fields and sparse linear algebra over them.

Vectors are plain ``dict`` objects mapping an index to a nonzero scalar.
Scalars are Python ``int``/``Fraction`` over Q and reduced ``int`` residues
over F_p, so every computation is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Vector = Dict[Hashable, object]


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class Field:
    """Q when ``p == 0``, otherwise the prime field F_p."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0 and not _is_prime(self.p):
            raise FieldError(f"{self.p} is not prime")

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    @property
    def tag(self) -> str:
        return "Q" if self.p == 0 else f"Fp:{self.p}"

    def __str__(self) -> str:
        return "Q" if self.p == 0 else f"F{self.p}"

    @classmethod
    def parse(cls, text: str) -> "Field":
        t = text.strip()
        if t in ("Q", "QQ", "RationalsExact"):
            return cls(0)
        for prefix in ("Fp:", "F", "GF"):
            if t.startswith(prefix) and t[len(prefix):].isdigit():
                return cls(int(t[len(prefix):]))
        raise FieldError(f"unrecognised field {text!r}")

    # scalar handling -------------------------------------------------
    def scalar(self, x) -> object:
        """Coerce ``x`` (int, Fraction, or string such as ``"-3/4"``)."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.p == 0:
            if isinstance(x, Fraction):
                return int(x) if x.denominator == 1 else x
            return int(x)
        if isinstance(x, Fraction):
            num, den = x.numerator % self.p, x.denominator % self.p
            if den == 0:
                raise FieldError(f"{x} has no image in F_{self.p}")
            return num * pow(den, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, x):
        if self.p == 0:
            r = Fraction(1) / x
            return int(r) if r.denominator == 1 else r
        return pow(x, -1, self.p)

    def mul(self, a, b):
        if self.p == 0:
            r = a * b
            if type(r) is Fraction and r.denominator == 1:
                return int(r)
            return r
        return a * b % self.p

    def add(self, a, b):
        if self.p == 0:
            r = a + b
            if type(r) is Fraction and r.denominator == 1:
                return int(r)
            return r
        return (a + b) % self.p

    def neg(self, a):
        return -a if self.p == 0 else (-a) % self.p

    def format(self, x) -> str:
        return str(x)


QQ = Field(0)


def axpy(field: Field, y: Vector, a, x: Vector) -> None:
    """In place ``y += a * x`` dropping zeros."""
    p = field.p
    if p:
        for k, v in x.items():
            w = (y.get(k, 0) + a * v) % p
            if w:
                y[k] = w
            else:
                y.pop(k, None)
    else:
        for k, v in x.items():
            w = y.get(k, 0) + a * v
            if w:
                if type(w) is Fraction and w.denominator == 1:
                    w = int(w)
                y[k] = w
            else:
                y.pop(k, None)


def scale(field: Field, a, x: Vector) -> Vector:
    if not a:
        return {}
    p = field.p
    if p:
        return {k: v * a % p for k, v in x.items()}
    out = {}
    for k, v in x.items():
        w = v * a
        if type(w) is Fraction and w.denominator == 1:
            w = int(w)
        out[k] = w
    return out


class Echelon:
    """Incremental echelon basis of a subspace.

    Each stored vector has a pivot (its smallest key under ``order``) with
    coefficient one, and no other stored vector has a nonzero entry there
    below its own pivot.  With ``track=True`` every stored vector also records
    its expression in terms of the vectors that were added.
    """

    def __init__(self, field: Field, order=None, track: bool = False):
        self.field = field
        self.order = order
        self.track = track
        self.pivots: Dict[Hashable, Vector] = {}
        self.combos: Dict[Hashable, Vector] = {}
        self.count = 0

    def _lead(self, v: Vector):
        if self.order is None:
            return min(v)
        return min(v, key=self.order)

    def reduce(self, v: Vector, combo: Optional[Vector] = None):
        """Reduce ``v`` against the basis; returns (residual, combo)."""
        f = self.field
        v = dict(v)
        combo = dict(combo) if combo is not None else ({} if self.track else None)
        stuck: Vector = {}
        while v:
            k = self._lead(v)
            piv = self.pivots.get(k)
            if piv is None:
                stuck[k] = v.pop(k)
                continue
            a = f.neg(v[k])
            axpy(f, v, a, piv)
            if combo is not None:
                axpy(f, combo, a, self.combos[k])
        return stuck, combo

    def add(self, v: Vector) -> bool:
        """Insert ``v``; returns True if it enlarged the span."""
        tag = self.count
        self.count += 1
        combo = {tag: 1} if self.track else None
        res, combo = self.reduce(v, combo)
        if not res:
            return False
        k = self._lead(res)
        a = self.field.inv(res[k])
        res = scale(self.field, a, res)
        self.pivots[k] = res
        if self.track:
            self.combos[k] = scale(self.field, a, combo)
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def contains(self, v: Vector) -> bool:
        res, _ = self.reduce(v)
        return not res

    def express(self, v: Vector) -> Optional[Vector]:
        """Coefficients of ``v`` in the added vectors, or None if outside."""
        if not self.track:
            raise ValueError("express() requires track=True")
        res, combo = self.reduce(v, {})
        if res:
            return None
        return scale(self.field, -1 if self.field.p == 0 else self.field.p - 1, combo)


def rank_of(field: Field, vectors: Iterable[Vector]) -> int:
    """Rank of a family of sparse vectors by Gaussian elimination.

    Vectors are processed sparsest first and each pivot is the smallest key,
    which keeps fill-in low on the boundary matrices of combinatorial
    complexes.
    """
    vecs = [v for v in vectors if v]
    vecs.sort(key=len)
    p = field.p
    pivots: Dict[Hashable, Vector] = {}
    for v in vecs:
        v = dict(v)
        while v:
            k = min(v)
            piv = pivots.get(k)
            if piv is None:
                if p:
                    a = pow(v[k], -1, p)
                    pivots[k] = {kk: vv * a % p for kk, vv in v.items()}
                else:
                    a = v[k]
                    if a != 1:
                        v = scale(field, field.inv(a), v)
                    pivots[k] = v
                break
            axpy(field, v, field.neg(v[k]), piv)
    return len(pivots)


def kernel_basis(field: Field, columns: Sequence[Vector]) -> List[Vector]:
    """Basis of the kernel of the matrix whose i-th column is ``columns[i]``.

    Kernel vectors are keyed by column position.
    """
    ech = Echelon(field, track=True)
    kernel = []
    for i, col in enumerate(columns):
        res, combo = ech.reduce(col, {i: 1})
        if not res:
            kernel.append(combo)
            continue
        k = ech._lead(res)
        a = field.inv(res[k])
        ech.pivots[k] = scale(field, a, res)
        ech.combos[k] = scale(field, a, combo)
    return kernel


def solve(field: Field, columns: Sequence[Vector], target: Vector) -> Optional[Vector]:
    """Some x with sum_i x_i columns[i] == target, or None."""
    ech = Echelon(field, track=True)
    for col in columns:
        ech.add(col)
    return ech.express(target)
