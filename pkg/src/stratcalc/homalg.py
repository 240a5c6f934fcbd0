"""Bounded chain complexes over exact fields.

Conventions: homological grading, differentials of degree -1, and ``shift``
raises degrees (``shift(C, 1)_n = C_{n-1}`` with negated differential).
Every complex carries a tuple of hashable basis labels per degree; they are
plain integers unless the constructor supplies combinatorial names, and they
let maps between complexes be written down cell by cell.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .linalg import Echelon, Field, QQ, axpy, kernel_basis, rank_of, scale

DIM_CAP = 512


class ComplexError(ValueError):
    """Malformed complex or map (shape mismatch, d∘d ≠ 0, non-chain map)."""


class ShapeMismatch(ComplexError):
    pass


class FieldMismatch(ComplexError):
    pass


# --------------------------------------------------------------------------
# sparse matrices
# --------------------------------------------------------------------------


class Matrix:
    """A ``rows × cols`` matrix stored column by column as sparse dicts."""

    __slots__ = ("field", "rows", "cols", "columns")

    def __init__(self, field: Field, rows: int, cols: int, columns: Optional[Sequence[dict]] = None):
        self.field = field
        self.rows = rows
        self.cols = cols
        if columns is None:
            columns = [{} for _ in range(cols)]
        if len(columns) != cols:
            raise ShapeMismatch(f"expected {cols} columns, got {len(columns)}")
        self.columns = tuple(columns)

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, n, n, [{i: 1} for i in range(n)])

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], ncols: Optional[int] = None) -> "Matrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        columns = [{} for _ in range(ncols)]
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ShapeMismatch("ragged matrix")
            for j, x in enumerate(row):
                v = field.scalar(x)
                if v:
                    columns[j][i] = v
        return cls(field, nrows, ncols, columns)

    def to_rows(self) -> List[List]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def entry(self, i: int, j: int):
        return self.columns[j].get(i, 0)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.columns == other.columns

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(sorted(c.items())) for c in self.columns)))

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, nnz={sum(map(len, self.columns))})"

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        f = self.field
        mine = self.columns
        out = []
        for col in other.columns:
            acc: dict = {}
            for k, v in col.items():
                axpy(f, acc, v, mine[k])
            out.append(acc)
        return Matrix(f, self.rows, other.cols, out)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("matrix sizes differ")
        out = []
        for a, b in zip(self.columns, other.columns):
            c = dict(a)
            axpy(self.field, c, 1, b)
            out.append(c)
        return Matrix(self.field, self.rows, self.cols, out)

    def __neg__(self) -> "Matrix":
        return self.scaled(-1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scaled(self, a) -> "Matrix":
        a = self.field.scalar(a)
        return Matrix(self.field, self.rows, self.cols, [scale(self.field, a, c) for c in self.columns])

    def rank(self) -> int:
        return rank_of(self.field, self.columns)

    def transpose_rows(self) -> List[dict]:
        """Rows as sparse dicts keyed by column index."""
        rows: List[dict] = [{} for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                rows[i][j] = v
        return rows

    def apply(self, vec: dict) -> dict:
        acc: dict = {}
        for k, v in vec.items():
            axpy(self.field, acc, v, self.columns[k])
        return acc


# --------------------------------------------------------------------------
# homology profiles
# --------------------------------------------------------------------------


class HomologyProfile(Mapping):
    """Finitely supported degree -> dimension table of homology."""

    def __init__(self, dims: Mapping[int, int]):
        self._dims = {int(k): int(v) for k, v in dims.items() if v}

    def __getitem__(self, n: int) -> int:
        return self._dims.get(n, 0)

    def __iter__(self):
        return iter(sorted(self._dims))

    def __len__(self) -> int:
        return len(self._dims)

    def __eq__(self, other) -> bool:
        if isinstance(other, HomologyProfile):
            return self._dims == other._dims
        if isinstance(other, Mapping):
            return self._dims == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self._dims.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"H{n}={d}" for n, d in sorted(self._dims.items()))
        return f"HomologyProfile({body or '0'})"

    @property
    def is_zero(self) -> bool:
        return not self._dims

    @property
    def euler(self) -> int:
        return sum((-1) ** (n % 2) * d for n, d in self._dims.items())

    @property
    def total(self) -> int:
        return sum(self._dims.values())

    def shifted(self, k: int) -> "HomologyProfile":
        return HomologyProfile({n + k: d for n, d in self._dims.items()})

    def first_difference(self, other: "HomologyProfile") -> Optional[Tuple[int, int, int]]:
        """Lowest degree where the profiles differ, as (degree, mine, theirs)."""
        for n in sorted(set(self._dims) | set(other._dims)):
            if self[n] != other[n]:
                return n, self[n], other[n]
        return None

    def as_dict(self) -> Dict[str, int]:
        return {str(n): d for n, d in sorted(self._dims.items())}


# --------------------------------------------------------------------------
# chain complexes
# --------------------------------------------------------------------------


class ChainComplex:
    """Bounded complex of finite dimensional vector spaces.

    ``basis[n]`` is the tuple of labels of degree ``n`` and ``d[n]`` the
    matrix of ``C_n -> C_{n-1}`` (absent when zero).
    """

    __slots__ = ("field", "basis", "d", "_index", "_homology")

    def __init__(
        self,
        field: Field,
        basis: Mapping[int, Sequence[Hashable]],
        d: Optional[Mapping[int, Matrix]] = None,
        check: bool = True,
    ):
        self.field = field
        self.basis: Dict[int, tuple] = {int(n): tuple(b) for n, b in basis.items() if len(b)}
        self.d: Dict[int, Matrix] = {}
        for n, m in (d or {}).items():
            if m.is_zero():
                continue
            if m.cols != self.dim(n) or m.rows != self.dim(n - 1):
                raise ShapeMismatch(
                    f"d_{n} has shape {m.rows}x{m.cols}, expected {self.dim(n - 1)}x{self.dim(n)}"
                )
            if m.field != field:
                raise FieldMismatch("differential over a different field")
            self.d[int(n)] = m
        self._index: Dict[int, Dict[Hashable, int]] = {}
        self._homology: Optional[HomologyProfile] = None
        if check:
            self.validate()

    # construction helpers ------------------------------------------------
    @classmethod
    def zero(cls, field: Field = QQ) -> "ChainComplex":
        return cls(field, {})

    @classmethod
    def from_dims(cls, field: Field, dims: Mapping[int, int], d: Optional[Mapping[int, Matrix]] = None, check=True):
        return cls(field, {n: tuple(range(k)) for n, k in dims.items()}, d, check=check)

    @classmethod
    def sphere(cls, field: Field, n: int, copies: int = 1) -> "ChainComplex":
        """``copies`` copies of the field placed in degree ``n``."""
        return cls.from_dims(field, {n: copies})

    @classmethod
    def disk(cls, field: Field, n: int) -> "ChainComplex":
        """Acyclic complex k --id--> k in degrees n, n-1."""
        return cls.from_dims(field, {n: 1, n - 1: 1}, {n: Matrix.identity(field, 1)})

    @classmethod
    def from_labels(
        cls,
        field: Field,
        basis: Mapping[int, Sequence[Hashable]],
        boundary: Callable[[int, Hashable], Mapping[Hashable, object]],
        check: bool = True,
    ) -> "ChainComplex":
        """Build a complex from a labelled basis and a boundary rule.

        ``boundary(n, label)`` returns the image of a degree ``n`` label as a
        mapping from degree ``n - 1`` labels to scalars.
        """
        basis = {int(n): tuple(b) for n, b in basis.items() if len(b)}
        index = {n: {lab: i for i, lab in enumerate(b)} for n, b in basis.items()}
        d = {}
        for n, labels in basis.items():
            if n - 1 not in basis:
                continue
            target = index[n - 1]
            cols = []
            nonzero = False
            for lab in labels:
                col = {}
                for lab2, c in boundary(n, lab).items():
                    c = field.scalar(c)
                    if not c:
                        continue
                    try:
                        i = target[lab2]
                    except KeyError:
                        raise ComplexError(f"boundary of {lab!r} hits unknown label {lab2!r}") from None
                    if i in col:
                        c = field.add(col[i], c)
                        if not c:
                            del col[i]
                            continue
                    col[i] = c
                if col:
                    nonzero = True
                cols.append(col)
            if nonzero:
                d[n] = Matrix(field, len(basis[n - 1]), len(labels), cols)
        out = cls(field, basis, d, check=check)
        out._index = index
        return out

    # basic data ---------------------------------------------------------------
    def dim(self, n: int) -> int:
        return len(self.basis.get(n, ()))

    @property
    def dims(self) -> Dict[int, int]:
        return {n: len(b) for n, b in sorted(self.basis.items())}

    @property
    def degrees(self) -> List[int]:
        return sorted(self.basis)

    @property
    def lo(self) -> Optional[int]:
        return min(self.basis) if self.basis else None

    @property
    def hi(self) -> Optional[int]:
        return max(self.basis) if self.basis else None

    @property
    def total_dim(self) -> int:
        return sum(len(b) for b in self.basis.values())

    def is_zero(self) -> bool:
        return not self.basis

    def index(self, n: int) -> Dict[Hashable, int]:
        idx = self._index.get(n)
        if idx is None:
            idx = {lab: i for i, lab in enumerate(self.basis.get(n, ()))}
            self._index[n] = idx
        return idx

    def diff(self, n: int) -> Matrix:
        m = self.d.get(n)
        if m is None:
            return Matrix.zero(self.field, self.dim(n - 1), self.dim(n))
        return m

    def boundary_of(self, n: int, label: Hashable) -> Dict[Hashable, object]:
        """Image of a basis label under d, keyed by labels."""
        m = self.d.get(n)
        if m is None:
            return {}
        col = m.columns[self.index(n)[label]]
        labels = self.basis[n - 1]
        return {labels[i]: v for i, v in col.items()}

    def validate(self) -> None:
        for n, m in self.d.items():
            below = self.d.get(n - 1)
            if below is not None and not (below @ m).is_zero():
                raise ComplexError(f"d_{n - 1} d_{n} != 0")

    @property
    def euler(self) -> int:
        return sum((-1) ** (n % 2) * len(b) for n, b in self.basis.items())

    def homology(self) -> HomologyProfile:
        if self._homology is None:
            ranks = {n: m.rank() for n, m in self.d.items()}
            dims = {}
            for n, b in self.basis.items():
                h = len(b) - ranks.get(n, 0) - ranks.get(n + 1, 0)
                if h:
                    dims[n] = h
            self._homology = HomologyProfile(dims)
        return self._homology

    def is_acyclic(self) -> bool:
        return self.homology().is_zero

    def __repr__(self) -> str:
        return f"ChainComplex({self.field}, dims={self.dims})"

    def same_as(self, other: "ChainComplex") -> bool:
        """Equality of dimensions and differential matrices (labels ignored)."""
        if self.dims != other.dims or self.field != other.field:
            return False
        return all(self.diff(n) == other.diff(n) for n in set(self.d) | set(other.d))

    def relabel(self, fn: Callable[[int, Hashable], Hashable]) -> "ChainComplex":
        basis = {n: tuple(fn(n, lab) for lab in b) for n, b in self.basis.items()}
        return ChainComplex(self.field, basis, self.d, check=False)

    def plain(self) -> "ChainComplex":
        return ChainComplex(self.field, {n: tuple(range(len(b))) for n, b in self.basis.items()}, self.d, check=False)

    # sub/quotient complexes spanned by labels -----------------------------------
    def quotient_by_labels(self, drop: Iterable[Tuple[int, Hashable]]) -> "ChainComplex":
        """Quotient by the span of the given (degree, label) cells.

        The caller guarantees that the span is a subcomplex.
        """
        dropped = set(drop)
        return self._keep(lambda n, lab: (n, lab) not in dropped)

    def sub_by_labels(self, keep: Callable[[int, Hashable], bool]) -> "ChainComplex":
        """Subcomplex spanned by the cells accepted by ``keep``.

        Raises if the span is not closed under d.
        """
        sub = self._keep(keep)
        for n, labels in sub.basis.items():
            full = self.d.get(n)
            if full is None:
                continue
            idx = self.index(n)
            lower = self.basis.get(n - 1, ())
            for lab in labels:
                for i in full.columns[idx[lab]]:
                    if not keep(n - 1, lower[i]):
                        raise ComplexError(f"cell {lab!r} has boundary outside the subcomplex")
        return sub

    def _keep(self, keep) -> "ChainComplex":
        basis = {n: tuple(lab for lab in b if keep(n, lab)) for n, b in self.basis.items()}
        positions = {n: [i for i, lab in enumerate(b) if keep(n, lab)] for n, b in self.basis.items()}
        d = {}
        for n, m in self.d.items():
            rows = positions.get(n - 1, [])
            newrow = {old: new for new, old in enumerate(rows)}
            cols = []
            for j in positions.get(n, []):
                col = {newrow[i]: v for i, v in m.columns[j].items() if i in newrow}
                cols.append(col)
            if cols and rows:
                d[n] = Matrix(self.field, len(rows), len(cols), cols)
        return ChainComplex(self.field, basis, d, check=True)

    # JSON ---------------------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "field": self.field.tag,
            "dims": {str(n): len(b) for n, b in sorted(self.basis.items())},
            "d": {
                str(n): [[str(x) for x in row] for row in m.to_rows()]
                for n, m in sorted(self.d.items())
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ChainComplex":
        try:
            field = Field.parse(str(data.get("field", "Q")))
            dims = {int(n): int(k) for n, k in data.get("dims", {}).items()}
        except (TypeError, ValueError) as exc:
            raise ComplexError(f"bad complex header: {exc}") from exc
        for n, k in dims.items():
            if k < 0:
                raise ComplexError(f"negative dimension in degree {n}")
            if k > DIM_CAP:
                raise ComplexError(f"dimension {k} in degree {n} exceeds the cap {DIM_CAP}")
        d = {}
        for n, rows in data.get("d", {}).items():
            n = int(n)
            try:
                d[n] = Matrix.from_rows(field, rows, ncols=dims.get(n, 0)) if rows else Matrix.zero(
                    field, dims.get(n - 1, 0), dims.get(n, 0)
                )
            except (ValueError, ZeroDivisionError) as exc:
                raise ComplexError(f"bad differential d_{n}: {exc}") from exc
            if d[n].rows != dims.get(n - 1, 0):
                raise ShapeMismatch(f"d_{n} has {d[n].rows} rows, expected {dims.get(n - 1, 0)}")
        return cls.from_dims(field, dims, d)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# --------------------------------------------------------------------------
# chain maps
# --------------------------------------------------------------------------


class ChainMap:
    """Degree-preserving map of complexes commuting with the differentials."""

    __slots__ = ("source", "target", "components", "_quasi_iso")

    def __init__(
        self,
        source: ChainComplex,
        target: ChainComplex,
        components: Optional[Mapping[int, Matrix]] = None,
        check: bool = True,
    ):
        if source.field != target.field:
            raise FieldMismatch("chain map between complexes over different fields")
        self.source = source
        self.target = target
        self.components: Dict[int, Matrix] = {}
        for n, m in (components or {}).items():
            if m.is_zero():
                continue
            if m.cols != source.dim(n) or m.rows != target.dim(n):
                raise ShapeMismatch(
                    f"component {n} has shape {m.rows}x{m.cols}, expected {target.dim(n)}x{source.dim(n)}"
                )
            self.components[int(n)] = m
        self._quasi_iso: Optional[bool] = None
        if check:
            self.validate()

    @classmethod
    def zero(cls, source: ChainComplex, target: ChainComplex) -> "ChainMap":
        return cls(source, target, {}, check=False)

    @classmethod
    def identity(cls, C: ChainComplex) -> "ChainMap":
        return cls(C, C, {n: Matrix.identity(C.field, len(b)) for n, b in C.basis.items()}, check=False)

    @classmethod
    def from_labels(
        cls,
        source: ChainComplex,
        target: ChainComplex,
        image: Callable[[int, Hashable], Mapping[Hashable, object]],
        check: bool = True,
    ) -> "ChainMap":
        f = source.field
        comps = {}
        for n, labels in source.basis.items():
            tindex = target.index(n)
            cols = []
            nonzero = False
            for lab in labels:
                col = {}
                for lab2, c in image(n, lab).items():
                    c = f.scalar(c)
                    if not c:
                        continue
                    try:
                        i = tindex[lab2]
                    except KeyError:
                        raise ComplexError(f"image of {lab!r} hits unknown label {lab2!r}") from None
                    c = f.add(col.get(i, 0), c)
                    if c:
                        col[i] = c
                    else:
                        col.pop(i, None)
                nonzero = nonzero or bool(col)
                cols.append(col)
            if nonzero:
                comps[n] = Matrix(f, target.dim(n), len(labels), cols)
        return cls(source, target, comps, check=check)

    def component(self, n: int) -> Matrix:
        m = self.components.get(n)
        if m is None:
            return Matrix.zero(self.source.field, self.target.dim(n), self.source.dim(n))
        return m

    def image_of(self, n: int, label: Hashable) -> Dict[Hashable, object]:
        m = self.components.get(n)
        if m is None:
            return {}
        col = m.columns[self.source.index(n)[label]]
        labels = self.target.basis[n]
        return {labels[i]: v for i, v in col.items()}

    def validate(self) -> None:
        S, T = self.source, self.target
        for n in set(S.basis) | set(T.basis):
            lhs = T.diff(n) @ self.component(n)
            rhs = self.component(n - 1) @ S.diff(n)
            if lhs != rhs:
                raise ComplexError(f"not a chain map: d f != f d in degree {n}")

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Composite ``self ∘ other``."""
        if other.target.dims != self.source.dims:
            raise ShapeMismatch("composable maps required")
        comps = {}
        for n, m in other.components.items():
            mine = self.components.get(n)
            if mine is not None:
                comps[n] = mine @ m
        return ChainMap(other.source, self.target, comps, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        comps = dict(self.components)
        for n, m in other.components.items():
            comps[n] = comps[n] + m if n in comps else m
        return ChainMap(self.source, self.target, comps, check=False)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: -m for n, m in self.components.items()}, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        keys = set(self.components) | set(other.components)
        return all(self.component(n) == other.component(n) for n in keys)

    def __hash__(self):
        return id(self)

    def is_zero(self) -> bool:
        return not self.components

    def is_quasi_iso(self) -> bool:
        if self._quasi_iso is None:
            self._quasi_iso = cone(self).is_acyclic()
        return self._quasi_iso

    def to_json(self) -> dict:
        return {
            "field": self.source.field.tag,
            "components": {
                str(n): [[str(x) for x in row] for row in m.to_rows()] for n, m in sorted(self.components.items())
            },
        }

    @classmethod
    def from_json(cls, data: Mapping, source: ChainComplex, target: ChainComplex) -> "ChainMap":
        f = source.field
        comps = {}
        for n, rows in data.get("components", {}).items():
            n = int(n)
            try:
                comps[n] = Matrix.from_rows(f, rows, ncols=source.dim(n)) if rows else Matrix.zero(
                    f, target.dim(n), source.dim(n)
                )
            except (ValueError, ZeroDivisionError) as exc:
                raise ComplexError(f"bad map component {n}: {exc}") from exc
        return cls(source, target, comps)


# --------------------------------------------------------------------------
# constructions
# --------------------------------------------------------------------------


def homology(C: ChainComplex) -> HomologyProfile:
    return C.homology()


def shift(C: ChainComplex, k: int = 1) -> ChainComplex:
    """``shift(C, k)_n = C_{n-k}``, differential multiplied by (-1)^k."""
    if k == 0:
        return C
    basis = {n + k: b for n, b in C.basis.items()}
    sign = -1 if k % 2 else 1
    d = {n + k: (m if sign == 1 else -m) for n, m in C.d.items()}
    return ChainComplex(C.field, basis, d, check=False)


def shift_map(f: ChainMap, k: int = 1) -> ChainMap:
    if k == 0:
        return f
    S, T = shift(f.source, k), shift(f.target, k)
    return ChainMap(S, T, {n + k: m for n, m in f.components.items()}, check=False)


def cone(f: ChainMap) -> ChainComplex:
    """``cone(f)_n = T_n ⊕ S_{n-1}`` with ``d(t, s) = (dt + f s, -ds)``.

    Labels are ``('t', label)`` and ``('s', label)``.
    """
    S, T = f.source, f.target
    field = S.field
    degrees = set(T.basis) | {n + 1 for n in S.basis}
    basis = {}
    for n in degrees:
        basis[n] = tuple(("t", lab) for lab in T.basis.get(n, ())) + tuple(("s", lab) for lab in S.basis.get(n - 1, ()))
    d = {}
    for n in degrees:
        if n - 1 not in basis:
            continue
        nt, ns = T.dim(n), S.dim(n - 1)
        mt = T.dim(n - 1)
        cols = []
        dT = T.d.get(n)
        for j in range(nt):
            cols.append(dict(dT.columns[j]) if dT is not None else {})
        dS = S.d.get(n - 1)
        fm = f.components.get(n - 1)
        for j in range(ns):
            col = dict(fm.columns[j]) if fm is not None else {}
            if dS is not None:
                for i, v in dS.columns[j].items():
                    col[mt + i] = field.neg(v)
            cols.append(col)
        if any(cols):
            d[n] = Matrix(field, len(basis[n - 1]), nt + ns, cols)
    return ChainComplex(field, basis, d, check=False)


def cofib(f: ChainMap) -> ChainComplex:
    return cone(f)


def fib(f: ChainMap) -> ChainComplex:
    return shift(cone(f), -1)


def cone_inclusion(f: ChainMap) -> ChainMap:
    """Canonical map ``target(f) -> cone(f)``."""
    C = cone(f)
    return ChainMap.from_labels(f.target, C, lambda n, lab: {("t", lab): 1}, check=False)


def cone_projection(f: ChainMap) -> ChainMap:
    """Canonical map ``cone(f) -> shift(source(f), 1)``."""
    C = cone(f)
    S1 = shift(f.source, 1)
    return ChainMap.from_labels(C, S1, lambda n, lab: {lab[1]: 1} if lab[0] == "s" else {}, check=False)


def fib_projection(f: ChainMap) -> ChainMap:
    """Canonical map ``fib(f) -> source(f)``."""
    F = fib(f)
    return ChainMap.from_labels(F, f.source, lambda n, lab: {lab[1]: 1} if lab[0] == "s" else {}, check=False)


def cone_functor(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    """Map ``cone(f) -> cone(g)`` induced by a strictly commuting square.

    ``f: A -> B``, ``g: A' -> B'``, ``a: A -> A'``, ``b: B -> B'`` with
    ``g a = b f``.
    """
    if (g @ a) != (b @ f):
        raise ComplexError("square does not commute")
    C, D = cone(f), cone(g)

    def image(n, lab):
        kind, inner = lab
        if kind == "t":
            return {("t", x): c for x, c in b.image_of(n, inner).items()}
        return {("s", x): c for x, c in a.image_of(n - 1, inner).items()}

    return ChainMap.from_labels(C, D, image, check=False)


def fib_functor(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    return shift_map(cone_functor(f, g, a, b), -1)


def direct_sum(complexes: Sequence[ChainComplex], field: Optional[Field] = None) -> ChainComplex:
    """Degreewise sum; labels become ``(summand index, label)``."""
    if not complexes:
        return ChainComplex.zero(field or QQ)
    field = complexes[0].field
    if any(C.field != field for C in complexes):
        raise FieldMismatch("direct sum over different fields")
    basis: Dict[int, list] = {}
    for i, C in enumerate(complexes):
        for n, b in C.basis.items():
            basis.setdefault(n, []).extend((i, lab) for lab in b)

    def boundary(n, lab):
        i, inner = lab
        return {(i, x): c for x, c in complexes[i].boundary_of(n, inner).items()}

    return ChainComplex.from_labels(field, basis, boundary, check=False)


def direct_sum_maps(maps: Sequence[ChainMap]) -> ChainMap:
    S = direct_sum([m.source for m in maps])
    T = direct_sum([m.target for m in maps])

    def image(n, lab):
        i, inner = lab
        return {(i, x): c for x, c in maps[i].image_of(n, inner).items()}

    return ChainMap.from_labels(S, T, image, check=False)


def tensor(A: ChainComplex, B: ChainComplex) -> ChainComplex:
    """Koszul tensor product; labels are pairs ``(a, b)``."""
    if A.field != B.field:
        raise FieldMismatch("tensor over different fields")
    basis: Dict[int, list] = {}
    deg_a = {}
    for i, la in A.basis.items():
        for j, lb in B.basis.items():
            basis.setdefault(i + j, []).extend((a, b) for a in la for b in lb)
        for a in la:
            deg_a[a] = i
    deg_b = {b: j for j, lb in B.basis.items() for b in lb}

    def boundary(n, lab):
        a, b = lab
        i = deg_a[a]
        out = {}
        for x, c in A.boundary_of(i, a).items():
            out[(x, b)] = c
        sign = -1 if i % 2 else 1
        for y, c in B.boundary_of(n - i, b).items():
            out[(a, y)] = sign * c
        return out

    if len(deg_a) != A.total_dim or len(deg_b) != B.total_dim:
        A = A.relabel(lambda n, lab: (n, lab))
        B = B.relabel(lambda n, lab: (n, lab))
        return tensor(A, B)
    return ChainComplex.from_labels(A.field, basis, boundary, check=False)


def hom_complex(A: ChainComplex, B: ChainComplex) -> ChainComplex:
    """Internal hom: degree n maps raise degree by n, ``D f = d f - (-1)^n f d``.

    Labels are ``(i, a, b)``: the elementary map sending cell ``a`` of
    degree ``i`` to cell ``b`` of degree ``i + n``.
    """
    if A.field != B.field:
        raise FieldMismatch("hom over different fields")
    basis: Dict[int, list] = {}
    for i, la in A.basis.items():
        for j, lb in B.basis.items():
            basis.setdefault(j - i, []).extend((i, a, b) for a in la for b in lb)
    # rows of d_A: for a of degree i, which a' of degree i+1 have d a' ∋ a
    coboundary: Dict[Tuple[int, Hashable], list] = {}
    for n, m in A.d.items():
        upper = A.basis[n]
        lower = A.basis[n - 1]
        for j, col in enumerate(m.columns):
            for r, v in col.items():
                coboundary.setdefault((n - 1, lower[r]), []).append((upper[j], v))

    def boundary(n, lab):
        i, a, b = lab
        out: dict = {}
        for y, c in B.boundary_of(i + n, b).items():
            out[(i, a, y)] = c
        sign = 1 if n % 2 else -1  # -(-1)^n
        for a2, c in coboundary.get((i, a), ()):
            key = (i + 1, a2, b)
            out[key] = out.get(key, 0) + sign * c
        return out

    return ChainComplex.from_labels(A.field, basis, boundary, check=False)


def induced_map_ranks(f: ChainMap) -> Dict[int, int]:
    """Rank of ``H_n(f)`` in every degree (explicit cycle/boundary computation)."""
    out = {}
    S, T = f.source, f.target
    for n in S.basis:
        cycles = kernel_basis(S.field, S.diff(n).columns)
        ech = Echelon(T.field)
        dT = T.d.get(n + 1)
        if dT is not None:
            for col in dT.columns:
                ech.add(col)
        base = ech.rank
        fm = f.component(n)
        for z in cycles:
            ech.add(fm.apply(z))
        r = ech.rank - base
        if r:
            out[n] = r
    return out


def homology_basis(C: ChainComplex, n: int):
    """Cycle representatives of a basis of ``H_n`` and a coordinate function.

    Returns ``(reps, coords)`` where ``reps`` are sparse vectors on the cells
    of degree ``n`` and ``coords(z)`` expresses a cycle in that basis.
    """
    field = C.field
    ech = Echelon(field, track=True)
    dC = C.d.get(n + 1)
    nb = 0
    if dC is not None:
        for col in dC.columns:
            ech.add(col)
            nb += 1
    reps = []
    rep_tags = []
    for z in kernel_basis(field, C.diff(n).columns):
        tag = ech.count
        if ech.add(z):
            reps.append(z)
            rep_tags.append(tag)

    def coords(z: dict) -> dict:
        combo = ech.express(z)
        if combo is None:
            raise ComplexError("vector is not a cycle in the expected span")
        return {k: combo[t] for k, t in enumerate(rep_tags) if combo.get(t)}

    return reps, coords


def euler_characteristic(C: ChainComplex) -> int:
    return C.euler
