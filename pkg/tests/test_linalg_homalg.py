import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import d_squared_zero, dense_homology, dense_rank
from stratcalc.homalg import (
    ChainComplex,
    ChainMap,
    ComplexError,
    FieldMismatch,
    Matrix,
    ShapeMismatch,
    cone,
    direct_sum,
    fib,
    hom_complex,
    homology_basis,
    shift,
    tensor,
)
from stratcalc.linalg import QQ, Field, FieldError, kernel_basis, rank_of, solve

FIELDS = [QQ, Field(2), Field(3)]
field_st = st.sampled_from(FIELDS)


def random_matrix(field, rows, cols, rng, density=0.6):
    vals = [0, 1, -1, 2] if field.p != 2 else [0, 1]
    data = [[rng.choice(vals) if rng.random() < density else 0 for _ in range(cols)] for _ in range(rows)]
    return Matrix.from_rows(field, data, ncols=cols)


def build_complex(field, dims, seed):
    """A complex with random differentials: d_{n+1} maps into ker d_n."""
    rng = random.Random(seed)
    degrees = sorted(dims)
    d = {}
    for n in degrees[1:]:
        lower = d.get(n - 1)
        cols = dims[n]
        if lower is None:
            d[n] = random_matrix(field, dims[n - 1], cols, rng)
            continue
        ker = kernel_basis(field, lower.columns)
        columns = []
        for _ in range(cols):
            v = {}
            for z in ker:
                c = rng.choice([0, 1, 2])
                for k, x in z.items():
                    v[k] = field.add(v.get(k, 0), field.mul(c, x))
            columns.append({k: x for k, x in v.items() if x})
        d[n] = Matrix(field, dims[n - 1], cols, columns)
    return ChainComplex.from_dims(field, dims, d)


complex_st = st.builds(
    build_complex,
    field_st,
    st.fixed_dictionaries({0: st.integers(0, 4), 1: st.integers(0, 4), 2: st.integers(0, 4)}),
    st.integers(0, 10_000),
)


# ---------------------------------------------------------------- fields and elimination


def test_field_parse_and_errors():
    assert Field.parse("Q") == QQ
    assert Field.parse("Fp:5") == Field(5)
    assert Field.parse("F2") == Field(2)
    with pytest.raises(FieldError):
        Field(4)
    with pytest.raises(FieldError):
        Field.parse("R")


def test_exact_rational_arithmetic():
    v = {0: Fraction(1, 3)}
    assert rank_of(QQ, [v, {0: Fraction(2, 3)}]) == 1
    assert QQ.scalar("-3/4") == Fraction(-3, 4)


@given(field_st, st.integers(1, 5), st.integers(1, 5), st.integers(0, 10_000))
def test_rank_matches_dense_elimination(field, rows, cols, seed):
    m = random_matrix(field, rows, cols, random.Random(seed))
    assert m.rank() == dense_rank(m.to_rows(), field.p)


@given(field_st, st.integers(1, 5), st.integers(1, 6), st.integers(0, 10_000))
def test_kernel_basis_spans_the_kernel(field, rows, cols, seed):
    m = random_matrix(field, rows, cols, random.Random(seed))
    ker = kernel_basis(field, m.columns)
    assert len(ker) == cols - dense_rank(m.to_rows(), field.p)
    for z in ker:
        assert m.apply(z) == {}


@given(field_st, st.integers(1, 4), st.integers(1, 4), st.integers(0, 10_000))
def test_solve_recovers_a_preimage(field, rows, cols, seed):
    rng = random.Random(seed)
    m = random_matrix(field, rows, cols, rng)
    x = {j: rng.choice([1, 2]) % (field.p or 3) for j in range(cols)}
    x = {k: v for k, v in x.items() if v}
    b = m.apply(x)
    y = solve(field, m.columns, b)
    assert y is not None and m.apply(y) == b
    if field == QQ and rank_of(field, m.columns) == rows:
        return
    # something outside the column space has no preimage
    for i in range(rows):
        e = {i: 1}
        if dense_rank(m.to_rows(), field.p) == dense_rank([r + [1 if k == i else 0] for k, r in enumerate(m.to_rows())], field.p):
            continue
        assert solve(field, m.columns, e) is None


# ---------------------------------------------------------------- complexes


@given(complex_st)
def test_homology_matches_dense_oracle(C):
    assert d_squared_zero(C)
    assert dict(C.homology().items()) == dense_homology(C)
    assert C.homology().euler == C.euler


def test_sphere_and_disk():
    assert ChainComplex.sphere(QQ, 3, copies=2).homology() == {3: 2}
    assert ChainComplex.disk(Field(3), 1).is_acyclic()
    assert ChainComplex.zero().homology().is_zero


def test_d_squared_nonzero_is_rejected():
    one = Matrix.identity(QQ, 1)
    with pytest.raises(ComplexError):
        ChainComplex.from_dims(QQ, {0: 1, 1: 1, 2: 1}, {1: one, 2: one})


def test_shape_mismatch_is_rejected():
    with pytest.raises(ShapeMismatch):
        ChainComplex.from_dims(QQ, {0: 1, 1: 2}, {1: Matrix.identity(QQ, 1)})


@given(complex_st, st.integers(-3, 3))
def test_shift_moves_homology(C, k):
    assert shift(C, k).homology() == C.homology().shifted(k)


@given(complex_st)
def test_cone_of_identity_is_acyclic(C):
    assert cone(ChainMap.identity(C)).is_acyclic()
    assert fib(ChainMap.identity(C)).is_acyclic()
    assert ChainMap.identity(C).is_quasi_iso()


@given(complex_st)
def test_cone_of_zero_map_is_sum_with_shift(C):
    Z = ChainComplex.zero(C.field)
    f = ChainMap.zero(C, Z)
    assert cone(f).homology() == C.homology().shifted(1)


def _convolve(a, b):
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


@given(field_st, st.integers(0, 10_000), st.integers(0, 10_000))
def test_kunneth_for_tensor_and_hom(field, s1, s2):
    A = build_complex(field, {0: 2, 1: 3, 2: 1}, s1)
    B = build_complex(field, {0: 1, 1: 2, 2: 2}, s2)
    HA, HB = dict(A.homology().items()), dict(B.homology().items())
    assert dict(tensor(A, B).homology().items()) == _convolve(HA, HB)
    dual = {-i: x for i, x in HA.items()}
    assert dict(hom_complex(A, B).homology().items()) == _convolve(dual, HB)


def test_tensor_rejects_mixed_fields():
    with pytest.raises(FieldMismatch):
        tensor(ChainComplex.sphere(QQ, 0), ChainComplex.sphere(Field(2), 0))


@given(complex_st)
def test_direct_sum_adds_homology(C):
    S = direct_sum([C, shift(C, 1)])
    expected = dict(C.homology().items())
    for n, d in C.homology().shifted(1).items():
        expected[n] = expected.get(n, 0) + d
    assert dict(S.homology().items()) == expected


@given(complex_st)
def test_homology_basis_has_the_right_size(C):
    for n in C.dims:
        reps, _ = homology_basis(C, n)
        assert len(reps) == C.homology()[n]


@given(complex_st)
def test_json_round_trip(C):
    D = ChainComplex.from_json(json.loads(C.dumps()))
    assert D.dims == C.dims and D.field == C.field
    assert D.homology() == C.homology()


def test_json_rejects_garbage():
    with pytest.raises(ComplexError):
        ChainComplex.from_json({"field": "Q", "dims": {"0": -1}})
    with pytest.raises(ComplexError):
        ChainComplex.from_json({"field": "Q", "dims": {"0": 1, "1": 1}, "d": {"1": [["1/0"]]}})


def test_chain_map_must_commute():
    C = ChainComplex.disk(QQ, 1)
    D = ChainComplex.from_dims(QQ, {0: 1, 1: 1})
    with pytest.raises(ComplexError):
        ChainMap(C, D, {0: Matrix.identity(QQ, 1)})
