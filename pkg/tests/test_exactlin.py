import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from beilinson.errors import FieldParseError, InputError, InvariantViolation
from beilinson.exactlin import (
    ChainComplex, Field, GradedSpace, Matrix, cohomology, induced_map, is_isomorphism,
    is_quasi_isomorphism, kernel_basis, solve_linear,
)
from beilinson.modcat import random_complex
from oracles import complex_cohomology_dims, dense_rank

FIELDS = [Field.prime(3), Field.prime(5), Field.prime(7), Field.rational()]
field_st = st.sampled_from(FIELDS)


def _matrix(F, rng, r, c):
    return Matrix.from_rows(F, [[F.random_element(rng) for _ in range(c)] for _ in range(r)], ncols=c)


def test_char2_requires_opt_in():
    with pytest.raises(InputError):
        Field.prime(2)
    F = Field.prime(2, allow_char2=True)
    assert F.add(1, 1) == 0


def test_non_prime_refused():
    with pytest.raises(InputError):
        Field.prime(9)


def test_parse_rejects_bad_denominator():
    with pytest.raises(FieldParseError):
        Field.prime(5).parse("1/10")
    assert Field.prime(5).parse("1/2") == 3
    assert Field.rational().parse("-6/4") == Fraction(-3, 2)


@given(field_st, st.integers(0, 2**32), st.integers(1, 6), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_rank_matches_dense_oracle(F, seed, r, c):
    rng = random.Random(seed)
    A = _matrix(F, rng, r, c)
    assert A.rank() == dense_rank(F.p, A.to_rows())


@given(field_st, st.integers(0, 2**32), st.integers(1, 6), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_kernel_is_kernel_of_full_dimension(F, seed, r, c):
    rng = random.Random(seed)
    A = _matrix(F, rng, r, c)
    K = A.kernel()
    assert len(K) == c - A.rank()
    for v in K:
        assert not A.apply(v)


@given(field_st, st.integers(0, 2**32), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_solve_recovers_consistent_system(F, seed, n):
    rng = random.Random(seed)
    A = _matrix(F, rng, n, n)
    x = {i: F.random_element(rng) for i in range(n)}
    x = {i: v for i, v in x.items() if v}
    b = A.apply(x)
    y = solve_linear(A, b)
    assert y is not None
    assert A.apply(y) == b


def test_solve_examples():
    F = Field.prime(5)
    I = Matrix.identity(F, 3)
    assert solve_linear(I, {0: 2, 2: 4}) == {0: 2, 2: 4}
    assert solve_linear(Matrix.zero(F, 2, 2), {0: 1}) is None


def test_solve_random_5x5_gf3():
    F = Field.prime(3)
    rng = random.Random(11)
    for _ in range(20):
        A = _matrix(F, rng, 5, 5)
        x = {i: rng.randrange(3) for i in range(5)}
        b = A.apply({i: v for i, v in x.items() if v})
        assert A.apply(solve_linear(A, b)) == b


def test_cohomology_small_examples():
    F = Field.prime(5)
    Z = ChainComplex(F, GradedSpace(("a", "b"), (0, 0)), Matrix.zero(F, 2, 2))
    assert cohomology(Z).dims == {0: 2}
    KK = ChainComplex(F, GradedSpace(("u", "v"), (0, 1)), Matrix(F, 2, 2, [{1: 1}, {}]))
    assert cohomology(KK).dims == {}


def test_bad_differential_rejected():
    F = Field.prime(5)
    with pytest.raises(InvariantViolation):
        ChainComplex(F, GradedSpace(("u", "v"), (0, 0)), Matrix(F, 2, 2, [{1: 1}, {}]))


@given(field_st, st.integers(0, 2**32))
@settings(max_examples=80, deadline=None)
def test_cohomology_matches_dense_oracle(F, seed):
    C = random_complex(F, random.Random(seed), max_dim=4)
    H = cohomology(C)
    assert H.dims == complex_cohomology_dims(F.p, list(C.space.degrees), C.d.cols)
    for g, reps in H.reps.items():
        assert len(reps) == H.dims.get(g, 0)
        for r in reps:
            assert not C.d.apply(r)


@given(field_st, st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_induced_maps_of_identity_zero_and_d(F, seed):
    C = random_complex(F, random.Random(seed), max_dim=3)
    H = cohomology(C)
    n = len(C)
    assert is_isomorphism(induced_map(Matrix.identity(F, n), H, H))
    assert is_quasi_isomorphism(Matrix.identity(F, n), C, C)
    for M in induced_map(Matrix.zero(F, n, n), H, H).values():
        assert M.is_zero()
    # d is a chain map into the shifted complex and vanishes on cohomology
    shifted = ChainComplex(F, GradedSpace(C.space.labels, tuple(g - 1 for g in C.space.degrees)),
                           C.d.scale(F.neg(F.one)))
    for M in induced_map(C.d, H, cohomology(shifted)).values():
        assert M.is_zero()


def test_kernel_basis_respects_index():
    F = Field.rational()
    cols = [{0: 1}, {0: 2}, {1: 1}]
    K = kernel_basis(F, cols, [10, 20, 30])
    assert len(K) == 1 and set(K[0]) <= {10, 20}
