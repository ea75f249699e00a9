import random

import pytest
from hypothesis import given, settings, strategies as st

from beilinson.dircat import FIXTURE_NAMES, fixture
from beilinson.errors import InputError, InvariantViolation
from beilinson.exactlin import ChainComplex, Field, GradedSpace, Matrix, cohomology
from beilinson.modcat import (
    hom_groups, projective, random_module, simple, twist,
)
from beilinson.specseq import (
    FilteredComplex, e1_identification, edge_is_surjective, edge_map, filtered_hom,
    grid_totals, morse_e1_grid, spectral_sequence,
)
from oracles import complex_cohomology_dims

fixture_st = st.sampled_from(FIXTURE_NAMES)
field_st = st.sampled_from([Field.prime(5), Field.rational()])


def _pool(A):
    m = A.m
    mods = [simple(A, j) for j in range(1, m + 1)] + [projective(A, k) for k in range(1, m + 1)]
    mods.append(twist(projective(A, 1), projective(A, m)))
    return mods


def test_filtration_must_be_closed():
    F = Field.prime(5)
    C = ChainComplex(F, GradedSpace(("u", "v"), (0, 1)), Matrix(F, 2, 2, [{1: 1}, {}]))
    with pytest.raises(InvariantViolation):
        FilteredComplex(C, (2, 1), 1, 2)
    with pytest.raises(InputError):
        FilteredComplex(C, (1,), 1, 1)


def test_one_step_filtration_degenerates_immediately():
    F = Field.prime(5)
    C = ChainComplex(F, GradedSpace(("u", "v", "w"), (0, 1, 1)), Matrix(F, 3, 3, [{1: 1}, {}, {}]))
    run = spectral_sequence(FilteredComplex(C, (1, 1, 1), 1, 1))
    assert run.pages[1] == {(1, 0): 1}
    assert run.stable_from == 1 and run.converged


def test_filtration_levels_examples():
    A = fixture("A2")
    Fc, H = filtered_hom(simple(A, 2), simple(A, 1))
    assert set(Fc.levels) == {2}
    P2 = projective(A, 2)
    Fc, H = filtered_hom(P2, P2)
    deepest = [H.slots[i] for i, l in enumerate(Fc.levels) if l == 2]
    # slots landing in Y_1: the action on a and the identity component at Y_1
    assert sorted(s[0] for s in deepest) == [(1,), (1, 2)]
    sub = Fc.graded_piece(2)
    assert cohomology(sub).dims == {}
    for name in FIXTURE_NAMES:
        B = fixture(name)
        Fc, _ = filtered_hom(projective(B, B.m), projective(B, B.m))
        assert max(Fc.levels) <= B.m and min(Fc.levels) >= 1


@given(fixture_st, st.integers(0, 2**32))
@settings(max_examples=15, deadline=None)
def test_simple_target_has_single_filtration_step(name, seed):
    A = fixture(name)
    rng = random.Random(seed)
    j = rng.randint(1, A.m)
    Fc, _ = filtered_hom(random_module(A, rng), simple(A, j))
    assert set(Fc.levels) <= {A.m + 1 - j}


def test_s2_s1_sequence():
    A = fixture("A2")
    Fc, _ = filtered_hom(simple(A, 2), simple(A, 1))
    run = spectral_sequence(Fc)
    assert run.pages[1] == {(2, -1): 1}
    assert run.einf_totals() == {1: 1} == hom_groups(simple(A, 2), simple(A, 1))
    assert run.converged
    assert e1_identification(simple(A, 2), simple(A, 1)).grid() == {(2, -1): 1}


def test_p2_s2_totals():
    A = fixture("A2")
    Fc, _ = filtered_hom(projective(A, 2), simple(A, 2))
    run = spectral_sequence(Fc)
    assert run.einf_totals() == hom_groups(projective(A, 2), simple(A, 2)) == {0: 1}


@given(fixture_st, field_st, st.integers(0, 2**32))
@settings(max_examples=25, deadline=None)
def test_convergence_against_dense_oracle(name, F, seed):
    rng = random.Random(seed)
    A = fixture(name, F)
    M0, M1 = random_module(A, rng), random_module(A, rng)
    Fc, H = filtered_hom(M0, M1)
    run = spectral_sequence(Fc)
    assert run.converged
    assert run.einf_totals() == complex_cohomology_dims(F.p, list(H.degrees), H.d.cols)
    # E_1 dims from the graded pieces, independently
    for p in range(1, A.m + 1):
        idx = [i for i, l in enumerate(Fc.levels) if l == p]
        pos = {i: k for k, i in enumerate(idx)}
        cols = [{pos[r]: c for r, c in H.d.cols[i].items() if r in pos} for i in idx]
        got = {t: d for (q, k), d in run.pages[1].items() if q == p for t in [q + k]}
        want = complex_cohomology_dims(F.p, [H.degrees[i] for i in idx], cols)
        assert got == want
    # columns outside 1..m are empty
    assert all(1 <= j <= A.m for r in run.pages for (j, _) in run.pages[r])


@given(fixture_st, st.integers(0, 2**32))
@settings(max_examples=20, deadline=None)
def test_e1_identification_random(name, seed):
    rng = random.Random(seed)
    A = fixture(name)
    ident = e1_identification(random_module(A, rng), random_module(A, rng))
    assert ident.matches


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_e1_for_projective_targets(name):
    A = fixture(name)
    m = A.m
    for k in range(1, m + 1):
        Pk = projective(A, k)
        for M0 in _pool(A):
            ident = e1_identification(M0, Pk)
            for col in ident.columns:
                i = m + 1 - col.j
                assert col.module_dims == Pk.cohomology(i).dims
                assert col.simple_dims == hom_groups(M0, simple(A, i))
                assert col.raw == col.predicted


def test_a4mu3_has_a_higher_differential():
    A = fixture("A4mu3")
    found = False
    for M0 in _pool(A):
        for M1 in _pool(A):
            run = spectral_sequence(filtered_hom(M0, M1)[0])
            assert run.converged
            if any(r >= 2 for r in run.nontrivial_differentials()):
                found = True
    assert found


def test_edge_examples():
    A = fixture("A2")
    P1, S2 = projective(A, 1), simple(A, 2)
    e = edge_map(P1, P1)
    assert e.agrees_with_product and edge_is_surjective(e)
    assert {g: M.rank() for g, M in e.cohomology_map.items() if M.ncols} == {0: 1}
    e = edge_map(S2, P1)
    assert e.agrees_with_product and edge_is_surjective(e)
    assert hom_groups(S2, P1) == {1: 1}
    e = edge_map(S2, S2)
    assert all(M.is_zero() for M in e.cohomology_map.values())


@given(fixture_st, st.integers(0, 2**32))
@settings(max_examples=20, deadline=None)
def test_edge_agrees_with_composition(name, seed):
    rng = random.Random(seed)
    A = fixture(name)
    res = edge_map(random_module(A, rng), random_module(A, rng))
    assert res.agrees_with_product


def test_morse_grid_sphere():
    for n in range(0, 7):
        g = morse_e1_grid((0, n), n, 0, {n: 1})
        assert set(grid_totals(g)) == ({0, n} if n else {0})
    assert morse_e1_grid((0, 3), 3, 0, {}) == {}


@given(st.lists(st.integers(0, 6), min_size=1, max_size=4), st.integers(0, 3),
       st.dictionaries(st.integers(-3, 9), st.integers(1, 3), max_size=3))
def test_morse_grid_shift(indices, r, column):
    n = 6
    g0 = morse_e1_grid(indices, n, r, column)
    g1 = morse_e1_grid(indices, n, r + 1, column)
    assert g1 == {(j + 1, k - 1): d for (j, k), d in g0.items()}


def test_morse_grid_rejects_bad_indices():
    with pytest.raises(InputError):
        morse_e1_grid((0, 4), 3, 0, {3: 1})
    with pytest.raises(InputError):
        morse_e1_grid((), 3, 0, {3: 1})
