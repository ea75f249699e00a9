import pytest
from hypothesis import given, strategies as st

from beilinson.dircat import FIXTURE_NAMES, fixture
from beilinson.errors import InputError, UnsupportedOperation
from beilinson.modcat import (
    is_zero_object, iso_type_simple, projective, simple, zero_module,
)
from beilinson.mutate import (
    BraidWord, Collection, apply_word, duality_check, half_twist, is_exceptional, iso_certificate,
    mutate, projectives_to_simples,
)


def test_exceptional_examples():
    A = fixture("A2")
    S1, S2, P1, P2 = simple(A, 1), simple(A, 2), projective(A, 1), projective(A, 2)
    assert is_exceptional([S2, S1]).ok
    assert is_exceptional([P1, P2]).ok
    rep = is_exceptional([S1, S2])
    assert not rep.ok and rep.hom[(2, 1)] == {1: 1}


def test_mutation_of_projectives_over_a2():
    A = fixture("A2")
    P1, P2 = projective(A, 1), projective(A, 2)
    out = mutate([P1, P2], 1)
    assert iso_type_simple(out[0]) == 2 and out[1] is P1
    assert apply_word([P1, P2], BraidWord(2, (1,)))[0].mu == out[0].mu
    assert list(apply_word([P1, P2], BraidWord(2, ()))) == [P1, P2]


def test_mutation_with_zero_object():
    A = fixture("A2")
    M = projective(A, 2)
    out = mutate([M, zero_module(A)], 1)
    assert is_zero_object(out[0]) and out[1] is M


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_mutation_preserves_exceptionality(name):
    A = fixture(name)
    coll = Collection([projective(A, k) for k in range(1, A.m + 1)])
    assert is_exceptional(coll).ok
    for i in range(1, A.m):
        assert is_exceptional(mutate(coll, i)).ok


def test_half_twist_words():
    assert str(half_twist(2)) == "s1"
    assert half_twist(3).letters == (2, 1, 2)
    assert str(half_twist(3)) == "s2 s1 s2"
    assert len(half_twist(4).letters) == 6


@given(st.integers(1, 12))
def test_half_twist_length(m):
    w = half_twist(m)
    assert len(w.letters) == m * (m - 1) // 2
    assert all(1 <= l < m for l in w.letters)


def test_braid_word_parsing():
    w = BraidWord.parse(3, "s2 s1 s2")
    assert w.letters == (2, 1, 2)
    with pytest.raises(InputError):
        BraidWord.parse(3, "s2 x s1")
    A = fixture("triangular(3)")
    coll = [projective(A, k) for k in range(1, 4)]
    with pytest.raises(UnsupportedOperation):
        apply_word(coll, BraidWord.parse(3, "s1^-1"))
    with pytest.raises(InputError):
        apply_word(coll, BraidWord(2, (1,)))
    with pytest.raises(InputError):
        mutate(coll, 3)


def test_braid_relation_up_to_isomorphism():
    A = fixture("triangular(3)")
    coll = [projective(A, k) for k in range(1, 4)]
    a = apply_word(coll, BraidWord(3, (1, 2, 1)))
    b = apply_word(coll, BraidWord(3, (2, 1, 2)))
    assert [iso_certificate(M) for M in a] == [iso_certificate(M) for M in b]


def test_duality_examples():
    A = fixture("A2")
    P = [projective(A, 1), projective(A, 2)]
    S = [simple(A, 2), simple(A, 1)]
    assert duality_check(P, S).ok
    assert not duality_check(P, P).ok
    assert not duality_check(P, [simple(A, 2), zero_module(A)]).ok


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_projectives_to_simples(name):
    A = fixture(name)
    rep = projectives_to_simples(A)
    assert rep.ok, rep.problems
    assert rep.iso_types == list(range(A.m, 0, -1))
    for (k, j), h in rep.duality.table.items():
        assert h == ({0: 1} if k == j else {})


def test_braid_relation_with_explicit_isomorphisms():
    from beilinson.modcat import find_isomorphism, invert
    A = fixture("triangular(3)")
    coll = [projective(A, k) for k in range(1, 4)]
    a = apply_word(coll, BraidWord(3, (1, 2, 1)))
    b = apply_word(coll, BraidWord(3, (2, 1, 2)))
    for x, y in zip(a, b):
        phi = find_isomorphism(x, y)
        assert phi is not None
        assert invert(phi).verify(phi)
