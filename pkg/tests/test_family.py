from fractions import Fraction
import random

import pytest

from kalton_gap.core import BlockStructure, expand
from kalton_gap.family import (MATRIX_FKN, MATRIX_SECOND, PAWLIK_MATRIX, CandidateMatrix,
                               FamilyParams, closed_form_total, closed_form_xj, fkn_value,
                               instantiate_matrix, lower_bound_a, make_fkn, matrix_additivity_defect,
                               matrix_exactly_one_additive, matrix_function, matrix_is_one_additive,
                               two_block_distance)
from kalton_gap.search import SearchConfig, default_grid, enumerate_candidates
from oracles import brute_additivity, brute_additivity_float


def test_params_validation():
    with pytest.raises(ValueError):
        FamilyParams(1, 2)
    with pytest.raises(ValueError):
        FamilyParams(2, 1)
    assert FamilyParams(3, 4).m == 12


def test_fkn_values():
    assert fkn_value((0, 0), 2) == 0
    assert fkn_value((1, 0), 2) == 1
    assert fkn_value((2, 0), 2) == 1
    assert fkn_value((1, 1), 2) == 1
    assert fkn_value((2, 1), 2) == 3
    assert fkn_value((3, 3, 3), 3) == 3
    assert fkn_value((3, 3, 0), 3) == 1


def test_fkn_2_2_full_table():
    f = expand(make_fkn(FamilyParams(2, 2)))
    threes = [a for a in range(16) if f(a) == 3]
    # block 0 = atoms {0,1}, block 1 = atoms {2,3}
    assert threes == [0b0111, 0b1011, 0b1101, 0b1110, 0b1111]
    assert sum(1 for a in range(16) if f(a) == 1) == 10


@pytest.mark.parametrize("k,n", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_fkn_is_one_additive_by_brute_force(k, n):
    f = expand(make_fkn(FamilyParams(k, n)))
    assert brute_additivity(f.values, f.m) == 1


def test_closed_forms():
    assert closed_form_xj(4, 2) == Fraction(16, 11)
    assert closed_form_total(4, 2) == Fraction(32, 11)
    assert lower_bound_a(2, 2) == Fraction(3, 5)
    assert lower_bound_a(10, 10) == Fraction(251, 109)
    assert lower_bound_a(20, 20) == Fraction(1101, 419)
    for k in range(2, 30):
        assert two_block_distance(k) == Fraction(5 * k - 7, 3 * k - 1)
        for n in range(2, 8):
            assert lower_bound_a(k, n) == 3 - Fraction(4 * (k + n - 1), (n + 1) * k - 1)


def test_equalizer_residuals_are_equal():
    # the minimal 3-valued profile (one full block, one atom elsewhere) sits at distance a
    for k, n in [(2, 2), (3, 4), (6, 3)]:
        y = closed_form_xj(k, n) / k
        assert 3 - (k + n - 1) * y == lower_bound_a(k, n)
    assert closed_form_xj(2, 2) - 1 == lower_bound_a(2, 2)


def test_diagonal_bound_increases_below_three():
    vals = [lower_bound_a(k, k) for k in range(2, 60)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 3


def test_candidate_matrix_basics():
    assert MATRIX_FKN[2, 3] == 3 and MATRIX_FKN[1, 1] == 0
    assert MATRIX_FKN.free == (1, 1, 1, 1, 3, 1, 3, 3)
    assert (-MATRIX_FKN)[3, 3] == -3
    with pytest.raises(ValueError):
        CandidateMatrix.from_rows([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert CandidateMatrix.from_free([0] * 8).is_zero()
    assert str(MATRIX_SECOND) == "[0 1 1; 1 1 3; 3 3 3]"


@pytest.mark.parametrize("k", range(2, 7))
def test_matrix_fkn_reproduces_family(k):
    assert instantiate_matrix(MATRIX_FKN, k) == expand(make_fkn(FamilyParams(k, 2)))
    assert matrix_function(MATRIX_FKN, k) == make_fkn(FamilyParams(k, 2))


def test_named_matrices_are_one_additive():
    for A in (MATRIX_FKN, MATRIX_SECOND, PAWLIK_MATRIX):
        assert matrix_exactly_one_additive(A)
        assert brute_additivity(instantiate_matrix(A, 4).values, 8) <= 1
        assert matrix_is_one_additive(A)[0]


LEMMA_COUNTEREXAMPLE = CandidateMatrix.from_rows([[0, 1, 1], [0, 0, 0], [1, -1, 1]])


def test_lemma_counterexample():
    ok, violated = matrix_is_one_additive(LEMMA_COUNTEREXAMPLE)
    assert ok and violated == []
    f = instantiate_matrix(LEMMA_COUNTEREXAMPLE, 4)
    # A = one atom of block 0, B = all of block 1: a12 + a31 - a32 = 3
    assert brute_additivity(f.values, 8) == 3
    assert matrix_additivity_defect(LEMMA_COUNTEREXAMPLE, 4) == 3


def test_class_defect_matches_brute_force_on_sample():
    rng = random.Random(7)
    grid = default_grid()
    for _ in range(40):
        A = CandidateMatrix.from_free([rng.choice(grid) for _ in range(8)])
        for k in (2, 3, 4):
            f = instantiate_matrix(A, k)
            assert float(matrix_additivity_defect(A, k)) == brute_additivity_float(f.values, 2 * k)


def test_violation_labels():
    A = CandidateMatrix.from_free([3, 0, 0, 0, 0, 0, 0, 0])
    ok, violated = matrix_is_one_additive(A)
    assert not ok
    assert violated == ["i", "ii", "v", "vii", "ix"]


def test_condition_list_disagreement_count():
    listed = {A.entries for A in enumerate_candidates(SearchConfig(predicate="lemma"))}
    exact = {A.entries for A in enumerate_candidates(SearchConfig(predicate="exact"))}
    # every truly 1-additive grid matrix satisfies the listed conditions, not conversely
    assert exact <= listed
    assert len(listed) == 52329 and len(exact) == 32799
    assert len(listed - exact) == 19530
    assert LEMMA_COUNTEREXAMPLE.entries in listed - exact
