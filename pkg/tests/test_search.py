from fractions import Fraction
from itertools import product
import io
import random

import pytest

from kalton_gap.family import (MATRIX_FKN, MATRIX_SECOND, CandidateMatrix, instantiate_matrix,
                               matrix_exactly_one_additive, matrix_is_one_additive)
from kalton_gap.projection import chebyshev_distance
from kalton_gap.search import (SearchConfig, canonical_sign, default_grid, enumerate_candidates,
                               matrix_distance, read_csv, report, run_search, write_csv)
from oracles import scipy_distance

SMALL = tuple(Fraction(x) for x in (-1, 0, 1))


def test_default_grid():
    g = default_grid()
    assert len(g) == 13 and g[0] == -3 and g[-1] == 3 and Fraction(1, 2) in g


@pytest.mark.parametrize("predicate", ["lemma", "exact"])
def test_pruned_enumeration_matches_naive_loop(predicate):
    cfg = SearchConfig(grid=SMALL, predicate=predicate)
    accept = ((lambda A: matrix_is_one_additive(A)[0]) if predicate == "lemma"
              else (lambda A: matrix_exactly_one_additive(A, 4)))
    naive = [A for A in (CandidateMatrix.from_free(v) for v in product(SMALL, repeat=8)) if accept(A)]
    assert list(enumerate_candidates(cfg)) == naive


def test_pruned_enumeration_on_half_grid_sample():
    # default grid, restricted to prefixes that can be checked naively
    grid = tuple(default_grid())
    rng = random.Random(5)
    got = set(A.entries for A in enumerate_candidates(SearchConfig(grid=grid)))
    for _ in range(3000):
        A = CandidateMatrix.from_free([rng.choice(grid) for _ in range(8)])
        assert (A.entries in got) == matrix_is_one_additive(A)[0]


def test_canonical_sign():
    assert canonical_sign(MATRIX_FKN) == MATRIX_FKN
    assert canonical_sign(-MATRIX_FKN) == MATRIX_FKN
    z = CandidateMatrix.from_free([0] * 8)
    assert canonical_sign(z) == z


def test_distance_is_sign_invariant_and_oracle_pinned():
    for A in (MATRIX_FKN, MATRIX_SECOND):
        d = matrix_distance(A, 4).optimum
        assert matrix_distance(-A, 4).optimum == d
        f = instantiate_matrix(A, 4)
        assert abs(scipy_distance(f.values, 8) - float(d)) < 1e-7
    assert matrix_distance(MATRIX_FKN, 4).optimum == Fraction(13, 11)
    assert matrix_distance(MATRIX_SECOND, 4).optimum == Fraction(47, 37)


def test_small_search_pipeline():
    cfg = SearchConfig(grid=SMALL, threshold=Fraction(1, 2))
    res = run_search(cfg)
    assert res.total_nonzero == res.total_enumerated - 1
    assert res.total_after_sign_dedup * 2 == res.total_nonzero
    assert [r.distance for r in res.ranked] == sorted((r.distance for r in res.ranked), reverse=True)
    assert all(r.distance >= Fraction(1, 2) for r in res.survivors)
    # one percent sample re-solved on the dense set function
    rng = random.Random(2)
    for r in rng.sample(res.ranked, max(1, len(res.ranked) // 100)):
        assert chebyshev_distance(instantiate_matrix(r.matrix, 4)).optimum == r.distance
    text = report(res, top=3)
    assert "survivors:" in text and "named fkn" in text

    buf = io.StringIO()
    write_csv(res, buf)
    buf.seek(0)
    rows = read_csv(buf)
    assert [(A, d) for A, d, _ in rows] == [(r.matrix, r.distance) for r in res.ranked]
    assert sum(s for _, _, s in rows) == len(res.survivors)


def test_parallel_matches_serial():
    cfg = SearchConfig(grid=SMALL, predicate="exact")
    a = run_search(cfg)
    b = run_search(SearchConfig(grid=SMALL, predicate="exact", workers=2))
    assert [(r.matrix, r.distance) for r in a.ranked] == [(r.matrix, r.distance) for r in b.ranked]


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(grid=(Fraction(0), Fraction(1)))
    with pytest.raises(ValueError):
        SearchConfig(predicate="other")
    with pytest.raises(TypeError):
        SearchConfig(grid=(0.5, -0.5))
