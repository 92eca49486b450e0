from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iprkit.core import Matrix, diagonal_sum, schur_matrix, vdw_matrix
from iprkit.families import enumerate_rows, subtracted_matrix, weak_mt
from iprkit.search import (
    Avoidable,
    Coloring,
    Forced,
    ImageCapExceeded,
    ImageInstance,
    Inconclusive,
    deepen,
    default_xmax,
    enumerate_images,
    find_avoiding_coloring,
    find_monochromatic_witness,
    verify_ipr_finite,
)

from oracles import naive_images, some_coloring_avoids

DOUBLING = Matrix.from_rows([[1], [2]])


def value_sets(images):
    return {frozenset(im.values) for im in images}


def minimal_sets(sets):
    return {s for s in sets if not any(t < s for t in sets)}


def test_schur_images():
    everything = value_sets(enumerate_images(schur_matrix(), 5, 5, minimal=False))
    assert {1, 2, 3} in everything and {1, 2} in everything
    minimal = enumerate_images(schur_matrix(), 5, 5)
    assert [im.values for im in minimal] == [(1, 2), (2, 4), (1, 3, 4), (1, 4, 5), (2, 3, 5)]
    assert minimal[0].witness == (1, 1)


def test_rational_images_need_integer_entries():
    A = Matrix.from_rows([["1/2", "1/2"]])
    images = enumerate_images(A, 3, 4, minimal=False)
    assert value_sets(images) == {frozenset({1}), frozenset({2}), frozenset({3})}
    for im in images:
        assert (im.witness[0] + im.witness[1]) % 2 == 0


def test_vdw_images_are_progressions():
    images = enumerate_images(vdw_matrix(3), 9, 9, minimal=False)
    aps = {frozenset({a, a + d, a + 2 * d}) for a in range(1, 10) for d in range(1, 5) if a + 2 * d <= 9}
    assert value_sets(images) == aps


matrices = st.integers(1, 3).flatmap(
    lambda v: st.lists(st.lists(st.integers(-1, 2), min_size=v, max_size=v), min_size=1, max_size=3)
)


@settings(max_examples=60)
@given(matrices, st.integers(1, 7))
def test_images_match_naive_enumeration(rows, N):
    A = Matrix.from_rows(rows)
    naive = set(naive_images(rows, N, N))
    assert value_sets(enumerate_images(A, N, N, minimal=False)) == naive
    assert value_sets(enumerate_images(A, N, N)) == minimal_sets(naive)
    for im in enumerate_images(A, N, N):
        vals = [sum(a * b for a, b in zip(row, im.witness)) for row in A.rows]
        assert set(vals) == set(im.values)


def test_block_decomposition_matches_naive():
    A = diagonal_sum([schur_matrix(), Matrix.from_rows([[1, 1]])])
    got = value_sets(enumerate_images(A, 6, 6))
    assert got == minimal_sets(set(naive_images([list(r) for r in A.rows], 6, 6)))


def test_zero_row_has_no_images():
    assert enumerate_images(Matrix.from_rows([[1, 0], [0, 0]]), 10) == []
    assert verify_ipr_finite(Matrix.from_rows([[0]]), 10, 2) == Inconclusive("no-images")


def test_cap():
    with pytest.raises(ImageCapExceeded):
        enumerate_images(vdw_matrix(3), 30, cap=10)
    assert verify_ipr_finite(vdw_matrix(3), 30, 2, cap=10) == Inconclusive("cap-exceeded")


def test_default_xmax():
    assert default_xmax(schur_matrix(), 7) == 7
    assert default_xmax(Matrix.from_rows([["1/2", "1/2"]]), 3) == 6


def test_avoiding_coloring_examples():
    images = enumerate_images(schur_matrix(), 4, 4)
    col = find_avoiding_coloring(images, 4, 2)
    assert col.classes() == [[1, 4], [2, 3]]
    assert col.avoids(images)
    assert find_avoiding_coloring(enumerate_images(schur_matrix(), 5, 5), 5, 2) is None
    free = find_avoiding_coloring([], 6, 3)
    assert free is not None and free.N == 6


def test_singleton_image_forces():
    assert find_avoiding_coloring([ImageInstance((3,), (3,))], 5, 2) is None
    assert isinstance(verify_ipr_finite(Matrix.from_rows([[1]]), 3, 2), Forced)


def test_images_outside_range_rejected():
    with pytest.raises(ValueError):
        find_avoiding_coloring([(1, 9)], 5, 2)


@settings(max_examples=40)
@given(st.lists(st.lists(st.integers(1, 10), min_size=2, max_size=3, unique=True), max_size=12), st.integers(6, 10))
def test_search_complete_against_all_colorings(sets, N):
    sets = [s for s in sets if max(s) <= N]
    col = find_avoiding_coloring(sets, N, 2)
    brute = some_coloring_avoids(sets, N, 2)
    assert (col is None) == (brute is None)
    if col is not None:
        assert all(len({col(n) for n in s}) > 1 for s in sets)


@pytest.mark.parametrize(
    "rows",
    [
        [[1, 0], [0, 1], [1, 1]],
        [[1, 0], [1, 1], [1, 2]],
        [[1], [2]],
        [[1], [3]],
        [[1, 0], [1, 2]],
        [[2, 1], [1, 1]],
        [[1, 1], [1, 2], [2, 1]],
    ],
)
def test_verdicts_match_brute_force_up_to_12(rows):
    A = Matrix.from_rows(rows)
    for N in range(1, 13):
        verdict = verify_ipr_finite(A, N, 2, N)
        naive = naive_images(rows, N, N)
        if not naive:
            assert verdict == Inconclusive("no-images")
            continue
        brute = some_coloring_avoids(naive, N, 2)
        assert isinstance(verdict, Forced) == (brute is None), (rows, N)
        if isinstance(verdict, Avoidable):
            # soundness against a fresh, unpruned enumeration
            col = verdict.coloring
            assert not any(col.is_monochromatic(s) for s in naive)


def test_verify_examples():
    assert isinstance(verify_ipr_finite(schur_matrix(), 5, 2, 5), Forced)
    v = verify_ipr_finite(vdw_matrix(3), 8, 2, 8)
    assert isinstance(v, Avoidable)
    col = v.coloring
    assert not any(
        col(a) == col(a + d) == col(a + 2 * d) for a in range(1, 9) for d in range(1, 4) if a + 2 * d <= 8
    )
    v = verify_ipr_finite(DOUBLING, 20, 2, 20)
    assert isinstance(v, Avoidable)
    assert all(v.coloring(n) != v.coloring(2 * n) for n in range(1, 11))


def test_monotone_in_N():
    for A, first, r in [(schur_matrix(), 5, 2), (vdw_matrix(3), 9, 2), (schur_matrix(), 14, 3)]:
        for N in range(first, first + 4):
            assert isinstance(verify_ipr_finite(A, N, r), Forced)


def test_deepen():
    run = deepen(schur_matrix(), 2, start=1, max_N=10)
    assert run.forced_at == 5
    assert [k for _, k in run.history] == ["inconclusive", "avoidable", "avoidable", "avoidable", "forced"]
    run = deepen(DOUBLING, 2, start=2, max_N=12)
    assert run.forced_at is None and isinstance(run.verdict, Avoidable)


def test_witness():
    for assignment in product(range(2), repeat=5):
        col = Coloring(5, 2, assignment)
        found = find_monochromatic_witness(schur_matrix(), col, 5)
        assert found is not None
        (x, y), color = found
        assert col(x) == col(y) == col(x + y) == color
    assert find_monochromatic_witness(schur_matrix(), Coloring(4, 2, (0, 1, 1, 0)), 4) is None
    assert find_monochromatic_witness(Matrix.from_rows([[1]]), Coloring(3, 2, (1, 0, 0))) == ((1,), 1)


def test_coloring_validation_and_text():
    with pytest.raises(ValueError):
        Coloring(3, 2, (0, 1))
    with pytest.raises(ValueError):
        Coloring(2, 2, (0, 2))
    col = Coloring(4, 2, (0, 1, 1, 0))
    assert Coloring.from_text(col.to_text()) == col


def test_threads_give_same_coloring():
    images = enumerate_images(schur_matrix(), 13, 13)
    single = find_avoiding_coloring(images, 13, 3)
    assert find_avoiding_coloring(images, 13, 3, threads=2) == single
    assert find_avoiding_coloring(enumerate_images(schur_matrix(), 14, 14), 14, 3, threads=2) is None


def test_joint_threshold_for_m_subtracted_collection():
    M = enumerate_rows(weak_mt((1, 2)), 3).matrix
    collection = [subtracted_matrix(schur_matrix(), M), subtracted_matrix(vdw_matrix(3), M)]
    joint = deepen(diagonal_sum(collection), 2, max_N=20)
    assert joint.forced_at == 8
    for A in collection:
        assert isinstance(verify_ipr_finite(A, joint.forced_at, 2), Forced)
