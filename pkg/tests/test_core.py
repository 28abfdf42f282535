import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from detrep import BallShape, Colligation, DimensionError, MatrixPoint, assemble_Zn, random_colligation, \
    random_point, validate
from detrep.core import col_index, col_triple, iter_words, parse_word, random_scalar_points, row_index, \
    row_triple, zn_batch

shapes = st.lists(st.tuples(st.integers(1, 3), st.integers(1, 3)), min_size=1, max_size=3)


def test_minimal_sizes_ok(disk):
    c = Colligation(disk, (1,), [[0.1]], [[1]], [[1]], [[2]])
    validate(c)
    assert c.alpha == c.beta == 1


def test_bad_A_reports_block(disk):
    with pytest.raises(DimensionError) as exc:
        Colligation(disk, (1,), np.zeros((2, 1)), [[1]], [[1]], [[2]])
    assert "A" in str(exc.value) or exc.value.where[0] == "A"


def test_void_state_space(disk):
    c = Colligation(disk, (0,), np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), [[2]])
    assert c.A.shape == (0, 0) and c.norm() == 2


def test_zn_scalar_bidisk(bidisk):
    Z = assemble_Zn(MatrixPoint.scalar(bidisk, [0.3, -0.2j]), (1, 1))
    assert np.allclose(Z, np.diag([0.3, -0.2j]))


def test_zn_multiplicity(disk):
    assert np.allclose(assemble_Zn(MatrixPoint.scalar(disk, [0.7]), (2,)), 0.7 * np.eye(2))


def test_zn_full_block(rng):
    shape = BallShape([(2, 2)])
    Z = rng.standard_normal((2, 2))
    pt = MatrixPoint(shape, [Z])
    assert np.allclose(assemble_Zn(pt, (1,)), Z)


def test_zn_blocks_match_kron(rng):
    # block (r, i, t), (r, j, t') of Z_n at level s is delta_tt' Z^{(r)}_{ij}
    shape = BallShape([(1, 2), (2, 1)])
    n = (2, 3)
    pt = random_point(shape, s=2, seed=3)
    Zn = assemble_Zn(pt, n)
    for r in (1, 2):
        for j in range(1, shape.m[r - 1] + 1):
            for i in range(1, shape.ell[r - 1] + 1):
                for t in range(1, n[r - 1] + 1):
                    for tp in range(1, n[r - 1] + 1):
                        a = col_index(shape, n, r, i, t)
                        b = row_index(shape, n, r, j, tp)
                        blk = Zn[2 * a:2 * a + 2, 2 * b:2 * b + 2]
                        want = pt.block(r, i, j) if t == tp else 0
                        assert np.allclose(blk, want)


@given(shapes, st.integers(0, 2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_zn_direct_sum_when_n_is_one(dims, seed):
    shape = BallShape(dims)
    pt = random_point(shape, s=1, seed=seed)
    Zn = assemble_Zn(pt, [1] * shape.k)
    ro = co = 0
    for r in range(shape.k):
        l, m = shape.ell[r], shape.m[r]
        assert np.allclose(Zn[ro:ro + l, co:co + m], pt.Z[r])
        ro += l
        co += m


@given(shapes, st.lists(st.integers(0, 3), min_size=3, max_size=3), st.data())
@settings(max_examples=60, deadline=None)
def test_index_roundtrip(dims, nn, data):
    shape = BallShape(dims)
    n = nn[:shape.k]
    rows, cols = shape.row_dim(n), shape.col_dim(n)
    for idx in range(rows):
        assert row_index(shape, n, *row_triple(shape, n, idx)) == idx
    for idx in range(cols):
        assert col_index(shape, n, *col_triple(shape, n, idx)) == idx


@given(shapes, st.lists(st.integers(0, 3), min_size=3, max_size=3), st.integers(1, 2), st.integers(1, 2),
       st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_validate_accepts_own_constructors(dims, nn, a, b, seed):
    shape = BallShape(dims)
    c = random_colligation(shape, nn[:shape.k], a, b, seed=seed, norm=0.9)
    validate(c)
    validate(c.dual())
    assert c.norm() == pytest.approx(0.9)


def test_random_point_radius():
    shape = BallShape([(2, 1), (1, 1)])
    assert all(np.all(z == 0) for z in random_point(shape, s=2, radius=0.0, seed=1).Z)
    for seed in range(20):
        assert max(random_point(shape, s=2, radius=1.0, seed=seed).norms()) <= 1 + 1e-12
    a = random_point(shape, s=2, seed=5).Z
    b = random_point(shape, s=2, seed=5).Z
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_boundary_points_have_unit_norm():
    shape = BallShape([(2, 2)])
    pt = random_point(shape, s=1, seed=2, boundary=True)
    assert pt.norms()[0] == pytest.approx(1.0)


def test_zn_batch_matches_single():
    shape = BallShape([(1, 2), (1, 1)])
    n = (2, 1)
    pts = random_scalar_points(shape, 5, seed=0)
    batch = zn_batch(shape, n, pts)
    for q in range(5):
        assert np.allclose(batch[q], assemble_Zn(MatrixPoint.scalar(shape, pts[q]), n))


def test_words_and_parsing():
    shape = BallShape([(1, 2)])
    words = list(iter_words(shape, 2))
    assert len(words) == 1 + 2 + 4
    assert words[0] == ()
    assert parse_word("1,1,2;1,1,1") == ((1, 1, 2), (1, 1, 1))
    with pytest.raises(DimensionError):
        shape.check_letter((1, 2, 1))


def test_transform_states_preserves_transfer(rng):
    from detrep import eval_transfer
    shape = BallShape([(1, 1), (2, 1)])
    c = random_colligation(shape, (2, 1), seed=4, norm=0.8)
    T = [np.linalg.qr(rng.standard_normal((k, k)))[0] for k in (2, 1)]
    c2 = c.transform_states([t.T for t in T], T)
    pt = random_point(shape, s=2, seed=1)
    assert np.allclose(eval_transfer(c, pt), eval_transfer(c2, pt))
