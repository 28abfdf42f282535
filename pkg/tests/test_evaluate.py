import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from detrep import BallShape, Colligation, MatrixPoint, SingularPencilError, a_odot_z, det_pencil, \
    eval_transfer, nc_coeff, random_colligation, random_point, x_odot_op_a
from detrep.core import assemble_Zn, iter_words
from detrep.evaluate import truncated_series, word_coefficients, word_power

from conftest import cgauss


def dense_zn(point, n):
    # oracle: Z_n = diag_r (Z^{(r)} (x) I_{n_r}), written out directly
    return sla.block_diag(*[np.kron(z, np.eye(nr)) for z, nr in zip(point.Z, n)])


def test_s1_pencil_is_plain_product(rng):
    shape = BallShape([(1, 2), (2, 1)])
    c = random_colligation(shape, (1, 2), seed=7)
    pt = random_point(shape, seed=8)
    assert np.allclose(a_odot_z(c, pt), c.A @ dense_zn(pt, c.n))
    M = np.eye(c.A.shape[0]) - c.A @ dense_zn(pt, c.n)
    assert det_pencil(c, pt) == pytest.approx(np.linalg.det(M))


def test_zero_A_gives_zero_pencil():
    shape = BallShape([(2, 2)])
    c = random_colligation(shape, (2,), seed=1).replace(A=np.zeros((4, 4)))
    pt = random_point(shape, s=2, seed=2)
    assert np.all(a_odot_z(c, pt) == 0)
    assert np.all(x_odot_op_a(c, pt) == 0)
    assert det_pencil(c, pt) == 1


def test_single_letter_level_two(rng):
    shape = BallShape([(1, 1)])
    c = Colligation(shape, (1,), [[0.4 - 0.1j]], [[1]], [[1]], [[0]])
    pt = random_point(shape, s=2, seed=4)
    assert np.allclose(a_odot_z(c, pt), (0.4 - 0.1j) * pt.Z[0])
    assert np.allclose(x_odot_op_a(c, pt), a_odot_z(c, pt))


@pytest.mark.parametrize("seed", range(5))
def test_opposite_pencil_det_matches_dense(seed):
    # random 3x3 data: one component (l, m) = (1, 1) with n = 3
    rng = np.random.default_rng(seed)
    for shape, n in [(BallShape([(1, 1)]), (3,)), (BallShape([(1, 1), (1, 1), (1, 1)]), (1, 1, 1)),
                     (BallShape([(1, 2), (1, 1)]), (1, 1))]:
        rows, cols = shape.row_dim(n), shape.col_dim(n)
        A = cgauss(rng, rows, cols) / 3
        c = Colligation(shape, n, A, np.zeros((rows, 1)), np.zeros((1, cols)), [[0]])
        pt = random_point(shape, seed=seed)
        Zn = dense_zn(pt, n)
        d_op = np.linalg.det(np.eye(cols) - x_odot_op_a(c, pt))
        assert np.allclose(x_odot_op_a(c, pt), Zn @ A)
        assert d_op == pytest.approx(np.linalg.det(np.eye(cols) - Zn @ A), rel=1e-12)
        assert d_op == pytest.approx(np.linalg.det(np.eye(rows) - A @ Zn), rel=1e-10)


def test_zero_point_gives_D():
    shape = BallShape([(1, 2), (2, 2)])
    c = random_colligation(shape, (1, 1), 2, 3, seed=3)
    pt = random_point(shape, s=3, radius=0.0, seed=0)
    assert np.allclose(eval_transfer(c, pt), np.kron(c.D, np.eye(3)))


def test_univariate_lft():
    shape = BallShape([(1, 1)])
    a, b, cc, d, z = 0.5, 2.0, -1.5j, 0.25, 0.8 + 0.3j
    coll = Colligation(shape, (1,), [[a]], [[b]], [[cc]], [[d]])
    val = eval_transfer(coll, MatrixPoint.scalar(shape, [z]))[0, 0]
    assert val == pytest.approx(d + cc * z * b / (1 - a * z), rel=1e-14)
    assert det_pencil(coll, MatrixPoint.scalar(shape, [1.0])) == pytest.approx(0.5)


@pytest.mark.parametrize("dims,n", [([(1, 1), (1, 1)], (2, 1)), ([(1, 2)], (2,)), ([(2, 1)], (1,)),
                                     ([(1, 1), (1, 2)], (1, 1))])
def test_series_oracle_level_two(dims, n):
    # brute-force sum over all words of length <= 8 at a level-2 point
    shape = BallShape(dims)
    coll = random_colligation(shape, n, 2, 1, seed=11, norm=0.9)
    pt = random_point(shape, s=2, radius=0.3, seed=12)
    total = 0
    for w in iter_words(shape, 8):
        total = total + np.kron(nc_coeff(coll, w), word_power(pt, w))
    assert np.abs(eval_transfer(coll, pt) - total).max() <= 1e-6
    assert np.allclose(truncated_series(coll, pt, 8), total, atol=1e-13)


def test_series_tail_bound():
    shape = BallShape([(1, 1), (2, 1)])
    coll = random_colligation(shape, (2, 1), 1, 2, seed=5, norm=0.9)
    pt = random_point(shape, s=2, radius=0.45, seed=6)
    assert np.linalg.norm(a_odot_z(coll, pt), 2) < 0.5
    L = 10
    err = np.linalg.norm(eval_transfer(coll, pt) - truncated_series(coll, pt, L), 2)
    bound = 2 * np.linalg.norm(coll.B, 2) * np.linalg.norm(coll.C, 2) * 2.0**-L
    assert err <= bound


def test_coefficients_basic():
    shape = BallShape([(2, 1), (1, 1)])
    coll = random_colligation(shape, (2, 1), 2, 2, seed=9)
    assert np.array_equal(nc_coeff(coll, ()), coll.D)
    for r, i, j in shape.variables():
        assert np.allclose(nc_coeff(coll, [(r, i, j)]), coll.C_block(r, i) @ coll.B_block(r, j))
    uni = Colligation(BallShape([(1, 1)]), (1,), [[0.3]], [[2]], [[5]], [[1]])
    for N in range(1, 6):
        assert nc_coeff(uni, [(1, 1, 1)] * N)[0, 0] == pytest.approx(5 * 0.3**(N - 1) * 2)


def test_batched_coefficients_match_per_word():
    shape = BallShape([(1, 2), (2, 1)])
    coll = random_colligation(shape, (2, 1), 2, 1, seed=21)
    words = list(iter_words(shape, 3))
    batch = word_coefficients(coll, 3)
    assert batch.shape[0] == len(words)
    for w, R in zip(words, batch):
        assert np.allclose(R, nc_coeff(coll, w), atol=1e-14)


@given(st.integers(0, 10**6), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_level_consistency(seed, s):
    shape = BallShape([(1, 2), (1, 1)])
    coll = random_colligation(shape, (2, 1), 2, 1, seed=seed, norm=0.9)
    pt = random_point(shape, s=1, seed=seed + 1)
    lifted = eval_transfer(coll, pt.lift(s))
    assert np.allclose(lifted, np.kron(eval_transfer(coll, pt), np.eye(s)), atol=1e-10)


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_direct_sum_respected(seed):
    shape = BallShape([(2, 1), (1, 1)])
    coll = random_colligation(shape, (1, 2), 2, 1, seed=seed, norm=0.9)
    p1, p2 = random_point(shape, seed=seed + 1), random_point(shape, seed=seed + 2)
    F = eval_transfer(coll, p1.direct_sum(p2))
    F1, F2 = eval_transfer(coll, p1), eval_transfer(coll, p2)
    # entry (a, b) of F is the 2x2 block diag(F1[a, b], F2[a, b])
    want = np.zeros_like(F)
    want[0::2, 0::2] = F1
    want[1::2, 1::2] = F2
    assert np.allclose(F, want, atol=1e-10)


def test_singular_pencil_detected():
    shape = BallShape([(1, 1)])
    coll = Colligation(shape, (1,), [[0.5]], [[1]], [[1]], [[0]])
    pt = MatrixPoint.scalar(shape, [2.0])
    assert abs(det_pencil(coll, pt)) < 1e-15
    with pytest.raises(SingularPencilError):
        eval_transfer(coll, pt)


def test_nonsingular_det_iff_eval(rng):
    shape = BallShape([(1, 1), (1, 1)])
    coll = random_colligation(shape, (1, 1), seed=2)
    for _ in range(10):
        pt = MatrixPoint.scalar(shape, cgauss(rng, 2))
        assert abs(det_pencil(coll, pt)) > 0
        eval_transfer(coll, pt)


def test_void_state_transfer_is_D():
    shape = BallShape([(1, 1)])
    coll = Colligation(shape, (0,), [], [], [], [[2.5]])
    pt = random_point(shape, s=2, seed=1)
    assert np.allclose(eval_transfer(coll, pt), 2.5 * np.eye(2))
    assert assemble_Zn(pt, (0,)).shape == (0, 0)
