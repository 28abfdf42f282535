import itertools

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from detrep import BallShape, Colligation, controllable_spaces, eval_transfer, is_minimal, minimize, \
    nc_coeff, random_colligation, random_point, unobservable_spaces
from detrep.core import iter_words
from detrep.evaluate import word_coefficients
from detrep.structure import is_controllable, is_observable, observable_spaces
from detrep.synthetic import pad_unobservable, pad_unreachable, random_nonminimal


def proj(V):
    return V @ V.conj().T


def reach_oracle(coll, max_len):
    """Span of A^{(r r1)}_{j0 i1} ... B^{(rN)}_{jN} by brute-force enumeration of index chains."""
    shape = coll.shape
    vecs = {r: [np.zeros((coll.n[r - 1], 0))] for r in range(1, shape.k + 1)}
    steps = [(r, j, i) for r in range(1, shape.k + 1) for j in range(1, shape.m[r - 1] + 1)
             for i in range(1, shape.ell[r - 1] + 1)]
    for N in range(max_len + 1):
        for chain in itertools.product(steps, repeat=N + 1):
            # chain[q] = (r_q, j_q, i_q); i_0 is unused, A^{(r_q r_{q+1})}_{j_q i_{q+1}}
            r_last, j_last, _ = chain[-1]
            v = coll.B_block(r_last, j_last)
            for q in range(N - 1, -1, -1):
                r, j, _ = chain[q]
                v = coll.A_block(r, chain[q + 1][0], j, chain[q + 1][2]) @ v
            vecs[chain[0][0]].append(v)
    return [sla.orth(np.hstack(vecs[r]), rcond=1e-10) if np.hstack(vecs[r]).size else
            np.zeros((coll.n[r - 1], 0)) for r in range(1, shape.k + 1)]


def test_zero_B_has_nothing_reachable():
    shape = BallShape([(1, 2), (1, 1)])
    c = random_colligation(shape, (2, 1), seed=1)
    c = c.replace(B=np.zeros_like(c.B))
    assert controllable_spaces(c).dims == (0, 0)


def test_full_rank_B_reaches_everything():
    shape = BallShape([(1, 1)])
    c = random_colligation(shape, (2,), 1, 2, seed=1)
    assert controllable_spaces(c).dims == (2,)


def test_two_state_reachable(two_state):
    fam = controllable_spaces(two_state)
    assert fam.dims == (1,)
    # brute force: columns B, AB, A^2 B
    A, B = two_state.A, two_state.B
    K = np.hstack([B, A @ B, A @ A @ B])
    assert np.allclose(fam.projectors()[0], proj(sla.orth(K)))
    assert np.allclose(fam.projectors()[0], np.diag([1, 0]))


def test_two_state_unobservable(two_state):
    N = unobservable_spaces(two_state)
    A, C = two_state.A, two_state.C
    ker = sla.null_space(np.vstack([C, C @ A, C @ A @ A]))
    assert np.allclose(N.projectors()[0], proj(ker))
    assert np.allclose(N.projectors()[0], np.diag([1, 0]))


def test_unobservable_trivial_cases():
    shape = BallShape([(2, 1)])
    c = random_colligation(shape, (2,), 1, 1, seed=3)
    assert unobservable_spaces(c.replace(C=np.zeros_like(c.C))).dims == (2,)
    c2 = random_colligation(shape, (2,), 2, 1, seed=3)
    assert unobservable_spaces(c2).dims == (0,)


@pytest.mark.parametrize("seed", range(8))
def test_reachable_matches_word_enumeration(seed):
    rng = np.random.default_rng(seed)
    shape = BallShape([(1, 1), (1, 2)])
    n = (2, 2)
    c = random_colligation(shape, n, 1, 1, seed=seed)
    # sparsify so the reachable spaces are proper subspaces
    A = c.A * (rng.uniform(size=c.A.shape) < 0.35)
    B = c.B * (rng.uniform(size=c.B.shape) < 0.5)
    c = c.replace(A=A, B=B)
    fam = controllable_spaces(c)
    oracle = reach_oracle(c, sum(n))
    for P, V in zip(fam.projectors(), oracle):
        assert np.allclose(P, proj(V), atol=1e-9)


def test_minimality_examples(two_state):
    shape = BallShape([(1, 1)])
    assert is_minimal(Colligation(shape, (0,), [], [], [], [[1]]))
    assert not is_minimal(two_state)
    assert is_minimal(Colligation(shape, (1,), [[0]], [[1]], [[1]], [[0.7]]))


def test_minimize_two_state(two_state):
    m = minimize(two_state)
    assert m.n == (0,)
    pt = random_point(m.shape, s=2, seed=0)
    assert np.allclose(eval_transfer(m, pt), 0.3 * np.eye(2))


def test_minimize_minimal_is_unitary_equivalent():
    shape = BallShape([(1, 2), (2, 1)])
    c = random_colligation(shape, (2, 1), 1, 1, seed=4, norm=0.9)
    assert is_minimal(c)
    m = minimize(c)
    assert m.n == c.n
    assert np.allclose(word_coefficients(c, 4), word_coefficients(m, 4), atol=1e-10)
    assert m.norm() == pytest.approx(c.norm(), abs=1e-12)


def test_padding_is_removed():
    shape = BallShape([(1, 1), (2, 1)])
    core = random_colligation(shape, (1, 1), 1, 1, seed=5, norm=0.9)
    padded = pad_unobservable(pad_unreachable(core, (1, 0), seed=1), (0, 1), seed=2)
    assert padded.n == (2, 2)
    assert not is_minimal(padded)
    assert minimize(padded).n == (1, 1)


def test_per_pair_test_rejects_shared_span():
    # aggregate reachability is full but the words starting with (1, 1) only see range B_1
    shape = BallShape([(1, 2)])
    c = Colligation(shape, (1,), [[0], [0]], [[1], [0]], [[1]], [[0]])
    assert controllable_spaces(c).dims == (1,)
    assert not is_controllable(c)
    assert is_observable(c)


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_minimize_properties(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    shape = BallShape([(int(rng.integers(1, 3)), int(rng.integers(1, 3))) for _ in range(k)])
    core = rng.integers(0, 3, size=k)
    reach = rng.integers(0, 2, size=k)
    obs = rng.integers(0, 2, size=k)
    coll, _ = random_nonminimal(shape, core, reach, obs, 2, 2, seed=rng)
    fam, rounds = controllable_spaces(coll, return_rounds=True)
    assert rounds <= max(sum(coll.n), 1)
    _, rounds_o = observable_spaces(coll, return_rounds=True)
    assert rounds_o <= max(sum(coll.n), 1)
    m = minimize(coll)
    assert is_minimal(m)
    assert m.norm() <= coll.norm() + 1e-10
    assert minimize(m).n == m.n
    assert np.abs(word_coefficients(coll, 3) - word_coefficients(m, 3)).max() <= 1e-8
    pt = random_point(shape, s=2, seed=seed)
    assert np.allclose(eval_transfer(coll, pt), eval_transfer(m, pt), atol=1e-8)


def test_nc_coeff_preserved_on_all_short_words():
    shape = BallShape([(1, 1), (1, 2)])
    coll, _ = random_nonminimal(shape, (1, 1), (1, 0), (0, 1), 1, 1, seed=8)
    m = minimize(coll)
    for w in iter_words(shape, 3):
        assert np.allclose(nc_coeff(coll, w), nc_coeff(m, w), atol=1e-10)
