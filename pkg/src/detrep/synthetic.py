"""Random instance generators with known structure.

Used by the test-suite and the acceptance runner, and handy for
experiments: generic (hence minimal) colligations, explicit non-minimal
padding, per-component unitary mixing, and end-to-end instances for the
extraction pipeline whose answer is known in advance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .core import BallShape, Colligation, _rng, random_colligation
from .inversion import invert
from .polynomial import MultiPoly, det_poly


def _g(rng, *sz):
    return rng.standard_normal(sz) + 1j * rng.standard_normal(sz)


def random_shape(rng, max_k=3, max_lm=2):
    k = int(rng.integers(1, max_k + 1))
    return BallShape([(int(rng.integers(1, max_lm + 1)), int(rng.integers(1, max_lm + 1))) for _ in range(k)])


def _pad(coll: Colligation, extra, rng, scale, kind):
    shape, k = coll.shape, coll.shape.k
    extra = shape.check_n(extra)
    n_new = [a + b for a, b in zip(coll.n, extra)]
    ab, bb, cb = [], [], []
    for r in range(k):
        row = []
        for rp in range(k):
            old = coll.a_blocks(r + 1, rp + 1)
            m, l = old.shape[:2]
            blk = scale * _g(rng, m, l, n_new[r], n_new[rp])
            blk[:, :, :coll.n[r], :coll.n[rp]] = old
            if kind == "unreachable":
                blk[:, :, coll.n[r]:, :coll.n[rp]] = 0  # original states never feed the padding
            else:
                blk[:, :, :coll.n[r], coll.n[rp]:] = 0  # padding never feeds the original states
            row.append(blk)
        ab.append(row)
        b_old, c_old = coll.b_blocks(r + 1), coll.c_blocks(r + 1)
        b = scale * _g(rng, b_old.shape[0], n_new[r], coll.beta)
        c = scale * _g(rng, coll.alpha, c_old.shape[1], n_new[r])
        b[:, :coll.n[r]] = b_old
        c[:, :, :coll.n[r]] = c_old
        if kind == "unreachable":
            b[:, coll.n[r]:] = 0
        else:
            c[:, :, coll.n[r]:] = 0
        bb.append(b)
        cb.append(c)
    return Colligation.from_blocks(shape, n_new, ab, bb, cb, coll.D)


def pad_unreachable(coll: Colligation, extra, seed=None, scale=1.0) -> Colligation:
    """Append ``extra[r]`` states per component that no input can reach."""
    return _pad(coll, extra, _rng(seed), scale, "unreachable")


def pad_unobservable(coll: Colligation, extra, seed=None, scale=1.0) -> Colligation:
    """Append ``extra[r]`` states per component that no output can see."""
    return _pad(coll, extra, _rng(seed), scale, "unobservable")


def mix_states(coll: Colligation, seed=None) -> Colligation:
    """Apply an independent random unitary change of basis in every component."""
    rng = _rng(seed)
    U = [unitary_group.rvs(nr, random_state=rng) if nr > 1 else np.eye(nr) * np.exp(2j * np.pi * rng.uniform())
         for nr in coll.n]
    return coll.transform_states([u.conj().T for u in U], U)


def random_nonminimal(shape, n_core, pad_reach, pad_obs, alpha=1, beta=1, seed=None, norm=0.9):
    """Generic core of multiplicity ``n_core`` hidden behind both kinds of padding.

    Returns ``(colligation, core)``; the minimal multiplicities are those of
    the core (with probability one).
    """
    rng = _rng(seed)
    core = random_colligation(shape, n_core, alpha, beta, rng, norm=norm)
    out = pad_unreachable(core, pad_reach, rng, scale=0.5)
    out = pad_unobservable(out, pad_obs, rng, scale=0.5)
    out = mix_states(out, rng)
    nrm = out.norm()
    if nrm > norm:
        # uniform rescaling of A, B, C keeps the padding structure; D stays
        f = norm / nrm
        out = out.replace(A=out.A * f, B=out.B * f, C=out.C * f)
        core = core.replace(A=core.A * f, B=core.B * f, C=core.C * f)
    return out, core


def state_triangular(shape: BallShape, n, seed=None, scale=1.0) -> np.ndarray:
    """Random ``A`` with ``A Z_n`` nilpotent for every ``Z``.

    States are labelled ``(r, t)`` in lexicographic order and ``A`` only maps
    a state to strictly earlier labels, so ``det(I - A Z_n) == 1``.
    """
    rng = _rng(seed)
    n = shape.check_n(n)
    ab = []
    for r in range(shape.k):
        row = []
        for rp in range(shape.k):
            blk = scale * _g(rng, shape.m[r], shape.ell[rp], n[r], n[rp])
            if r > rp:
                blk[:] = 0
            elif r == rp:
                blk *= np.triu(np.ones((n[r], n[r])), 1)
            row.append(blk)
        ab.append(row)
    zeros_b = [np.zeros((shape.m[r], n[r], 1)) for r in range(shape.k)]
    zeros_c = [np.zeros((1, shape.ell[r], n[r])) for r in range(shape.k)]
    return Colligation.from_blocks(shape, n, ab, zeros_b, zeros_c, [[0]]).A


@dataclass
class PipelineInstance:
    p: MultiPoly
    coll_cg: Colligation
    rho: float
    c: float
    base: Colligation


def synthetic_pipeline_instance(shape: BallShape, n, rho=1.1, c=0.5, seed=None, pad=None,
                                target_norm=0.95) -> PipelineInstance:
    """Realization of ``c / p(rho z)`` for a polynomial ``p`` with a known contractive representation.

    A base colligation ``{A, B, C, 1/c}`` with ``det(I - A Z_n) == 1`` realizes
    ``p / c`` where ``p = det(I - A^x Z_n)``; its inverse realizes ``c / p``
    and is rescaled to ``c / p(rho z)``. Generators ``A, B, C`` shrink until the
    returned colligation has block norm at most ``target_norm``. ``pad``
    optionally appends ``(unreachable, unobservable)`` extra states.
    """
    if c >= target_norm / rho:
        raise ValueError("c must be below target_norm / rho for a contractive instance")
    rng = _rng(seed)
    n = shape.check_n(n)
    A0 = state_triangular(shape, n, rng)
    rows, cols = shape.row_dim(n), shape.col_dim(n)
    B0, C0 = _g(rng, rows, 1), _g(rng, 1, cols)
    t = 1.0
    while True:
        base = Colligation(shape, n, t * A0, t * B0, t * C0, [[1.0 / c]])
        inv = invert(base)
        if inv.norm() <= target_norm / rho:
            break
        t *= 0.8
    p = det_poly(inv.A, n, shape)
    coll = inv
    if pad is not None:
        reach, obs = pad
        s = 0.5
        while True:
            padded = pad_unobservable(pad_unreachable(inv, reach, rng, s), obs, rng, s)
            padded = mix_states(padded, rng)
            if padded.norm() <= target_norm / rho:
                break
            s *= 0.7
        coll = padded
    coll_cg = coll.replace(A=coll.A * rho, C=coll.C * rho)
    return PipelineInstance(p=p, coll_cg=coll_cg, rho=float(rho), c=float(c), base=base)
