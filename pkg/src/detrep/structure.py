"""Reachable and unobservable subspaces of structured realizations, and compression.

Both families are computed as fixpoints of the one-letter maps
``V_{r'} -> A^{(r r')}_{ji} V_{r'}`` instead of enumerating words. The
unobservable family is obtained on the dual side: the observable spaces of
a colligation are the reachable spaces of its adjoint.
"""

from dataclasses import dataclass

import numpy as np

from .core import Colligation

#: relative rank threshold, applied when ``sigma_max >= RANK_ABS_SWITCH``
RANK_RTOL = 1e-9
#: absolute rank threshold used for small generators
RANK_ATOL = 1e-12
RANK_ABS_SWITCH = 1e-3


def numerical_rank_tol(sigma_max):
    return RANK_RTOL * sigma_max if sigma_max >= RANK_ABS_SWITCH else RANK_ATOL


def orth(G, dim):
    """Orthonormal basis of ``range(G)`` in ``C^dim`` using the package rank rule."""
    if dim == 0 or G.size == 0:
        return np.zeros((dim, 0), dtype=complex)
    U, sv, _ = np.linalg.svd(G, full_matrices=False)
    rank = int(np.sum(sv > numerical_rank_tol(sv[0])))
    return U[:, :rank]


@dataclass(frozen=True)
class SubspaceFamily:
    """One orthonormal basis per component (``bases[r]`` is ``n_r x dim_r``)."""

    bases: tuple

    @property
    def dims(self):
        return tuple(V.shape[1] for V in self.bases)

    def projectors(self):
        return [V @ V.conj().T for V in self.bases]

    def complement(self):
        out = []
        for V in self.bases:
            n = V.shape[0]
            P = np.eye(n) - V @ V.conj().T
            out.append(orth(P, n))
        return SubspaceFamily(tuple(out))


def _grow_step(coll, bases):
    k = coll.shape.k
    new = []
    for r in range(1, k + 1):
        nr = coll.n[r - 1]
        gens = [bases[r - 1]]
        bb = coll.b_blocks(r)
        gens.extend(bb[j] for j in range(bb.shape[0]))
        for rp in range(1, k + 1):
            V = bases[rp - 1]
            if V.shape[1] == 0:
                continue
            ab = coll.a_blocks(r, rp)
            gens.extend(ab[j, i] @ V for j in range(ab.shape[0]) for i in range(ab.shape[1]))
        new.append(orth(np.hstack(gens) if gens else np.zeros((nr, 0)), nr))
    return new


def controllable_spaces(coll: Colligation, return_rounds=False):
    """Smallest family containing every ``range B^{(r)}_j`` and closed under all ``A^{(r r')}_{ji}``.

    The iteration starts from the empty family. Every round either adds a
    dimension, fills the whole space or changes nothing, so it stops after
    at most ``sum_r n_r`` rounds.
    """
    bases = [np.zeros((nr, 0), dtype=complex) for nr in coll.n]
    rounds = 0
    total = sum(coll.n)
    while total > 0:
        rounds += 1
        new = _grow_step(coll, bases)
        stable = all(a.shape[1] == b.shape[1] for a, b in zip(new, bases))
        bases = new
        if stable or sum(V.shape[1] for V in bases) == total or rounds > total:
            break
    fam = SubspaceFamily(tuple(bases))
    return (fam, rounds) if return_rounds else fam


def observable_spaces(coll: Colligation, return_rounds=False):
    """Orthogonal complements of the unobservable spaces."""
    return controllable_spaces(coll.dual(), return_rounds=return_rounds)


def unobservable_spaces(coll: Colligation) -> SubspaceFamily:
    """Largest family inside ``ker C^{(r)}_i`` for all ``i`` that the ``A`` blocks map into itself."""
    return observable_spaces(coll).complement()


def _pair_spans_full(coll: Colligation, reach: SubspaceFamily):
    # span of words starting with a fixed (r0, j0): range B^{(r0)}_{j0} + sum A^{(r0 r1)}_{j0 i1} C_{r1}
    for r0 in range(1, coll.shape.k + 1):
        n0 = coll.n[r0 - 1]
        if n0 == 0:
            continue
        bb = coll.b_blocks(r0)
        for j0 in range(coll.shape.m[r0 - 1]):
            gens = [bb[j0]]
            for r1 in range(1, coll.shape.k + 1):
                V = reach.bases[r1 - 1]
                if V.shape[1] == 0:
                    continue
                ab = coll.a_blocks(r0, r1)
                gens.extend(ab[j0, i] @ V for i in range(ab.shape[1]))
            if orth(np.hstack(gens), n0).shape[1] < n0:
                return False
    return True


def is_controllable(coll: Colligation) -> bool:
    """Controllability tested separately for every ``(r0, j0)``."""
    return _pair_spans_full(coll, controllable_spaces(coll))


def is_observable(coll: Colligation) -> bool:
    """Observability tested separately for every ``(r0, i0)`` (dual of :func:`is_controllable`)."""
    dual = coll.dual()
    return _pair_spans_full(dual, controllable_spaces(dual))


def is_minimal(coll: Colligation) -> bool:
    return is_controllable(coll) and is_observable(coll)


def restrict(coll: Colligation, family: SubspaceFamily) -> Colligation:
    """Orthogonal compression ``V_r^* A V_r'``, ``V_r^* B``, ``C V_r``."""
    left = [V.conj().T for V in family.bases]
    right = list(family.bases)
    return coll.transform_states(left, right)


def minimize(coll: Colligation) -> Colligation:
    """Two-stage compression: onto the reachable spaces, then onto the observable spaces.

    The transfer function and every word coefficient are preserved and the
    block norm cannot increase.
    """
    reach = restrict(coll, controllable_spaces(coll))
    return restrict(reach, observable_spaces(reach))
