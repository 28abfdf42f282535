import warnings

import numpy as np
import scipy.linalg as sla

from .core import Colligation, DomainError

SINGULAR_D_RTOL = 1e-12
COND_WARN = 1e8


class SingularFeedthroughError(DomainError):
    """The feedthrough ``D`` is not (numerically) invertible."""


class IllConditionedFeedthroughWarning(RuntimeWarning):
    pass


def invert(coll: Colligation) -> Colligation:
    """Realization of the pointwise inverse transfer function.

    Returns ``[A - B D^{-1} C, B D^{-1}; -D^{-1} C, D^{-1}]`` on the same shape
    and multiplicities. ``D`` is factored once (LU), never inverted
    explicitly; a warning reports ``cond(D)`` above ``1e8``.
    """
    D = coll.D
    if coll.alpha != coll.beta:
        raise ValueError(f"inverse needs square D, got {D.shape}")
    sv = sla.svdvals(D)
    if sv[-1] <= SINGULAR_D_RTOL * (1.0 + sv[0]):
        raise SingularFeedthroughError(f"D is singular (sigma_min={sv[-1]:.3e})")
    cond = sv[0] / sv[-1]
    if cond > COND_WARN:
        warnings.warn(f"cond(D) = {cond:.3e}", IllConditionedFeedthroughWarning, stacklevel=2)
    lu = sla.lu_factor(D, check_finite=False)
    Dinv_C = sla.lu_solve(lu, coll.C, check_finite=False) if coll.C.size else np.zeros(coll.C.shape, complex)
    # B D^{-1} = (D^{-T} B^T)^T
    B_Dinv = sla.lu_solve(lu, coll.B.T, trans=1, check_finite=False).T if coll.B.size \
        else np.zeros(coll.B.shape, complex)
    Dinv = sla.lu_solve(lu, np.eye(coll.alpha), check_finite=False)
    return Colligation(coll.shape, coll.n, coll.A - coll.B @ Dinv_C, B_Dinv, -Dinv_C, Dinv)
