"""Evaluation of structured realizations at matrix points.

At level ``s`` the pencils factor through :func:`~detrep.core.assemble_Zn`:
``A (.) Z = (A (x) I_s) Z_n`` and ``X (.)_op A = Z_n (A (x) I_s)``, so the
index contraction of the block formulas is carried out by one matrix product.
"""

import numpy as np
import scipy.linalg as sla

from .core import Colligation, DimensionError, DomainError, MatrixPoint, assemble_Zn

#: relative threshold on the smallest singular value of ``I - A (.) Z``
SINGULAR_RTOL = 1e-12


class SingularPencilError(DomainError):
    """``I - A (.) Z`` is numerically singular: the point is outside the domain."""

    def __init__(self, message, sigma_min=None):
        super().__init__(message)
        self.sigma_min = sigma_min


def _check(coll, point):
    if coll.shape != point.shape:
        raise DimensionError(
            f"point shape {list(point.shape.dims)} does not match colligation shape {list(coll.shape.dims)}",
            where=("shape",))


def _kron_eye(M, s):
    return M if s == 1 else np.kron(M, np.eye(s))


def a_odot_z(coll: Colligation, point: MatrixPoint) -> np.ndarray:
    """The pencil matrix ``A (.) Z`` of size ``sum_r m_r n_r s``."""
    _check(coll, point)
    return _kron_eye(coll.A, point.s) @ assemble_Zn(point, coll.n)


def x_odot_op_a(coll: Colligation, point: MatrixPoint) -> np.ndarray:
    """The opposite pencil ``X (.)_op A`` at ``X = point``, of size ``sum_r l_r n_r s``."""
    _check(coll, point)
    return assemble_Zn(point, coll.n) @ _kron_eye(coll.A, point.s)


def c_odot_z(coll: Colligation, point: MatrixPoint) -> np.ndarray:
    _check(coll, point)
    return _kron_eye(coll.C, point.s) @ assemble_Zn(point, coll.n)


def det_pencil(coll: Colligation, point: MatrixPoint) -> complex:
    """``det(I - A (.) Z)``; at ``s = 1`` this is ``det(I - A Z_n)``."""
    M = a_odot_z(coll, point)
    if M.shape[0] == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(np.eye(M.shape[0]) - M))


def eval_transfer(coll: Colligation, point: MatrixPoint) -> np.ndarray:
    """``D (x) I_s + (C (.) Z)(I - A (.) Z)^{-1}(B (x) I_s)``.

    Raises :class:`SingularPencilError` when the smallest singular value of
    ``I - A (.) Z`` falls below ``1e-12 (1 + ||A (.) Z||)``.
    """
    s = point.s
    M = a_odot_z(coll, point)
    out = _kron_eye(coll.D, s).astype(complex)
    size = M.shape[0]
    if size == 0:
        return out
    sv = sla.svdvals(M)
    pencil = np.eye(size) - M
    sig = sla.svdvals(pencil)
    if sig[-1] < SINGULAR_RTOL * (1.0 + sv[0]):
        raise SingularPencilError(
            f"I - A(.)Z is singular at this point (sigma_min={sig[-1]:.3e})", sigma_min=float(sig[-1]))
    lu = sla.lu_factor(pencil, check_finite=False)
    x = sla.lu_solve(lu, _kron_eye(coll.B, s), check_finite=False)
    return out + c_odot_z(coll, point) @ x


def nc_coeff(coll: Colligation, word) -> np.ndarray:
    """Power-series coefficient of the noncommutative word ``g^{(r_0)}_{i_0 j_0} ... g^{(r_N)}_{i_N j_N}``.

    ``C^{(r_0)}_{i_0} A^{(r_0 r_1)}_{j_0 i_1} ... A^{(r_{N-1} r_N)}_{j_{N-1} i_N} B^{(r_N)}_{j_N}``;
    the empty word gives ``D``.
    """
    word = [coll.shape.check_letter(a) for a in word]
    if not word:
        return np.array(coll.D)
    r0, i0, j0 = word[0]
    acc = coll.C_block(r0, i0)
    prev_r, prev_j = r0, j0
    for r, i, j in word[1:]:
        acc = acc @ coll.A_block(prev_r, r, prev_j, i)
        prev_r, prev_j = r, j
    return acc @ coll.B_block(prev_r, prev_j)


def word_power(point: MatrixPoint, word) -> np.ndarray:
    """``Z^w = Z^{(r_0)}_{i_0 j_0} ... Z^{(r_N)}_{i_N j_N}`` (left to right)."""
    out = np.eye(point.s, dtype=complex)
    for r, i, j in word:
        out = out @ point.block(r, i, j)
    return out


def truncated_series(coll: Colligation, point: MatrixPoint, max_len) -> np.ndarray:
    """``sum_{|w| <= max_len} R_w (x) Z^w``, accumulated without materializing words.

    Coefficient and point factors are carried together as a tensor indexed
    by the last letter's ``(r, j)``, so the cost is linear in ``max_len``.
    """
    _check(coll, point)
    shape, s = coll.shape, point.s
    total = np.kron(coll.D, np.eye(s))
    # partial[r][j] = sum over words ending in a letter (r, *, j) of (C...A) (x) Z^w
    partial = []
    for r in range(1, shape.k + 1):
        row = []
        for j in range(1, shape.m[r - 1] + 1):
            acc = 0
            for i in range(1, shape.ell[r - 1] + 1):
                acc = acc + np.kron(coll.C_block(r, i), point.block(r, i, j))
            row.append(acc)
        partial.append(row)
    for length in range(1, max_len + 1):
        for r in range(1, shape.k + 1):
            for j in range(1, shape.m[r - 1] + 1):
                total = total + partial[r - 1][j - 1] @ np.kron(coll.B_block(r, j), np.eye(s))
        if length == max_len:
            break
        nxt = []
        for r in range(1, shape.k + 1):
            row = []
            for j in range(1, shape.m[r - 1] + 1):
                acc = 0
                for rp in range(1, shape.k + 1):
                    for jp in range(1, shape.m[rp - 1] + 1):
                        for i in range(1, shape.ell[r - 1] + 1):
                            acc = acc + partial[rp - 1][jp - 1] @ np.kron(
                                coll.A_block(rp, r, jp, i), point.block(r, i, j))
                row.append(acc)
            nxt.append(row)
        partial = nxt
    return total


def word_coefficients(coll: Colligation, max_len) -> np.ndarray:
    """Every coefficient ``R_w`` with ``|w| <= max_len``, stacked as ``(num_words, alpha, beta)``.

    Words come in the order of :func:`~detrep.core.iter_words` (by length,
    then lexicographically in the letters). Prefix products are shared
    between words, grouped by the component and column of the last letter.
    """
    shape = coll.shape
    letters = shape.variables()
    d = len(letters)
    out = [coll.D[None, :, :]]
    if max_len < 1:
        return out[0].copy()
    # (r, j) -> list of (codes, prefixes) with prefixes of shape (W, alpha, n_r)
    groups = {}
    for idx, (r, i, j) in enumerate(letters):
        groups.setdefault((r, j), []).append((np.array([idx], dtype=np.int64), coll.C_block(r, i)[None]))
    for length in range(1, max_len + 1):
        codes_all, coeffs_all = [], []
        merged = {}
        for (r, j), parts in groups.items():
            codes = np.concatenate([c for c, _ in parts])
            P = np.concatenate([x for _, x in parts])
            merged[(r, j)] = (codes, P)
            codes_all.append(codes)
            coeffs_all.append(P @ coll.B_block(r, j))
        codes = np.concatenate(codes_all)
        order = np.argsort(codes, kind="stable")
        out.append(np.concatenate(coeffs_all)[order])
        if length == max_len:
            break
        groups = {}
        for (r, j), (codes, P) in merged.items():
            for idx, (rp, ip, jp) in enumerate(letters):
                groups.setdefault((rp, jp), []).append(
                    (codes * d + idx, P @ coll.A_block(r, rp, j, ip)))
    return np.concatenate(out)
