"""Hot loops for sparse polynomial evaluation and multiplication.

Each kernel has a numba version and a pure-numpy version with identical
signatures. The numba path is used unless numba is missing or the
environment variable ``DETREP_DISABLE_NUMBA`` is set to a non-empty value
other than ``0``.

Polynomials reach these kernels in one of two encodings:

* CSR terms: ``ptr`` (T+1,), ``var`` and ``exp`` (nnz,) list the nonzero
  exponents of each term; ``coef`` (T,) holds the coefficients.
* packed keys: a monomial is the int64 ``sum_v e_v * stride_v`` where the
  strides are a mixed radix large enough that products never carry.
"""

import os

import numpy as np

_flag = os.environ.get("DETREP_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("disabled by DETREP_DISABLE_NUMBA")
    from numba import njit
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"

# upper bound on the (points x terms x vars) gather buffer of the numpy path
_CHUNK_ELEMS = 1 << 21


def csr_to_dense(ptr, var, exp, nvars):
    T = len(ptr) - 1
    E = np.zeros((T, nvars), dtype=np.int64)
    rows = np.repeat(np.arange(T), np.diff(ptr))
    E[rows, var] = exp
    return E


def eval_terms_numpy(ptr, var, exp, coef, points):
    points = np.ascontiguousarray(points, dtype=np.complex128)
    N, d = points.shape
    T = len(coef)
    out = np.zeros(N, dtype=np.complex128)
    if T == 0:
        return out
    if d == 0 or len(var) == 0:
        out[:] = coef.sum()
        return out
    E = csr_to_dense(ptr, var, exp, d)
    maxdeg = int(E.max())
    cols = np.arange(d)[None, :]
    step = max(1, _CHUNK_ELEMS // (T * d))
    for lo in range(0, N, step):
        P = points[lo:lo + step]
        pw = np.empty((P.shape[0], d, maxdeg + 1), dtype=np.complex128)
        pw[:, :, 0] = 1.0
        for e in range(1, maxdeg + 1):
            pw[:, :, e] = pw[:, :, e - 1] * P
        mono = pw[:, cols, E].prod(axis=2)
        out[lo:lo + step] = mono @ coef
    return out


def mul_packed_numpy(k1, c1, k2, c2):
    if len(k1) == 0 or len(k2) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.complex128)
    keys = (k1[:, None] + k2[None, :]).ravel()
    vals = np.multiply.outer(c1, c2).ravel()
    uniq, inv = np.unique(keys, return_inverse=True)
    re = np.bincount(inv, weights=vals.real, minlength=len(uniq))
    im = np.bincount(inv, weights=vals.imag, minlength=len(uniq))
    return uniq, re + 1j * im


if HAS_NUMBA:

    @njit(cache=True)
    def eval_terms_numba(ptr, var, exp, coef, points):
        N, d = points.shape
        T = coef.shape[0]
        out = np.zeros(N, dtype=np.complex128)
        maxdeg = 0
        for q in range(exp.shape[0]):
            if exp[q] > maxdeg:
                maxdeg = exp[q]
        pw = np.empty((d, maxdeg + 1), dtype=np.complex128)
        for p in range(N):
            for v in range(d):
                pw[v, 0] = 1.0
                for e in range(1, maxdeg + 1):
                    pw[v, e] = pw[v, e - 1] * points[p, v]
            acc = 0j
            for t in range(T):
                term = coef[t]
                for q in range(ptr[t], ptr[t + 1]):
                    term *= pw[var[q], exp[q]]
                acc += term
            out[p] = acc
        return out

    @njit(cache=True)
    def mul_packed_numba(k1, c1, k2, c2):
        n1, n2 = k1.shape[0], k2.shape[0]
        if n1 == 0 or n2 == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.complex128)
        lo = k1.min() + k2.min()
        span = k1.max() + k2.max() - lo + 1
        if span <= 4 * n1 * n2:
            # keys are dense enough for a direct accumulator
            acc = np.zeros(span, dtype=np.complex128)
            hit = np.zeros(span, dtype=np.bool_)
            for a in range(n1):
                for b in range(n2):
                    q = k1[a] + k2[b] - lo
                    acc[q] += c1[a] * c2[b]
                    hit[q] = True
            u = 0
            for q in range(span):
                u += hit[q]
            out_k = np.empty(u, dtype=np.int64)
            out_c = np.empty(u, dtype=np.complex128)
            u = 0
            for q in range(span):
                if hit[q]:
                    out_k[u] = q + lo
                    out_c[u] = acc[q]
                    u += 1
            return out_k, out_c
        keys = np.empty(n1 * n2, dtype=np.int64)
        vals = np.empty(n1 * n2, dtype=np.complex128)
        q = 0
        for a in range(n1):
            for b in range(n2):
                keys[q] = k1[a] + k2[b]
                vals[q] = c1[a] * c2[b]
                q += 1
        order = np.argsort(keys)
        out_k = np.empty(n1 * n2, dtype=np.int64)
        out_c = np.empty(n1 * n2, dtype=np.complex128)
        u = -1
        last = np.int64(-1)
        for q in range(n1 * n2):
            idx = order[q]
            if u < 0 or keys[idx] != last:
                u += 1
                last = keys[idx]
                out_k[u] = last
                out_c[u] = vals[idx]
            else:
                out_c[u] += vals[idx]
        return out_k[:u + 1], out_c[:u + 1]

    eval_terms = eval_terms_numba

    def mul_packed(k1, c1, k2, c2):
        # numba only wins on the dense-accumulator path; its argsort is slower than numpy's
        if len(k1) and len(k2) and k1.max() + k2.max() - k1.min() - k2.min() < 4 * len(k1) * len(k2):
            return mul_packed_numba(k1, c1, k2, c2)
        return mul_packed_numpy(k1, c1, k2, c2)
else:
    eval_terms_numba = None
    mul_packed_numba = None
    eval_terms = eval_terms_numpy
    mul_packed = mul_packed_numpy
