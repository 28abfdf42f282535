"""Sparse polynomials in the commuting entries ``z^{(r)}_{ij}`` and ``det(I - K Z_n)``."""

from __future__ import annotations

import numbers
from functools import cached_property

import numpy as np

from . import _kernels
from .core import BallShape, DimensionError, MatrixPoint, col_index, zn_batch

#: coefficients below this modulus are never stored
ZERO_TOL = 1e-14
#: largest pencil size ``sum_r m_r n_r`` that det_poly will expand
DETPOLY_MAX_SIZE = 12
#: largest pencil size expanded by cofactors; larger sizes use grid interpolation
COFACTOR_MAX_SIZE = 8
_MAX_GRID = 4_000_000


class DetPolySizeError(ValueError):
    """The symbolic expansion of ``det(I - K Z_n)`` would be too large."""


class MultiPoly:
    """Sparse polynomial with complex coefficients.

    ``terms`` maps exponent tuples (one entry per variable, ordered as
    :meth:`BallShape.variables`) to coefficients.
    """

    def __init__(self, shape, terms=None):
        self.shape = shape if isinstance(shape, BallShape) else BallShape(shape)
        d = self.shape.nvars
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != d:
                raise DimensionError(f"monomial {mono} has {len(mono)} exponents, shape has {d} variables",
                                     where=("monomial", mono))
            if any(e < 0 for e in mono):
                raise DimensionError(f"negative exponent in {mono}", where=("monomial", mono))
            c = complex(c)
            if abs(c) >= ZERO_TOL:
                clean[mono] = clean.get(mono, 0) + c
        self.terms = {m: c for m, c in clean.items() if abs(c) >= ZERO_TOL}

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, shape, c=1.0):
        shape = shape if isinstance(shape, BallShape) else BallShape(shape)
        return cls(shape, {(0,) * shape.nvars: c})

    @classmethod
    def variable(cls, shape, letter):
        shape = shape if isinstance(shape, BallShape) else BallShape(shape)
        e = [0] * shape.nvars
        e[shape.var_index(letter)] = 1
        return cls(shape, {tuple(e): 1.0})

    @classmethod
    def univariate(cls, coeffs):
        """``sum_k coeffs[k] z^k`` on the unit disk."""
        return cls(BallShape([(1, 1)]), {(k,): c for k, c in enumerate(coeffs)})

    @classmethod
    def from_arrays(cls, shape, exps, coefs):
        return cls(shape, {tuple(e): c for e, c in zip(np.asarray(exps).tolist(), coefs)})

    # accessors ------------------------------------------------------------
    @property
    def nvars(self):
        return self.shape.nvars

    def __len__(self):
        return len(self.terms)

    def coeff(self, mono) -> complex:
        return self.terms.get(tuple(mono), 0j)

    def constant_term(self) -> complex:
        return self.coeff((0,) * self.nvars)

    def degree(self, letter) -> int:
        """Degree in the single variable ``z^{(r)}_{ij}``; ``-1`` for the zero polynomial."""
        v = self.shape.var_index(letter)
        return max((m[v] for m in self.terms), default=-1)

    def degrees(self) -> tuple[int, ...]:
        return tuple(max((m[v] for m in self.terms), default=0) for v in range(self.nvars))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_zero(self):
        return not self.terms

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.shape != self.shape:
                raise DimensionError("polynomials live on different shapes", where=("shape",))
            return other
        if isinstance(other, numbers.Number):
            return MultiPoly.constant(self.shape, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(self.shape, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.shape, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return MultiPoly(self.shape, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MultiPoly(self.shape, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = MultiPoly.constant(self.shape, 1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    def max_coeff_diff(self, other: "MultiPoly") -> float:
        other = self._coerce(other)
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.coeff(m) - other.coeff(m)) for m in keys), default=0.0)

    def conj_reflect(self, n) -> "MultiPoly":
        """``z^n conj(p)(1/z)`` on a polydisk: the coefficient of ``z^e`` is ``conj(c_{n-e})``."""
        n = tuple(n)
        out = {}
        for m, c in self.terms.items():
            e = tuple(a - b for a, b in zip(n, m))
            if min(e, default=0) < 0:
                raise ValueError(f"n={n} is below the degree of monomial {m}")
            out[e] = np.conj(c)
        return MultiPoly(self.shape, out)

    # evaluation -----------------------------------------------------------
    @cached_property
    def _csr(self):
        monos = list(self.terms)
        coef = np.array([self.terms[m] for m in monos], dtype=np.complex128)
        ptr = [0]
        var, exp = [], []
        for m in monos:
            for v, e in enumerate(m):
                if e:
                    var.append(v)
                    exp.append(e)
            ptr.append(len(var))
        return (np.array(ptr, dtype=np.int64), np.array(var, dtype=np.int64),
                np.array(exp, dtype=np.int64), coef)

    def evaluate_many(self, points, backend=None) -> np.ndarray:
        """Values at the rows of a ``(N, nvars)`` array of scalar points."""
        points = np.ascontiguousarray(np.atleast_2d(points), dtype=np.complex128)
        if points.shape[1] != self.nvars:
            raise DimensionError(f"points have {points.shape[1]} coordinates, expected {self.nvars}",
                                 where=("points",))
        ptr, var, exp, coef = self._csr
        fn = {None: _kernels.eval_terms, "numpy": _kernels.eval_terms_numpy,
              "numba": _kernels.eval_terms_numba}[backend]
        return fn(ptr, var, exp, coef, points)

    def __call__(self, point):
        return poly_eval(self, point)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.shape == other.shape and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        names = [f"z{r}_{i}{j}" for r, i, j in self.shape.variables()]
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            mono = "*".join(f"{names[v]}^{e}" if e > 1 else names[v] for v, e in enumerate(m) if e)
            parts.append(f"({c:.6g})" + (f"*{mono}" if mono else ""))
        return "MultiPoly(" + " + ".join(parts) + ")"


def poly_eval(p: MultiPoly, point) -> complex:
    """Value of ``p`` at a level-1 point (a :class:`MatrixPoint` or a flat coordinate vector)."""
    if isinstance(point, MatrixPoint):
        if point.s != 1:
            raise DimensionError("commutative polynomials are evaluated at scalar (s = 1) points only",
                                 where=("s",))
        if point.shape != p.shape:
            raise DimensionError("point shape does not match polynomial shape", where=("shape",))
        point = point.flat()
    return complex(p.evaluate_many(np.asarray(point)[None, :])[0])


# det(I - K Z_n) --------------------------------------------------------------

def _check_K(K, n, shape):
    shape = shape if isinstance(shape, BallShape) else BallShape(shape)
    n = shape.check_n(n)
    K = np.atleast_2d(np.asarray(K, dtype=complex)) if np.size(K) else \
        np.zeros((shape.row_dim(n), shape.col_dim(n)), dtype=complex)
    want = (shape.row_dim(n), shape.col_dim(n))
    if K.shape != want:
        raise DimensionError(f"K has shape {K.shape}, expected {want}", where=("K",))
    return K, n, shape


def pencil_det_many(K, n, shape, points) -> np.ndarray:
    """``det(I - K Z_n)`` at each row of a ``(N, nvars)`` array of scalar points."""
    K, n, shape = _check_K(K, n, shape)
    points = np.atleast_2d(points)
    size = K.shape[0]
    if size == 0:
        return np.ones(points.shape[0], dtype=complex)
    out = np.empty(points.shape[0], dtype=complex)
    step = max(1, (1 << 22) // (size * size))
    eye = np.eye(size)
    for lo in range(0, points.shape[0], step):
        Zn = zn_batch(shape, n, points[lo:lo + step])
        out[lo:lo + step] = np.linalg.det(eye - K @ Zn)
    return out


def _var_radix(shape, n):
    return [n[r - 1] + 1 for r, _, _ in shape.variables()]


def _entry_polys(K, n, shape, strides):
    """Packed polynomials of the entries of ``I - K Z_n``, column by column."""
    size = K.shape[0]
    var_of = {v: idx for idx, v in enumerate(shape.variables())}
    cols = []
    for r in range(1, shape.k + 1):
        l, m, nr = shape.ell[r - 1], shape.m[r - 1], n[r - 1]
        for j in range(1, m + 1):
            for t in range(1, nr + 1):
                ci = [col_index(shape, n, r, i, t) for i in range(1, l + 1)]
                keys = [strides[var_of[(r, i, j)]] for i in range(1, l + 1)]
                cols.append((ci, keys))
    entries = [[None] * size for _ in range(size)]
    for c, (ci, keys) in enumerate(cols):
        for a in range(size):
            kk, cc = [], []
            if a == c:
                kk.append(0)
                cc.append(1.0)
            for idx, key in zip(ci, keys):
                if K[a, idx] != 0:
                    kk.append(key)
                    cc.append(-K[a, idx])
            entries[a][c] = (np.array(kk, dtype=np.int64), np.array(cc, dtype=np.complex128))
    return entries


def _combine(keys_list, vals_list):
    keys = np.concatenate(keys_list)
    vals = np.concatenate(vals_list)
    if keys.size == 0:
        return keys, vals
    uniq, inv = np.unique(keys, return_inverse=True)
    re = np.bincount(inv, weights=vals.real, minlength=len(uniq))
    im = np.bincount(inv, weights=vals.imag, minlength=len(uniq))
    out = re + 1j * im
    nz = out != 0
    return uniq[nz], out[nz]


def _det_cofactor(K, n, shape):
    radix = _var_radix(shape, n)
    strides = np.cumprod([1] + radix[:-1], dtype=object)
    if int(strides[-1]) * radix[-1] >= 2 ** 62:
        raise DetPolySizeError("too many variables for the packed monomial encoding")
    strides = [int(s) for s in strides]
    entries = _entry_polys(K, n, shape, strides)
    size = K.shape[0]
    one = (np.zeros(1, dtype=np.int64), np.ones(1, dtype=np.complex128))
    layer = {0: one}
    # layer p holds the minors on rows 0..p-1 for every column subset of size p
    for p in range(1, size + 1):
        row = p - 1
        nxt = {}
        acc_k, acc_v = {}, {}
        for mask, (mk, mv) in layer.items():
            for c in range(size):
                bit = 1 << c
                if mask & bit:
                    continue
                ek, ev = entries[row][c]
                if ek.size == 0 or mk.size == 0:
                    continue
                greater = bin(mask >> (c + 1)).count("1")
                pk, pv = _kernels.mul_packed(ek, ev, mk, mv)
                if greater % 2:
                    pv = -pv
                new = mask | bit
                acc_k.setdefault(new, []).append(pk)
                acc_v.setdefault(new, []).append(pv)
        for new in acc_k:
            nxt[new] = _combine(acc_k[new], acc_v[new])
        layer = nxt
    full = (1 << size) - 1
    keys, vals = layer.get(full, (np.zeros(0, np.int64), np.zeros(0, np.complex128)))
    exps = np.empty((keys.size, len(radix)), dtype=np.int64)
    for v, (st, b) in enumerate(zip(strides, radix)):
        exps[:, v] = (keys // st) % b
    return MultiPoly.from_arrays(shape, exps, vals)


def _degree_feasible(shape, n, exps):
    # every row and column of Z^{(r)} contributes degree at most n_r
    ok = np.ones(exps.shape[0], dtype=bool)
    off = 0
    for (l, m), nr in zip(shape.dims, n):
        e = exps[:, off:off + l * m].reshape(-1, l, m)
        ok &= (e.sum(axis=2) <= nr).all(axis=1) & (e.sum(axis=1) <= nr).all(axis=1)
        off += l * m
    return ok


def _det_interpolate(K, n, shape):
    radix = _var_radix(shape, n)
    grid = tuple(radix)
    G = int(np.prod(grid, dtype=object))
    if G > _MAX_GRID:
        raise DetPolySizeError(f"interpolation grid of {G} points exceeds the limit {_MAX_GRID}")
    vals = np.empty(G, dtype=complex)
    radix_arr = np.array(radix)
    step = 1 << 15
    for lo in range(0, G, step):
        idx = np.arange(lo, min(G, lo + step))
        g = np.stack(np.unravel_index(idx, grid), axis=1)
        pts = np.exp(2j * np.pi * g / radix_arr)
        vals[lo:lo + step] = pencil_det_many(K, n, shape, pts)
    coef = np.fft.fftn(vals.reshape(grid)).ravel() / G
    floor = max(ZERO_TOL, 64 * np.finfo(float).eps * np.abs(vals).max())
    keep = np.nonzero(np.abs(coef) > floor)[0]
    exps = np.stack(np.unravel_index(keep, grid), axis=1) if keep.size else np.zeros((0, len(grid)), int)
    ok = _degree_feasible(shape, n, exps)
    return MultiPoly.from_arrays(shape, exps[ok], coef[keep][ok])


def det_poly(K, n, shape, method=None) -> MultiPoly:
    """Expansion of ``det(I - K Z_n)`` as a :class:`MultiPoly`.

    Pencils up to size 8 are expanded by memoized cofactors over column
    subsets; sizes 9 to 12 are interpolated from values on a grid of roots
    of unity (per-variable degree is at most ``n_r``). Larger pencils raise
    :class:`DetPolySizeError`.
    """
    K, n, shape = _check_K(K, n, shape)
    size = K.shape[0]
    if size == 0:
        return MultiPoly.constant(shape, 1.0)
    if size > DETPOLY_MAX_SIZE:
        raise DetPolySizeError(
            f"pencil size {size} exceeds {DETPOLY_MAX_SIZE}; use sampled verification instead")
    if method is None:
        method = "cofactor" if size <= COFACTOR_MAX_SIZE else "interpolate"
    if method == "cofactor":
        return _det_cofactor(K, n, shape)
    if method == "interpolate":
        return _det_interpolate(K, n, shape)
    raise ValueError(f"unknown method {method!r}")
