"""Domain types for structured realizations over matrix polyballs.

Index conventions used everywhere in the package:

* row index of ``A``/``B`` runs over triples ``(r, j, t)`` ordered by ``r``,
  then ``j`` (``1..m_r``), then ``t`` (``1..n_r``);
* column index of ``A``/``C`` runs over ``(r, i, t)`` ordered by ``r``, then
  ``i`` (``1..ell_r``), then ``t``.

All public indices (components, block rows/columns, letters) are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

Letter = tuple[int, int, int]
Word = tuple[Letter, ...]


class DimensionError(ValueError):
    """Raised when block sizes are inconsistent with the shape and multiplicities."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class DomainError(ArithmeticError):
    """A well-formed input lies outside the domain of the requested operation."""


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BallShape:
    """The polyball ``B^{l_1 x m_1} x ... x B^{l_k x m_k}``."""

    dims: tuple[tuple[int, int], ...]

    def __init__(self, dims):
        dims = tuple((int(l), int(m)) for l, m in dims)
        if len(dims) == 0:
            raise DimensionError("a shape needs at least one factor")
        for r, (l, m) in enumerate(dims, start=1):
            if l < 1 or m < 1:
                raise DimensionError(f"factor {r} has non-positive size {(l, m)}", where=("shape", r))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def polydisk(cls, d):
        return cls([(1, 1)] * d)

    @property
    def k(self):
        return len(self.dims)

    @property
    def ell(self):
        return tuple(l for l, _ in self.dims)

    @property
    def m(self):
        return tuple(m for _, m in self.dims)

    @property
    def nvars(self):
        return sum(l * m for l, m in self.dims)

    @property
    def is_polydisk(self):
        return all(d == (1, 1) for d in self.dims)

    def variables(self) -> list[Letter]:
        """Variables ``z^{(r)}_{ij}`` in lexicographic ``(r, i, j)`` order."""
        return [(r + 1, i + 1, j + 1)
                for r, (l, m) in enumerate(self.dims)
                for i in range(l) for j in range(m)]

    def var_index(self, letter: Letter) -> int:
        r, i, j = self.check_letter(letter)
        off = sum(l * m for l, m in self.dims[: r - 1])
        return off + (i - 1) * self.dims[r - 1][1] + (j - 1)

    def check_letter(self, letter) -> Letter:
        r, i, j = (int(x) for x in letter)
        if not 1 <= r <= self.k:
            raise DimensionError(f"letter {letter}: component {r} outside 1..{self.k}", where=("letter", letter))
        l, m = self.dims[r - 1]
        if not (1 <= i <= l and 1 <= j <= m):
            raise DimensionError(f"letter {letter}: entry outside {l}x{m}", where=("letter", letter))
        return r, i, j

    def transpose(self):
        return BallShape([(m, l) for l, m in self.dims])

    def check_n(self, n) -> tuple[int, ...]:
        n = tuple(int(x) for x in n)
        if len(n) != self.k:
            raise DimensionError(f"multiplicity has {len(n)} entries, shape has {self.k} factors", where=("n",))
        if any(x < 0 for x in n):
            raise DimensionError(f"negative multiplicity in {n}", where=("n",))
        return n

    def row_dim(self, n):
        return sum(m * nr for (_, m), nr in zip(self.dims, n))

    def col_dim(self, n):
        return sum(l * nr for (l, _), nr in zip(self.dims, n))


# flat index bijections -------------------------------------------------------

def _offsets(sizes, n):
    out, acc = [], 0
    for sz, nr in zip(sizes, n):
        out.append(acc)
        acc += sz * nr
    return out


def row_index(shape: BallShape, n, r, j, t) -> int:
    """0-based flat row index of the 1-based triple ``(r, j, t)``."""
    return _offsets(shape.m, n)[r - 1] + (j - 1) * n[r - 1] + (t - 1)


def col_index(shape: BallShape, n, r, i, t) -> int:
    """0-based flat column index of the 1-based triple ``(r, i, t)``."""
    return _offsets(shape.ell, n)[r - 1] + (i - 1) * n[r - 1] + (t - 1)


def _unflatten(sizes, n, idx):
    for r, (sz, nr) in enumerate(zip(sizes, n)):
        if idx < sz * nr:
            return r + 1, idx // nr + 1, idx % nr + 1
        idx -= sz * nr
    raise IndexError("flat index out of range")


def row_triple(shape: BallShape, n, idx) -> tuple[int, int, int]:
    return _unflatten(shape.m, n, idx)


def col_triple(shape: BallShape, n, idx) -> tuple[int, int, int]:
    return _unflatten(shape.ell, n, idx)


# colligation ----------------------------------------------------------------

def _void_as(a, want):
    # empty inputs (e.g. [] for a void block) take the expected zero-size shape
    a = np.asarray(a, dtype=complex)
    if a.size == 0 and want[0] * want[1] == 0:
        return a.reshape(want)
    return a


@dataclass(frozen=True, eq=False)
class Colligation:
    """Block colligation ``[A B; C D]`` of a structured realization.

    The transfer function is ``D + C Z_n (I - A Z_n)^{-1} B``. Blocks are
    accessible with the 1-based helpers :meth:`A_block`, :meth:`B_block`,
    :meth:`C_block`; the ``*_blocks`` methods return the tensor form used by
    the state-space transformations.
    """

    shape: BallShape
    n: tuple[int, ...]
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __init__(self, shape, n, A, B, C, D, *, check=True):
        if not isinstance(shape, BallShape):
            shape = BallShape(shape)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "n", tuple(int(x) for x in n))
        D = np.atleast_2d(np.asarray(D, dtype=complex))
        rows, cols = shape.row_dim(self.n), shape.col_dim(self.n)
        alpha, beta = D.shape
        object.__setattr__(self, "A", _frozen(_void_as(A, (rows, cols))))
        object.__setattr__(self, "B", _frozen(_void_as(B, (rows, beta))))
        object.__setattr__(self, "C", _frozen(_void_as(C, (alpha, cols))))
        object.__setattr__(self, "D", _frozen(D))
        if check:
            validate(self)

    @property
    def alpha(self):
        return self.D.shape[0]

    @property
    def beta(self):
        return self.D.shape[1]

    @property
    def state_dims(self):
        return self.shape.row_dim(self.n), self.shape.col_dim(self.n)

    def _row_slice(self, r):
        off = _offsets(self.shape.m, self.n)[r - 1]
        return slice(off, off + self.shape.m[r - 1] * self.n[r - 1])

    def _col_slice(self, r):
        off = _offsets(self.shape.ell, self.n)[r - 1]
        return slice(off, off + self.shape.ell[r - 1] * self.n[r - 1])

    # tensor views: A^{(rr')} as (m_r, l_r', n_r, n_r'), B^{(r)} as (m_r, n_r, beta),
    # C^{(r)} as (alpha, l_r, n_r)
    def a_blocks(self, r, rp) -> np.ndarray:
        m, l = self.shape.m[r - 1], self.shape.ell[rp - 1]
        nr, nrp = self.n[r - 1], self.n[rp - 1]
        blk = self.A[self._row_slice(r), self._col_slice(rp)]
        return blk.reshape(m, nr, l, nrp).transpose(0, 2, 1, 3)

    def b_blocks(self, r) -> np.ndarray:
        return self.B[self._row_slice(r)].reshape(self.shape.m[r - 1], self.n[r - 1], self.beta)

    def c_blocks(self, r) -> np.ndarray:
        return self.C[:, self._col_slice(r)].reshape(self.alpha, self.shape.ell[r - 1], self.n[r - 1])

    def A_block(self, r, rp, j, i) -> np.ndarray:
        """``A^{(r r')}_{j i}``, an ``n_r x n_r'`` matrix."""
        return self.a_blocks(r, rp)[j - 1, i - 1]

    def B_block(self, r, j) -> np.ndarray:
        """``B^{(r)}_j``, an ``n_r x beta`` matrix."""
        return self.b_blocks(r)[j - 1]

    def C_block(self, r, i) -> np.ndarray:
        """``C^{(r)}_i``, an ``alpha x n_r`` matrix."""
        return self.c_blocks(r)[:, i - 1, :]

    def block_matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    def norm(self) -> float:
        M = self.block_matrix()
        return float(np.linalg.norm(M, 2)) if M.size else 0.0

    def replace(self, **kw) -> "Colligation":
        args = dict(shape=self.shape, n=self.n, A=self.A, B=self.B, C=self.C, D=self.D)
        args.update(kw)
        return Colligation(**args)

    @classmethod
    def from_blocks(cls, shape, n, a_blocks, b_blocks, c_blocks, D):
        """Assemble from tensor blocks (see :meth:`a_blocks` for the layout).

        ``a_blocks[r][rp]`` uses 0-based component indices.
        """
        shape = shape if isinstance(shape, BallShape) else BallShape(shape)
        n = shape.check_n(n)
        D = np.atleast_2d(np.asarray(D, dtype=complex))
        alpha, beta = D.shape
        A = np.zeros((shape.row_dim(n), shape.col_dim(n)), dtype=complex)
        B = np.zeros((shape.row_dim(n), beta), dtype=complex)
        C = np.zeros((alpha, shape.col_dim(n)), dtype=complex)
        ro, co = _offsets(shape.m, n), _offsets(shape.ell, n)
        for r in range(shape.k):
            m_r, l_r, n_r = shape.m[r], shape.ell[r], n[r]
            rs = slice(ro[r], ro[r] + m_r * n_r)
            B[rs] = np.asarray(b_blocks[r]).reshape(m_r * n_r, beta)
            C[:, co[r]:co[r] + l_r * n_r] = np.asarray(c_blocks[r]).reshape(alpha, l_r * n_r)
            for rp in range(shape.k):
                l_p, n_p = shape.ell[rp], n[rp]
                blk = np.asarray(a_blocks[r][rp]).reshape(m_r, l_p, n_r, n_p)
                A[rs, co[rp]:co[rp] + l_p * n_p] = blk.transpose(0, 2, 1, 3).reshape(m_r * n_r, l_p * n_p)
        return cls(shape, n, A, B, C, D)

    def transform_states(self, left, right) -> "Colligation":
        """Apply per-component state maps.

        ``left[r]`` (``p_r x n_r``) acts on the row side and ``right[r]``
        (``n_r x p_r``) on the column side: ``A^{(rr')}_{ji} -> L_r A R_r'``,
        ``B^{(r)}_j -> L_r B``, ``C^{(r)}_i -> C R_r``.
        """
        k = self.shape.k
        new_n = [np.shape(left[r])[0] for r in range(k)]
        ab = [[np.einsum("ab,jibc,cd->jiad", left[r], self.a_blocks(r + 1, rp + 1), right[rp])
               for rp in range(k)] for r in range(k)]
        bb = [np.einsum("ab,jbc->jac", left[r], self.b_blocks(r + 1)) for r in range(k)]
        cb = [np.einsum("aib,bc->aic", self.c_blocks(r + 1), right[r]) for r in range(k)]
        return Colligation.from_blocks(self.shape, new_n, ab, bb, cb, self.D)

    def dual(self) -> "Colligation":
        """Adjoint colligation ``[A* C*; B* D*]`` over the transposed shape."""
        shape_t = self.shape.transpose()
        k = self.shape.k
        ab = [[np.conj(self.a_blocks(rp + 1, r + 1)).transpose(1, 0, 3, 2) for rp in range(k)]
              for r in range(k)]
        bb = [np.conj(self.c_blocks(r + 1)).transpose(1, 2, 0) for r in range(k)]
        cb = [np.conj(self.b_blocks(r + 1)).transpose(2, 0, 1) for r in range(k)]
        return Colligation.from_blocks(shape_t, self.n, ab, bb, cb, self.D.conj().T)

    def __repr__(self):
        return (f"Colligation(shape={list(self.shape.dims)}, n={list(self.n)}, "
                f"alpha={self.alpha}, beta={self.beta})")


def validate(coll: Colligation) -> None:
    """Check every dimension invariant; raise :class:`DimensionError` on the first violation."""
    shape = coll.shape
    n = shape.check_n(coll.n)
    rows, cols = shape.row_dim(n), shape.col_dim(n)
    if coll.D.ndim != 2:
        raise DimensionError("D must be a matrix", where=("D",))
    alpha, beta = coll.D.shape
    for name, mat, want in (("A", coll.A, (rows, cols)), ("B", coll.B, (rows, beta)),
                            ("C", coll.C, (alpha, cols))):
        if mat.ndim != 2 or mat.shape != want:
            loc = _first_bad_block(shape, n, name, mat, want)
            raise DimensionError(f"{name} has shape {mat.shape}, expected {want}{loc[1]}", where=loc[0])
    for name, mat in (("A", coll.A), ("B", coll.B), ("C", coll.C), ("D", coll.D)):
        if not np.all(np.isfinite(mat)):
            raise DimensionError(f"{name} has non-finite entries", where=(name,))


def _first_bad_block(shape, n, name, mat, want):
    # locate the first (r, r', j, i) block that cannot be carved out of mat
    if mat.ndim != 2:
        return (name,), ""
    got_r, got_c = mat.shape
    if name == "C":
        return (name,), ""
    acc = 0
    for r, (m, nr) in enumerate(zip(shape.m, n), start=1):
        for j in range(1, m + 1):
            acc += nr
            if acc > got_r:
                return (name, r, None, j, None), f" (block row r={r}, j={j} missing)"
    if got_r != want[0]:
        return (name, shape.k, None, None, None), " (extra rows)"
    if name == "A":
        acc = 0
        for r, (l, nr) in enumerate(zip(shape.ell, n), start=1):
            for i in range(1, l + 1):
                acc += nr
                if acc > got_c:
                    return (name, None, r, None, i), f" (block column r'={r}, i={i} missing)"
        return (name, None, shape.k, None, None), " (extra columns)"
    return (name,), ""


# points ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MatrixPoint:
    """A point ``Z = (Z^{(1)}, ..., Z^{(k)})`` at level ``s``.

    ``Z[r]`` has size ``(l_r s) x (m_r s)`` and is read as an ``l_r x m_r``
    array of ``s x s`` blocks.
    """

    shape: BallShape
    s: int
    Z: tuple[np.ndarray, ...] = field(repr=False)

    def __init__(self, shape, Z, s=1):
        shape = shape if isinstance(shape, BallShape) else BallShape(shape)
        s = int(s)
        if s < 1:
            raise DimensionError("level s must be positive", where=("s",))
        Z = tuple(_frozen(np.atleast_2d(z)) for z in Z)
        if len(Z) != shape.k:
            raise DimensionError(f"point has {len(Z)} components, shape has {shape.k}", where=("Z",))
        for r, (z, (l, m)) in enumerate(zip(Z, shape.dims), start=1):
            if z.shape != (l * s, m * s):
                raise DimensionError(f"Z[{r}] has shape {z.shape}, expected {(l * s, m * s)}", where=("Z", r))
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "Z", Z)

    @classmethod
    def scalar(cls, shape, values):
        """Level-1 point from a flat vector ordered like :meth:`BallShape.variables`."""
        shape = shape if isinstance(shape, BallShape) else BallShape(shape)
        values = np.asarray(values, dtype=complex).ravel()
        if values.size != shape.nvars:
            raise DimensionError(f"expected {shape.nvars} values, got {values.size}", where=("Z",))
        Z, off = [], 0
        for l, m in shape.dims:
            Z.append(values[off:off + l * m].reshape(l, m))
            off += l * m
        return cls(shape, Z, 1)

    def block(self, r, i, j) -> np.ndarray:
        s = self.s
        return self.Z[r - 1][(i - 1) * s:i * s, (j - 1) * s:j * s]

    def flat(self) -> np.ndarray:
        if self.s != 1:
            raise DimensionError("flat() is defined for scalar points only", where=("s",))
        return np.concatenate([z.ravel() for z in self.Z])

    def norms(self) -> list[float]:
        return [float(np.linalg.norm(z, 2)) for z in self.Z]

    def lift(self, s) -> "MatrixPoint":
        """Scalar point promoted to level ``s`` by ``z_ij -> z_ij I_s``."""
        if self.s != 1:
            raise DimensionError("only scalar points can be lifted", where=("s",))
        return MatrixPoint(self.shape, [np.kron(z, np.eye(s)) for z in self.Z], s)

    def direct_sum(self, other: "MatrixPoint") -> "MatrixPoint":
        """Blockwise direct sum ``Z_ij (+) W_ij``, a point at level ``s + s'``."""
        if other.shape != self.shape:
            raise DimensionError("shapes differ", where=("shape",))
        s, t = self.s, other.s
        Z = []
        for r, (l, m) in enumerate(self.shape.dims):
            a = self.Z[r].reshape(l, s, m, s)
            b = other.Z[r].reshape(l, t, m, t)
            out = np.zeros((l, s + t, m, s + t), dtype=complex)
            out[:, :s, :, :s] = a
            out[:, s:, :, s:] = b
            Z.append(out.reshape(l * (s + t), m * (s + t)))
        return MatrixPoint(self.shape, Z, s + t)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _unit_norm_gaussian(rng, rows, cols):
    while True:
        g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        nrm = np.linalg.norm(g, 2)
        if nrm > 0:
            return g / nrm


def random_point(shape: BallShape, s=1, radius=1.0, seed=None, *, boundary=False) -> MatrixPoint:
    """Random point with ``||Z^{(r)}|| <= radius`` for every ``r``.

    Each component is a complex Gaussian matrix normalized to unit operator
    norm and rescaled by an independent uniform draw in ``[0, radius]``. With
    ``boundary=True`` the rescaling is skipped so every norm equals ``radius``.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    rng = _rng(seed)
    Z = []
    for l, m in shape.dims:
        g = _unit_norm_gaussian(rng, l * s, m * s)
        scale = radius if boundary else radius * rng.uniform()
        Z.append(g * scale)
    return MatrixPoint(shape, Z, s)


def random_scalar_points(shape: BallShape, count, radius=1.0, seed=None, boundary_prob=0.0):
    """Batch of ``count`` level-1 points as a ``(count, nvars)`` array.

    With probability ``boundary_prob`` a point has every ``||Z^{(r)}||``
    equal to ``radius``; otherwise each norm is uniform in ``[0, radius]``.
    """
    rng = _rng(seed)
    out = np.empty((count, shape.nvars), dtype=complex)
    on_boundary = rng.uniform(size=count) < boundary_prob
    off = 0
    for l, m in shape.dims:
        g = rng.standard_normal((count, l, m)) + 1j * rng.standard_normal((count, l, m))
        nrm = np.linalg.norm(g, 2, axis=(1, 2))
        nrm[nrm == 0] = 1.0
        scale = np.where(on_boundary, 1.0, rng.uniform(size=count)) * radius
        out[:, off:off + l * m] = (g * (scale / nrm)[:, None, None]).reshape(count, l * m)
        off += l * m
    return out


def assemble_Zn(point: MatrixPoint, n) -> np.ndarray:
    """``Z_n = (+)_r (Z^{(r)} (x) I_{n_r})`` in the package's index ordering.

    At level ``s`` the row index is ``(r, i, t, sigma)`` and the column index
    ``(r, j, t, tau)``; the ``(t, t')`` block at ``(i, j)`` is ``delta_{tt'} Z^{(r)}_{ij}``.
    """
    shape, s = point.shape, point.s
    n = shape.check_n(n)
    rows, cols = shape.col_dim(n) * s, shape.row_dim(n) * s
    out = np.zeros((rows, cols), dtype=complex)
    ro = co = 0
    for z, (l, m), nr in zip(point.Z, shape.dims, n):
        if nr:
            zb = z.reshape(l, s, m, s)
            blk = np.einsum("iajb,tu->itajub", zb, np.eye(nr)).reshape(l * nr * s, m * nr * s)
            out[ro:ro + l * nr * s, co:co + m * nr * s] = blk
        ro += l * nr * s
        co += m * nr * s
    return out


def zn_batch(shape: BallShape, n, points: np.ndarray) -> np.ndarray:
    """Stack of level-1 ``Z_n`` matrices for a ``(N, nvars)`` array of points."""
    n = shape.check_n(n)
    points = np.atleast_2d(points)
    N = points.shape[0]
    out = np.zeros((N, shape.col_dim(n), shape.row_dim(n)), dtype=complex)
    ro = co = vo = 0
    for (l, m), nr in zip(shape.dims, n):
        z = points[:, vo:vo + l * m].reshape(N, l, m)
        if nr:
            blk = np.einsum("nij,tu->nitju", z, np.eye(nr)).reshape(N, l * nr, m * nr)
            out[:, ro:ro + l * nr, co:co + m * nr] = blk
        ro, co, vo = ro + l * nr, co + m * nr, vo + l * m
    return out


def random_colligation(shape: BallShape, n, alpha=1, beta=1, seed=None, norm=None) -> Colligation:
    """Dense complex Gaussian colligation; rescaled to block norm ``norm`` if given."""
    rng = _rng(seed)
    n = shape.check_n(n)
    rows, cols = shape.row_dim(n), shape.col_dim(n)

    def g(*sz):
        return rng.standard_normal(sz) + 1j * rng.standard_normal(sz)

    M = g(rows + alpha, cols + beta)
    if norm is not None:
        M *= norm / np.linalg.norm(M, 2)
    return Colligation(shape, n, M[:rows, :cols], M[:rows, cols:], M[rows:, :cols], M[rows:, cols:])


def iter_words(shape: BallShape, max_len) -> Iterator[Word]:
    """All words of length ``0..max_len`` over the shape's letters."""
    letters = shape.variables()
    frontier: list[Word] = [()]
    yield ()
    for _ in range(max_len):
        frontier = [w + (a,) for w in frontier for a in letters]
        yield from frontier


def parse_word(text: str) -> Word:
    """Parse ``"r,i,j;r,i,j;..."``; an empty string is the empty word."""
    text = text.strip()
    if not text:
        return ()
    out = []
    for part in text.split(";"):
        bits = [b.strip() for b in part.split(",")]
        if len(bits) != 3:
            raise ValueError(f"bad letter {part!r}; expected r,i,j")
        out.append(tuple(int(b) for b in bits))
    return tuple(out)


def as_matrix(a: Sequence, dtype=complex) -> np.ndarray:
    return np.atleast_2d(np.asarray(a, dtype=dtype))
