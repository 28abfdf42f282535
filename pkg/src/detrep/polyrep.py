"""Determinantal representations ``p = det(I - K Z_n)``: verification, extraction, reflection."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .core import BallShape, Colligation, DimensionError, DomainError, random_scalar_points
from .inversion import invert
from .polynomial import DETPOLY_MAX_SIZE, MultiPoly, det_poly, pencil_det_many
from .structure import minimize

DETREP_TOL = 1e-8
DET_ONE_TOL = 1e-8
DET_ONE_SAMPLES = 200
REFLECT_TOL = 1e-10
CONSTANT_TOL = 1e-12
CLUSTER_TOL = 1e-7


class PipelineError(DomainError):
    """The extraction pipeline found its input inconsistent with the hypotheses."""

    def __init__(self, message, step=None, report=None):
        super().__init__(message)
        self.step = step
        self.report = report or {}


def _norm2(K):
    return float(np.linalg.norm(K, 2)) if np.size(K) else 0.0


def _closed_ball_samples(shape, count, seed):
    return random_scalar_points(shape, count, 1.0, seed, boundary_prob=0.5)


@dataclass
class VerifyReport:
    max_error: float
    norm_K: float
    passed: bool
    method: str
    tol: float = DETREP_TOL
    samples: int = 0

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def verify_detrep(p: MultiPoly, K, n, samples=200, seed=None) -> VerifyReport:
    """Compare ``p`` with ``det(I - K Z_n)`` and check strict contractivity of ``K``.

    Coefficientwise when the pencil is small enough to expand, otherwise at
    ``samples`` random points of the closed polyball.
    """
    shape = p.shape
    n = shape.check_n(n)
    K = np.asarray(K, dtype=complex).reshape(shape.row_dim(n), shape.col_dim(n))
    norm_K = _norm2(K)
    if K.shape[0] <= DETPOLY_MAX_SIZE:
        err = p.max_coeff_diff(det_poly(K, n, shape))
        method, used = "symbolic", 0
    else:
        pts = _closed_ball_samples(shape, samples, seed)
        err = float(np.max(np.abs(p.evaluate_many(pts) - pencil_det_many(K, n, shape, pts)), initial=0.0))
        method, used = "sampled", samples
    return VerifyReport(max_error=float(err), norm_K=norm_K,
                        passed=bool(err <= DETREP_TOL and norm_K < 1.0), method=method, samples=used)


def _cluster_mean(vals, tol):
    vals = np.asarray(vals, dtype=complex)
    out = vals.copy()
    seen = np.zeros(len(vals), dtype=bool)
    for a in range(len(vals)):
        if seen[a]:
            continue
        group = [a]
        seen[a] = True
        q = 0
        while q < len(group):
            b = group[q]
            near = np.nonzero(~seen & (np.abs(vals - vals[b]) < tol))[0]
            seen[near] = True
            group.extend(near.tolist())
            q += 1
        out[group] = vals[group].mean()
    return out


def univariate_detrep(p: MultiPoly):
    """Diagonal ``K`` with ``p(z) = det(I - K z)`` for a polynomial on the unit disk.

    The diagonal entries are the reciprocals of the roots of ``p``, obtained
    as eigenvalues of the companion matrix of the monic reversal
    ``z^N p(1/z)``. Eigenvalues closer than ``1e-7`` are merged into their mean.
    Returns ``(K, (N,))``.
    """
    if p.shape.dims != ((1, 1),):
        raise DimensionError("univariate_detrep needs the unit-disk shape [(1, 1)]", where=("shape",))
    if p.is_zero():
        raise ValueError("zero polynomial")
    if abs(p.constant_term() - 1) > CONSTANT_TOL:
        raise ValueError(f"p(0) = {p.constant_term()} but must equal 1")
    N = p.total_degree()
    if N == 0:
        return np.zeros((0, 0), dtype=complex), (0,)
    c = np.array([p.coeff((k,)) for k in range(N + 1)])
    comp = np.zeros((N, N), dtype=complex)
    comp[0, :] = -c[1:]
    comp[np.arange(1, N), np.arange(N - 1)] = 1.0
    a = _cluster_mean(np.linalg.eigvals(comp), CLUSTER_TOL)
    return np.diag(a), (N,)


@dataclass
class StabilityReport:
    min_abs: float
    argmin: np.ndarray = field(repr=False)
    samples: int = 0
    boundary_prob: float = 0.5

    def to_dict(self):
        return {"min_abs": self.min_abs, "argmin": self.argmin, "samples": self.samples,
                "boundary_prob": self.boundary_prob}


def stability_sample(p: MultiPoly, samples=10_000, seed=None) -> StabilityReport:
    """Smallest ``|p|`` over random points of the closed unit polyball.

    Half of the draws (in expectation) sit on the boundary with every
    ``||Z^{(r)}|| = 1``. A small minimum is evidence against strong stability;
    a large one is not a proof of it.
    """
    pts = _closed_ball_samples(p.shape, samples, seed)
    vals = np.abs(p.evaluate_many(pts))
    q = int(np.argmin(vals))
    return StabilityReport(min_abs=float(vals[q]), argmin=pts[q], samples=samples)


def det_is_one(K, n, shape, samples=DET_ONE_SAMPLES, seed=None):
    """Check ``det(I - K Z_n) == 1`` identically. Returns ``(ok, error, method)``."""
    shape = shape if isinstance(shape, BallShape) else BallShape(shape)
    size = shape.row_dim(n)
    if size <= DETPOLY_MAX_SIZE:
        dp = det_poly(K, n, shape)
        err = dp.max_coeff_diff(MultiPoly.constant(shape, 1.0))
        return err <= DET_ONE_TOL, float(err), "symbolic"
    pts = _closed_ball_samples(shape, samples, seed)
    err = float(np.max(np.abs(pencil_det_many(K, n, shape, pts) - 1)))
    return err <= DET_ONE_TOL, err, "sampled"


@dataclass
class PipelineResult:
    K: np.ndarray
    n_min: tuple
    report: dict
    minimal: Colligation = field(repr=False, default=None)


def pipeline_extract(p: MultiPoly, coll_cg: Colligation, rho, c, samples=DET_ONE_SAMPLES,
                     seed=0) -> PipelineResult:
    """Extract a strictly contractive representation of ``p`` from a realization of ``c / p(rho z)``.

    Steps: rescale ``A, C`` by ``1/rho`` (giving a realization of ``c / p``),
    compress to a minimal realization, invert it, require the inverse to have
    ``det(I - A^x Z_n) == 1`` identically, and return ``K = A_min``. The
    result is checked against ``p`` with :func:`verify_detrep`.
    """
    if rho <= 1:
        raise ValueError("rho must exceed 1")
    if c <= 0:
        raise ValueError("c must be positive")
    if coll_cg.alpha != 1 or coll_cg.beta != 1:
        raise DimensionError("the realization must be scalar valued", where=("D",))
    if coll_cg.shape != p.shape:
        raise DimensionError("realization and polynomial shapes differ", where=("shape",))
    if abs(p.constant_term() - 1) > CONSTANT_TOL:
        raise ValueError(f"p(0) = {p.constant_term()} but must equal 1")
    d0 = complex(coll_cg.D[0, 0])
    if abs(d0) <= 1e-12:
        raise PipelineError("D is zero; the realization cannot represent c/p", step="input")

    shape = p.shape
    scaled = coll_cg.replace(A=coll_cg.A / rho, C=coll_cg.C / rho)
    mini = minimize(scaled)
    inv = invert(mini)
    n_min = mini.n
    report = {"rho": float(rho), "c": float(c), "n_input": list(coll_cg.n), "n_min": list(n_min),
              "d_min": d0, "tolerances": {"det_one": DET_ONE_TOL, "detrep": DETREP_TOL}}

    ok, err, method = det_is_one(inv.A, n_min, shape, samples, seed)
    report["det_one"] = {"ok": bool(ok), "error": err, "method": method}
    if not ok:
        raise PipelineError(f"det(I - A^x_min Z) is not identically 1 (error {err:.3e}); "
                            "input is not a realization of c/p for this p", step=4, report=report)

    K = np.array(mini.A)
    ver = verify_detrep(p, K, n_min, samples, seed)
    report["verify"] = ver.to_dict()
    if ver.max_error > DETREP_TOL:
        raise PipelineError(f"det(I - K Z) differs from p (error {ver.max_error:.3e})", step=5, report=report)

    # det(I - A_min Z)(c/p)(Z) = D_min det(I - A^x_min Z) on sample points
    pts = _closed_ball_samples(shape, min(samples, 50), seed)
    pv = p.evaluate_many(pts)
    good = np.abs(pv) > 1e-8
    lhs = pencil_det_many(K, n_min, shape, pts[good]) * (c / pv[good])
    rhs = d0 * pencil_det_many(inv.A, n_min, shape, pts[good])
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    report["identity_error"] = float(np.max(np.abs(lhs - rhs) / np.maximum(scale, 1e-300), initial=0.0))
    report["norm_K"] = ver.norm_K
    report["strict"] = bool(ver.norm_K < 1)
    report["pass"] = bool(ok and ver.passed)
    return PipelineResult(K=K, n_min=n_min, report=report, minimal=mini)


def agler_reflection(p: MultiPoly, n, samples=100, seed=0):
    """Numerator ``q = z^n conj(p)(1/z)`` of the inner function ``q / p`` on a polydisk.

    Returns ``(q, report)``; the report carries the largest ``||q| - |p||``
    over ``samples`` random torus points.
    """
    shape = p.shape
    if not shape.is_polydisk:
        raise DimensionError("reflection is defined on polydisk shapes only", where=("shape",))
    n = shape.check_n(n)
    deg = p.degrees()
    if any(a < b for a, b in zip(n, deg)):
        raise ValueError(f"n={n} is below the multidegree {deg} of p")
    q = p.conj_reflect(n)
    rng = np.random.default_rng(seed)
    pts = np.exp(2j * np.pi * rng.uniform(size=(samples, shape.k)))
    gap = np.abs(np.abs(q.evaluate_many(pts)) - np.abs(p.evaluate_many(pts)))
    err = float(gap.max(initial=0.0))
    report = {"unimodular_error": err, "samples": samples, "tol": REFLECT_TOL, "pass": err <= REFLECT_TOL}
    return q, report
