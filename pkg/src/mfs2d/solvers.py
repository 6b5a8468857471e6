"""Solver backends for the Laplace Dirichlet problem: direct, qr, svd.

All three share one workflow: assemble a collocation matrix, solve in the
least-squares sense, then evaluate the approximation anywhere and measure
its boundary error.

direct  -- kernel basis as-is; matrix entry (i, j) is the fundamental
           solution at collocation point i, source j.  Simple and accurate
           until its conditioning blows up exponentially with N.
qr      -- sources restricted to a common circle; the trigonometric
           expansion matrix is QR-factorized and Hadamard-rescaled so the
           basis change stays well-scaled.  Conditioning grows more slowly
           than direct but still exponentially off the disk.
svd     -- sources anywhere outside the scaled boundary disk; the kernel
           expansion matrix is pushed through the Arnoldi coupling and an
           SVD; the rows of the right singular-vector block define a basis
           whose collocation matrix stays O(1)-conditioned at any N.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .arnoldi import ArnoldiFactor, arnoldi_vandermonde, coupling_matrix, evaluate_basis
from .errors import ConfigError, RankDeficiencyError, SingularityError
from .expansion import ExpansionSetup
from .geometry import (
    TWO_PI,
    BoundaryCurve,
    CollocationSet,
    Point2,
    SourceSet,
    wrap_angle,
)

_COINCIDENCE_RTOL = 1e-14


# --- boundary data -----------------------------------------------------------


class BoundaryData:
    """Named Dirichlet datum g(x, y), evaluable at arbitrary points."""

    def __init__(self, name: str, fn, params=None):
        self.name = name
        self._fn = fn
        self.params = dict(params or {})

    def values(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self._fn(pts[:, 0], pts[:, 1])

    def __call__(self, x, y):
        return self._fn(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def __repr__(self):
        return f"<BoundaryData {self.name}>"


def _harmonic_re(k):
    def fn(x, y):
        return ((x + 1j * y) ** k).real

    return fn


def make_boundary_data(name: str, **params) -> BoundaryData:
    """Catalog: x2y3, osc10, harmonic_k (takes integer k)."""
    if name == "x2y3":
        if params:
            raise ConfigError("x2y3 takes no parameters")
        return BoundaryData(name, lambda x, y: x**2 * y**3)
    if name == "osc10":
        if params:
            raise ConfigError("osc10 takes no parameters")
        return BoundaryData(name, lambda x, y: np.cos(10 * x) * np.sin(10 * y))
    if name == "harmonic_k":
        if set(params) != {"k"}:
            raise ConfigError("harmonic_k requires exactly the parameter k")
        k = int(params["k"])
        return BoundaryData(name, _harmonic_re(k), {"k": k})
    raise ConfigError(f"unknown boundary data {name!r}; known: x2y3, osc10, harmonic_k")


# --- records and bases -------------------------------------------------------


@dataclass
class SolveRecord:
    """Outcome of one least-squares solve.

    linf_boundary_error and max_imag_on_boundary stay NaN until
    boundary_error() fills them.  `context` keeps whatever the method needs
    to evaluate the solution later (sources for direct, basis otherwise).
    """

    method: str
    n_basis: int
    n_colloc: int
    coefficients: np.ndarray = field(repr=False)
    cond2: float
    runtime_ms: float
    linf_boundary_error: float = math.nan
    max_imag_on_boundary: float = math.nan
    context: object = field(default=None, repr=False)


@dataclass(frozen=True)
class SvdBasis:
    """Well-conditioned basis from the SVD of the coupled expansion matrix.

    Row n of `basis_coords` holds the coordinates of basis function n in the
    stacked Arnoldi frame (z block, then the w block without its duplicated
    constant); the rows are orthonormal.  Because the frame itself is
    uniformly well conditioned on the collocation set, the system matrix
    conditioning is bounded by the frame's, independent of N.
    """

    basis_coords: np.ndarray       # (N, 2p+1) rows of the right singular-vector block
    singular_values: np.ndarray    # (N,) descending
    z_factor: ArnoldiFactor
    w_factor: ArnoldiFactor
    scale_radius: float
    count: int
    degree: int
    colloc: CollocationSet = field(repr=False)

    def rows_at(self, radii, angles) -> np.ndarray:
        """Stacked frame values [q_z0..q_zp, q_w1..q_wp] at points, (n_pts, 2p+1)."""
        z = (np.asarray(radii, dtype=float) / self.scale_radius) * np.exp(
            1j * np.asarray(angles, dtype=float)
        )
        return np.hstack(
            [
                evaluate_basis(self.z_factor, z),
                evaluate_basis(self.w_factor, np.conj(z))[:, 1:],
            ]
        )


@dataclass(frozen=True)
class QrBasis:
    """Rescaled triangular transform mapping raw harmonic monomials to the basis.

    Basis function n at (r, theta) is row n of `transform` applied to
    [1, r cos(theta), r sin(theta), ..., r^p cos(p theta), r^p sin(p theta)].
    """

    transform: np.ndarray    # (N, 2p+1) real
    source_radius: float
    count: int
    degree: int


# --- direct backend ----------------------------------------------------------


def _pairwise_distances(points: np.ndarray, sources: np.ndarray) -> np.ndarray:
    return np.hypot(
        points[:, 0, None] - sources[None, :, 0],
        points[:, 1, None] - sources[None, :, 1],
    )


def assemble_direct(sources: SourceSet, colloc: CollocationSet) -> np.ndarray:
    """Collocation matrix of fundamental solutions, shape (M, N) complex.

    Raises
    ------
    SingularityError
        A collocation point coincides with a source (indices reported).
    """
    d = _pairwise_distances(colloc.points, sources.points)
    scale = max(1.0, float(np.max(sources.radii)))
    bad = np.argwhere(d < _COINCIDENCE_RTOL * scale)
    if bad.size:
        i, j = bad[0]
        raise SingularityError(f"collocation point {i} coincides with source {j}")
    return (-np.log(d) / (2.0 * math.pi)).astype(complex)


def solve_direct(a: np.ndarray, g_values, sources: Optional[SourceSet] = None) -> SolveRecord:
    """Least-squares solve of the direct collocation system."""
    g = np.asarray(g_values)
    t0 = time.perf_counter()
    coeff = linalg.lstsq(a, g)
    elapsed = (time.perf_counter() - t0) * 1e3
    return SolveRecord(
        method="direct",
        n_basis=a.shape[1],
        n_colloc=a.shape[0],
        coefficients=coeff,
        cond2=linalg.cond2(a),
        runtime_ms=elapsed,
        context=sources,
    )


# --- svd backend -------------------------------------------------------------


def build_svd_basis(
    setup: ExpansionSetup, colloc: CollocationSet, rank_tol: float = 0.0
) -> SvdBasis:
    """Construct the well-conditioned basis on the given collocation set.

    Runs independent Arnoldi factorizations on the scaled boundary nodes
    z_i = (r_i/R) e^{i theta_i} and their conjugates, couples them with the
    expansion matrix, and takes the SVD of the product; the right
    singular-vector rows define the new basis.

    The trailing singular values decay exponentially with the basis size
    (they mirror the conditioning of the kernel basis itself), which is
    harmless here because only the orthonormal rows are kept.  `rank_tol`
    therefore defaults to 0 and exists to flag structurally redundant
    sources: with e.g. duplicated source points the tail collapses to
    roundoff immediately and a small positive tolerance catches it.

    Raises
    ------
    RankDeficiencyError
        S[-1] <= rank_tol * S[0] (reports the trailing singular values).
    """
    n = setup.count
    p = setup.degree
    if 2 * p + 1 > colloc.count:
        raise ValueError(
            f"{colloc.count} collocation points cannot resolve 2*{p}+1 frame functions"
        )
    z = (colloc.radii / setup.scale_radius) * np.exp(1j * colloc.angles)
    z_factor = arnoldi_vandermonde(z, p)
    w_factor = arnoldi_vandermonde(np.conj(z), p)
    coupling = coupling_matrix(z_factor, w_factor)
    reduced = setup.matrix @ coupling.matrix    # (N, 2p+1)
    _, s, vh = linalg.svd_thin(reduced)
    if s[-1] <= rank_tol * s[0]:
        raise RankDeficiencyError(s[max(0, n - 3) :].tolist())
    return SvdBasis(
        basis_coords=vh[:n],
        singular_values=s[:n],
        z_factor=z_factor,
        w_factor=w_factor,
        scale_radius=setup.scale_radius,
        count=n,
        degree=p,
        colloc=colloc,
    )


def assemble_svd_system(basis: SvdBasis, colloc: CollocationSet) -> np.ndarray:
    """System matrix (M, N): stacked Arnoldi columns times the basis rows.

    The collocation set must be the one the basis was built on (the discrete
    inner product behind the Arnoldi factors lives on it).
    """
    if colloc is not basis.colloc and not (
        colloc.points.shape == basis.colloc.points.shape
        and np.array_equal(colloc.points, basis.colloc.points)
    ):
        raise ValueError("collocation set differs from the one used to build the basis")
    stacked = np.hstack([basis.z_factor.q, basis.w_factor.q[:, 1:]])
    return stacked @ basis.basis_coords.T


def solve_svd(basis: SvdBasis, a: np.ndarray, g_values) -> SolveRecord:
    """Complex least-squares solve in the well-conditioned basis."""
    g = np.asarray(g_values)
    t0 = time.perf_counter()
    coeff = linalg.lstsq(a, g.astype(complex))
    elapsed = (time.perf_counter() - t0) * 1e3
    return SolveRecord(
        method="svd",
        n_basis=a.shape[1],
        n_colloc=a.shape[0],
        coefficients=coeff,
        cond2=linalg.cond2(a),
        runtime_ms=elapsed,
        context=basis,
    )


# --- qr backend --------------------------------------------------------------


def _real_monomials(radii, angles, degree: int) -> np.ndarray:
    """[1, r cos t, r sin t, ..., r^p cos pt, r^p sin pt], shape (n, 2p+1)."""
    r = np.asarray(radii, dtype=float)
    th = np.asarray(angles, dtype=float)
    out = np.empty((r.shape[0], 2 * degree + 1))
    out[:, 0] = 1.0
    rm = np.ones_like(r)
    for m in range(1, degree + 1):
        rm = rm * r
        out[:, 2 * m - 1] = rm * np.cos(m * th)
        out[:, 2 * m] = rm * np.sin(m * th)
    return out


def build_qr_basis(sources: SourceSet, degree: int) -> QrBasis:
    """QR-and-rescale basis for sources on a common origin-centered circle.

    The trigonometric expansion matrix B (rows -1, -cos(m a_j), -sin(m a_j))
    is QR-factorized; the triangular factor is Hadamard-multiplied by the
    scale ratios d_m / d_k with d_0 = log(eps), d_m = eps^m / m (eps the
    reciprocal source radius), which keeps the basis change span-preserving
    while flattening the kernel's geometric decay.

    Raises
    ------
    ConfigError
        Sources not on a common circle (relative radius spread > 1e-9), or
        source radius 1 (the constant-block scale log(eps) vanishes).
    """
    n = sources.count
    p = int(degree)
    if 2 * p + 1 <= n:
        raise ValueError(f"degree {p} too small for {n} sources (need 2p+1 > N)")
    radius = float(np.mean(sources.radii))
    if np.max(np.abs(sources.radii - radius)) > 1e-9 * radius:
        raise ConfigError("qr backend requires all sources on a common circle")
    eps = 1.0 / radius
    if eps == 1.0:
        raise ConfigError("qr backend is undefined for source radius exactly 1")

    m = np.arange(1, p + 1)
    b = np.empty((n, 2 * p + 1))
    b[:, 0] = -1.0
    ang = np.outer(sources.angles, m)
    b[:, 1::2] = -np.cos(ang)
    b[:, 2::2] = -np.sin(ang)
    _, r = np.linalg.qr(b)    # reduced: r is (N, 2p+1)

    d = np.empty(2 * p + 1)
    d[0] = math.log(eps)
    d[1::2] = eps**m / m
    d[2::2] = d[1::2]
    scale = d[None, :] / d[:n, None]
    return QrBasis(transform=scale * r, source_radius=radius, count=n, degree=p)


def assemble_qr_system(basis: QrBasis, colloc: CollocationSet) -> np.ndarray:
    """System matrix (M, N): raw monomials at the collocation points times the transform."""
    feats = _real_monomials(colloc.radii, colloc.angles, basis.degree)
    return (feats @ basis.transform.T).astype(complex)


def assemble_qr(sources: SourceSet, colloc: CollocationSet, degree: int) -> np.ndarray:
    """One-shot qr-backend assembly (build_qr_basis + assemble_qr_system)."""
    return assemble_qr_system(build_qr_basis(sources, degree), colloc)


def solve_qr(basis: QrBasis, a: np.ndarray, g_values) -> SolveRecord:
    g = np.asarray(g_values)
    t0 = time.perf_counter()
    coeff = linalg.lstsq(a, g.astype(complex))
    elapsed = (time.perf_counter() - t0) * 1e3
    return SolveRecord(
        method="qr",
        n_basis=a.shape[1],
        n_colloc=a.shape[0],
        coefficients=coeff,
        cond2=linalg.cond2(a),
        runtime_ms=elapsed,
        context=basis,
    )


# --- evaluation and error measurement ---------------------------------------


def _as_points(points) -> np.ndarray:
    if isinstance(points, Point2):
        return points.as_array()[None, :]
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    return pts


def _evaluate_complex(record: SolveRecord, context, points: np.ndarray) -> np.ndarray:
    radii = np.hypot(points[:, 0], points[:, 1])
    angles = wrap_angle(np.arctan2(points[:, 1], points[:, 0]))
    if record.method == "direct":
        if not isinstance(context, SourceSet):
            raise ValueError("direct evaluation needs the SourceSet")
        d = _pairwise_distances(points, context.points)
        return (-np.log(d) / (2.0 * math.pi)) @ record.coefficients
    if record.method == "svd":
        if not isinstance(context, SvdBasis):
            raise ValueError("svd evaluation needs the SvdBasis")
        rows = context.rows_at(radii, angles)
        return rows @ (context.basis_coords.T @ record.coefficients)
    if record.method == "qr":
        if not isinstance(context, QrBasis):
            raise ValueError("qr evaluation needs the QrBasis")
        feats = _real_monomials(radii, angles, context.degree)
        return (feats @ context.transform.T) @ record.coefficients
    raise ValueError(f"unknown method {record.method!r}")


def evaluate_solution(record: SolveRecord, context, points):
    """Real part of the approximation at the given point(s).

    `context` is the sources (direct) or basis (qr/svd); None falls back to
    the one stored on the record.  Accepts a Point2, a pair, or an (n, 2)
    array; returns a scalar for a single point.
    """
    ctx = record.context if context is None else context
    pts = _as_points(points)
    vals = _evaluate_complex(record, ctx, pts).real
    if isinstance(points, Point2) or np.asarray(points).ndim == 1:
        return float(vals[0])
    return vals


def boundary_error(
    record: SolveRecord, curve: BoundaryCurve, data: BoundaryData, count: int = 10001
) -> float:
    """Max |u - g| over `count` uniform-parameter boundary points.

    Also records the largest imaginary residue of the complex evaluation on
    the record.  Uses the record's stored evaluation context.
    """
    if record.context is None:
        raise ValueError("record has no stored evaluation context")
    t = TWO_PI * np.arange(1, count + 1) / count
    pts = curve.point(t)
    vals = _evaluate_complex(record, record.context, pts)
    err = float(np.max(np.abs(vals.real - data.values(pts))))
    record.linf_boundary_error = err
    record.max_imag_on_boundary = float(np.max(np.abs(vals.imag)))
    return err
