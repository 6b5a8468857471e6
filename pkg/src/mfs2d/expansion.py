"""Log-kernel expansion in scaled harmonic monomials.

A log kernel centered at an exterior source point with polar coordinates
(rho_j, alpha_j) expands, for boundary points (r, theta) with r <= R (the
maximum boundary radius), as

    log|x - y_j| = log(rho_j)
                   - sum_{m>=1} (r/R)^m (R/rho_j)^m
                     (e^{im theta} e^{-im alpha_j} + e^{-im theta} e^{im alpha_j}) / (2m).

The series converges geometrically with ratio q = max_j R/rho_j < 1; the
truncation order is chosen so the tail, bounded by q^{p+1} * Phi(q, 1, p+1)
with Phi the Hurwitz-Lerch transcendent at s=1, drops below a tolerance.
The expansion matrix maps the monomial feature vector

    F(r, theta) = [1, z, ..., z^p, w, ..., w^p],  z = (r/R) e^{i theta}, w = conj(z)

to the vector of kernel values for all sources.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConstraintViolationError, SingularityError
from .geometry import Point2, SourceSet

MACHINE_EPS = float(np.finfo(np.float64).eps)


def _coords(p) -> np.ndarray:
    if isinstance(p, Point2):
        return p.as_array()
    a = np.asarray(p, dtype=float)
    if a.shape != (2,):
        raise ValueError("expected a point with two coordinates")
    return a


def log_kernel(x, y) -> float:
    """log of the Euclidean distance |x - y|.

    Raises
    ------
    SingularityError
        Coincident points.
    """
    d = float(np.hypot(*(_coords(x) - _coords(y))))
    if d == 0.0:
        raise SingularityError("log kernel evaluated at coincident points")
    return math.log(d)


def fundamental_solution(x, y) -> float:
    """-log|x - y| / (2*pi), the 2D Laplace fundamental solution."""
    return -log_kernel(x, y) / (2.0 * math.pi)


def hurwitz_lerch_phi1(z: float, a: int) -> float:
    """Hurwitz-Lerch transcendent Phi(z, 1, a) = sum_{k>=0} z^k / (a + k).

    Terms are accumulated until one falls below 1e-18 of the running sum,
    then the collected terms are combined with exact summation.
    """
    if not 0.0 <= z < 1.0:
        raise ValueError("z must lie in [0, 1)")
    a = int(a)
    if a < 1:
        raise ValueError("a must be a positive integer")
    if z == 0.0:
        return 1.0 / a
    terms = []
    partial = 0.0
    zk = 1.0
    k = 0
    while True:
        term = zk / (a + k)
        terms.append(term)
        partial += term
        if term < 1e-18 * partial:
            break
        zk *= z
        k += 1
    return math.fsum(terms)


def truncation_order(ratio: float, tol: float) -> int:
    """Smallest p0 >= 0 with ratio^(p0+1) * Phi(ratio, 1, p0+1) <= tol.

    The left side is strictly decreasing in p0, so the search increments
    from zero.  `ratio` is the geometric decay factor max_j R/rho_j.
    """
    if not 0.0 < ratio < 1.0:
        raise ConstraintViolationError(
            1.0 - ratio, f"series ratio must lie in (0, 1), got {ratio:.6g}"
        )
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    p0 = 0
    while ratio ** (p0 + 1) * hurwitz_lerch_phi1(ratio, p0 + 1) > tol:
        p0 += 1
    return p0


def expansion_degree(p0: int, n_basis: int) -> int:
    """Final truncation degree max(p0, ceil((n_basis - 1) / 2)).

    Guarantees 2p+1 >= n_basis, so the monomial feature space is at least as
    large as the kernel basis.
    """
    if p0 < 0:
        raise ValueError("p0 must be nonnegative")
    if n_basis < 1:
        raise ValueError("n_basis must be >= 1")
    return max(int(p0), n_basis // 2)    # ceil((n-1)/2) == n//2


def _powers(z: np.ndarray, p: int) -> np.ndarray:
    """Columns z^1 .. z^p, shape (len(z), p)."""
    out = np.empty((z.shape[0], p), dtype=complex)
    if p == 0:
        return out
    out[:, 0] = z
    for m in range(1, p):
        out[:, m] = out[:, m - 1] * z
    return out


def harmonic_monomials(radii, angles, scale_radius: float, degree: int) -> np.ndarray:
    """Feature matrix [1, z..z^p, w..w^p] with z = (r/R) e^{i theta}, w = conj(z).

    Returns shape (n_points, 2*degree + 1).
    """
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    th = np.atleast_1d(np.asarray(angles, dtype=float))
    z = (r / scale_radius) * np.exp(1j * th)
    zp = _powers(z, degree)
    out = np.empty((r.shape[0], 2 * degree + 1), dtype=complex)
    out[:, 0] = 1.0
    out[:, 1 : degree + 1] = zp
    out[:, degree + 1 :] = np.conj(zp)
    return out


@dataclass(frozen=True)
class ExpansionSetup:
    """Truncated expansion of all source kernels in scaled harmonic monomials.

    `matrix` has one row per source and columns matching harmonic_monomials:
    column 0 holds log(rho_j), the z-power block holds
    -(R/rho_j)^m e^{-im alpha_j} / (2m) and the w-power block its conjugate.
    """

    scale_radius: float
    base_order: Optional[int]    # tolerance-driven order before the degree floor
    degree: int
    matrix: np.ndarray           # (N, 2*degree + 1) complex
    sources: SourceSet

    @property
    def count(self) -> int:
        return self.sources.count

    def kernel_values(self, radii, angles) -> np.ndarray:
        """Expanded log-kernel values, shape (N, n_points)."""
        feats = harmonic_monomials(radii, angles, self.scale_radius, self.degree)
        return self.matrix @ feats.T


def expansion_matrix(
    sources: SourceSet,
    scale_radius: float,
    degree: int,
    base_order: Optional[int] = None,
) -> ExpansionSetup:
    """Build the (N, 2*degree+1) expansion matrix for the given sources.

    Raises
    ------
    ConstraintViolationError
        Some source lies inside the origin-centered disk of radius
        `scale_radius`, carrying the (negative) margin.
    """
    ratios = scale_radius / sources.radii
    margin = 1.0 - float(np.max(ratios))
    if margin <= 0.0:
        raise ConstraintViolationError(margin)
    n = sources.count
    if 2 * degree + 1 < n:
        raise ValueError(f"degree {degree} too small for {n} sources (need 2p+1 >= N)")
    m = np.arange(1, degree + 1)
    decay = ratios[:, None] ** m[None, :] / (2.0 * m[None, :])
    phase = np.exp(-1j * np.outer(sources.angles, m))
    zblock = -decay * phase
    mat = np.empty((n, 2 * degree + 1), dtype=complex)
    mat[:, 0] = np.log(sources.radii)
    mat[:, 1 : degree + 1] = zblock
    mat[:, degree + 1 :] = np.conj(zblock)
    return ExpansionSetup(
        scale_radius=float(scale_radius),
        base_order=base_order,
        degree=int(degree),
        matrix=mat,
        sources=sources,
    )


def setup_expansion(
    sources: SourceSet,
    scale_radius: float,
    n_basis: int,
    tol: float = MACHINE_EPS,
    max_degree: Optional[int] = None,
) -> ExpansionSetup:
    """Choose the truncation degree for the given tolerance and build the matrix.

    `max_degree` caps the degree: M collocation points can resolve at most M
    stacked frame functions, so solvers pass (M - 1) // 2 to keep
    2*degree + 1 <= M.  The cap only binds when the tolerance-driven order
    exceeds it, and the un-representable kernel tail it leaves behind is
    geometrically small (of order ratio^max_degree).
    """
    ratio = float(np.max(scale_radius / sources.radii))
    p0 = truncation_order(ratio, tol)
    p = expansion_degree(p0, n_basis)
    if max_degree is not None and p > max_degree:
        p = int(max_degree)
        if 2 * p + 1 < n_basis:
            raise ValueError(
                f"degree cap {max_degree} leaves fewer than {n_basis} features"
            )
    return expansion_matrix(sources, scale_radius, p, base_order=p0)
