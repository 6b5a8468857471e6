"""Vandermonde-with-Arnoldi orthogonalization and Hessenberg evaluation.

Orthonormalizes the monomial sequence 1, x, x^2, ... on a fixed node set
without ever forming the (exponentially ill-conditioned) Vandermonde matrix.
Starting from q0 = ones/sqrt(M), each step multiplies by diag(nodes) and
orthogonalizes (modified Gram-Schmidt with one reorthogonalization pass),
producing orthonormal columns Q and a Hessenberg H with

    diag(nodes) @ Q[:, :-1] = Q @ H.

The upper-triangular coordinates R of the monomials in the Q basis follow
from the same recurrence (column k+1 of the Vandermonde matrix is
diag(nodes) times column k), so R never touches the Vandermonde matrix
either.  The basis extends to arbitrary new points by replaying the
Hessenberg recurrence.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNodesError


@dataclass(frozen=True)
class ArnoldiFactor:
    """Arnoldi data for one node set: Q (M, n+1), H (n+1, n), R (n+1, n+1)."""

    nodes: np.ndarray
    q: np.ndarray
    h: np.ndarray
    r: np.ndarray
    degree: int

    @property
    def node_count(self) -> int:
        return self.nodes.shape[0]


@dataclass(frozen=True)
class CouplingMatrix:
    """Square matrix expressing monomial features in the stacked Arnoldi frame.

    For factors of degree p on nodes z and w = conj(z), the feature vector
    [1, z..z^p, w..w^p] equals `matrix` (shape (2p+1, 2p+1)) applied to the
    stacked basis values [q_z0..q_zp, q_w1..q_wp].  Both Arnoldi runs start
    from the same constant vector, so the w-side constant column duplicates
    the z-side one; the frame keeps a single copy and the w-monomial rows
    route their constant coordinate through it.  That makes the frame full
    column rank and `matrix` invertible (block triangular with nonsingular
    triangular diagonal blocks).
    """

    matrix: np.ndarray
    degree: int


def arnoldi_vandermonde(nodes, degree: int) -> ArnoldiFactor:
    """Orthonormalize monomials of the given degree on the nodes.

    Parameters
    ----------
    nodes : complex array, shape (M,)
    degree : int
        Highest monomial power n; requires n + 1 <= M.

    Raises
    ------
    ValueError
        degree + 1 > node count, or non-finite nodes.
    DegenerateNodesError
        Breakdown: the next direction has norm below 1e-14 * max|nodes|,
        meaning the nodes cannot support the requested degree.
    """
    x = np.asarray(nodes, dtype=complex).ravel()
    m = x.shape[0]
    n = int(degree)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n + 1 > m:
        raise ValueError(f"degree {n} needs at least {n + 1} nodes, got {m}")
    if not np.all(np.isfinite(x)):
        raise ValueError("nodes must be finite")
    scale = float(np.max(np.abs(x))) if m else 0.0

    q = np.empty((m, n + 1), dtype=complex)
    h = np.zeros((n + 1, n), dtype=complex)
    q[:, 0] = 1.0 / np.sqrt(m)
    for k in range(n):
        v = x * q[:, k]
        coeffs = np.zeros(k + 1, dtype=complex)
        for _ in range(2):    # MGS + one reorthogonalization pass
            for i in range(k + 1):
                c = np.vdot(q[:, i], v)
                v -= c * q[:, i]
                coeffs[i] += c
        norm = float(np.linalg.norm(v))
        if norm == 0.0 or norm < 1e-14 * scale:
            raise DegenerateNodesError(k)
        h[: k + 1, k] = coeffs
        h[k + 1, k] = norm
        q[:, k + 1] = v / norm

    r = np.zeros((n + 1, n + 1), dtype=complex)
    r[0, 0] = np.sqrt(m)
    for k in range(n):
        r[: k + 2, k + 1] = h[: k + 2, : k + 1] @ r[: k + 1, k]
    return ArnoldiFactor(nodes=x, q=q, h=h, r=r, degree=n)


def evaluate_basis(factor: ArnoldiFactor, new_nodes) -> np.ndarray:
    """Evaluate the orthonormal polynomial basis at new points.

    Replays the Hessenberg recurrence with the stored coefficients, starting
    from the same constant 1/sqrt(M) used at construction, so feeding the
    original nodes back reproduces Q.  Returns shape (n_points, degree + 1).
    """
    x = np.asarray(new_nodes, dtype=complex).ravel()
    n = factor.degree
    out = np.empty((x.shape[0], n + 1), dtype=complex)
    out[:, 0] = 1.0 / np.sqrt(factor.node_count)
    for k in range(n):
        sub = factor.h[k + 1, k]
        if sub == 0.0:
            raise ValueError(f"zero Hessenberg subdiagonal at step {k}")
        v = x * out[:, k] - out[:, : k + 1] @ factor.h[: k + 1, k]
        out[:, k + 1] = v / sub
    return out


def coupling_matrix(z_factor: ArnoldiFactor, w_factor: ArnoldiFactor) -> CouplingMatrix:
    """Assemble the feature-to-stacked-frame coupling for conjugate node blocks."""
    p = z_factor.degree
    if w_factor.degree != p:
        raise ValueError("z and w factors must have equal degree")
    k = np.zeros((2 * p + 1, 2 * p + 1), dtype=complex)
    k[: p + 1, : p + 1] = z_factor.r.T
    if p > 0:
        k[p + 1 :, 0] = w_factor.r[0, 1:]
        k[p + 1 :, p + 1 :] = w_factor.r[1:, 1:].T
    return CouplingMatrix(matrix=k, degree=p)
