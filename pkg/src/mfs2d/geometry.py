"""Closed planar boundary curves and point sampling.

Provides the fixed curve catalog used by the solvers and benchmarks,
uniform-parameter sampling of collocation and source points, the maximum
boundary radius used to scale harmonic monomials, and the geometric
separation check that the series expansion of the log kernel requires.

All curves are parametrized over t in [0, 2*pi) and are closed.  Catalog
curves are smooth and star shaped; construction runs a cheap sanity check
(positive radius for radial curves, positive distance from the origin for
parametric ones) but no global self-intersection test.
"""

import math
import re
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConfigError, DegenerateCurveError

TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Map angles into [0, 2*pi); rounding can push np.mod output onto 2*pi."""
    b = np.mod(a, TWO_PI)
    return np.where(b >= TWO_PI, 0.0, b)


@dataclass(frozen=True)
class Point2:
    """A point in the plane with derived polar coordinates."""

    x: float
    y: float

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def theta(self) -> float:
        """Polar angle mapped into [0, 2*pi)."""
        a = math.atan2(self.y, self.x)
        if a < 0.0:
            a += TWO_PI
        return 0.0 if a >= TWO_PI else a

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def _as_param_array(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("curve parameter must be finite")
    return t


class BoundaryCurve:
    """Base class for closed curves; subclasses implement point/tangent."""

    name = "curve"

    def point(self, t):
        """Curve point(s) at parameter t; shape (..., 2)."""
        raise NotImplementedError

    def tangent(self, t):
        """Derivative of point with respect to t; shape (..., 2)."""
        raise NotImplementedError

    def interior_point(self) -> np.ndarray:
        """A reference point inside the enclosed region (used to orient normals)."""
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class Circle(BoundaryCurve):
    def __init__(self, center=(0.0, 0.0), radius=1.0):
        if radius <= 0.0:
            raise ValueError("circle radius must be positive")
        self.center = np.array(center, dtype=float)
        self.radius = float(radius)
        self.name = "circle"

    def point(self, t):
        t = _as_param_array(t)
        return self.center + self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def tangent(self, t):
        t = _as_param_array(t)
        return self.radius * np.stack([-np.sin(t), np.cos(t)], axis=-1)

    def interior_point(self):
        return self.center.copy()


class PolarCurve(BoundaryCurve):
    """Curve r(t)*(cos t, sin t) for a positive radial function."""

    def __init__(self, name: str, radial: Callable, radial_deriv: Callable):
        self.name = name
        self.radial = radial
        self.radial_deriv = radial_deriv
        grid = np.linspace(0.0, TWO_PI, 1024, endpoint=False)
        if np.min(radial(grid)) <= 0.0:
            raise DegenerateCurveError(f"radial function of '{name}' is not positive")

    def point(self, t):
        t = _as_param_array(t)
        r = self.radial(t)
        return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)

    def tangent(self, t):
        t = _as_param_array(t)
        r = self.radial(t)
        dr = self.radial_deriv(t)
        c, s = np.cos(t), np.sin(t)
        return np.stack([dr * c - r * s, dr * s + r * c], axis=-1)

    def interior_point(self):
        return np.zeros(2)


class ParametricCurve(BoundaryCurve):
    """Curve (x(t), y(t)) given by explicit coordinate functions."""

    def __init__(self, name, fx, fy, dfx, dfy):
        self.name = name
        self._fx, self._fy, self._dfx, self._dfy = fx, fy, dfx, dfy
        grid = np.linspace(0.0, TWO_PI, 1024, endpoint=False)
        pts = self.point(grid)
        if np.min(np.hypot(pts[:, 0], pts[:, 1])) <= 0.0:
            raise DegenerateCurveError(f"curve '{name}' passes through the origin")
        self._interior = pts.mean(axis=0)

    def point(self, t):
        t = _as_param_array(t)
        return np.stack([self._fx(t), self._fy(t)], axis=-1)

    def tangent(self, t):
        t = _as_param_array(t)
        return np.stack([self._dfx(t), self._dfy(t)], axis=-1)

    def interior_point(self):
        return self._interior.copy()


class OffsetCurve(BoundaryCurve):
    """Base curve displaced by a fixed distance along its outward normal."""

    def __init__(self, base: BoundaryCurve, rho: float):
        if rho <= 0.0:
            raise ValueError("offset distance rho must be positive")
        self.base = base
        self.rho = float(rho)
        self.name = f"offset({base.name}, rho={rho:g})"

    def point(self, t):
        t = _as_param_array(t)
        return self.base.point(t) + self.rho * outward_normal(self.base, t)

    def tangent(self, t):
        # The analytic tangent would need curvature of the base; a fourth-order
        # central difference of point() is accurate to ~1e-11 and is only ever
        # needed when an offset curve is itself offset or queried for normals.
        t = _as_param_array(t)
        h = 1e-5
        return (
            8.0 * (self.point(t + h) - self.point(t - h))
            - (self.point(t + 2 * h) - self.point(t - 2 * h))
        ) / (12.0 * h)

    def interior_point(self):
        return self.base.interior_point()


# --- catalog radial / coordinate functions ---------------------------------


def _star_kite_r(t):
    return (np.cos(4 * t) + np.sqrt(3.6 - np.sin(4 * t) ** 2)) ** (1.0 / 3.0)


def _star_kite_dr(t):
    s4 = np.sin(4 * t)
    root = np.sqrt(3.6 - s4**2)
    inner = np.cos(4 * t) + root
    dinner = -4.0 * s4 * (1.0 + np.cos(4 * t) / root)
    return dinner / (3.0 * inner ** (2.0 / 3.0))


def _osc_r(c0):
    def r(t):
        return c0 + np.cos(6 * t) / 5.0 + np.cos(3 * t) / 10.0

    def dr(t):
        return -1.2 * np.sin(6 * t) - 0.3 * np.sin(3 * t)

    return r, dr


def _eta1_r(t):
    return 1.0 + np.cos(3 * t) / 5.0


def _eta1_dr(t):
    return -0.6 * np.sin(3 * t)


def _eta2_x(t):
    return np.cos(t) * (1.0 - np.sin(2 * t) / 2.0)


def _eta2_y(t):
    return np.sin(t) + np.cos(4 * t) / 6.0


def _eta2_dx(t):
    return -np.sin(t) * (1.0 - np.sin(2 * t) / 2.0) - np.cos(t) * np.cos(2 * t)


def _eta2_dy(t):
    return np.cos(t) - 2.0 * np.sin(4 * t) / 3.0


def _gamma(t):
    return np.exp(np.sin(t)) * np.sin(2 * t) ** 2 + np.exp(np.cos(t)) * np.cos(2 * t) ** 2


def _dgamma(t):
    return np.exp(np.sin(t)) * (np.cos(t) * np.sin(2 * t) ** 2 + 2.0 * np.sin(4 * t)) + np.exp(
        np.cos(t)
    ) * (-np.sin(t) * np.cos(2 * t) ** 2 - 2.0 * np.sin(4 * t))


def _gamma_blob_x(t):
    return 4.0 * _gamma(t) * np.cos(t) - 1.0


def _gamma_blob_y(t):
    return 4.0 * _gamma(t) * np.sin(t) - 1.0


def _gamma_blob_dx(t):
    return 4.0 * (_dgamma(t) * np.cos(t) - _gamma(t) * np.sin(t))


def _gamma_blob_dy(t):
    return 4.0 * (_dgamma(t) * np.sin(t) + _gamma(t) * np.cos(t))


def _make_circle(radius=1.0, cx=0.0, cy=0.0):
    return Circle(center=(cx, cy), radius=radius)


def _make_ellipse(a=2.0, b=1.5):
    if a <= 0.0 or b <= 0.0:
        raise ValueError("ellipse semi-axes must be positive")
    return ParametricCurve(
        "ellipse",
        lambda t: a * np.cos(t),
        lambda t: b * np.sin(t),
        lambda t: -a * np.sin(t),
        lambda t: b * np.cos(t),
    )


_CATALOG = {
    "circle": (_make_circle, {"radius", "cx", "cy"}),
    "ellipse": (_make_ellipse, {"a", "b"}),
    "star_kite": (lambda: PolarCurve("star_kite", _star_kite_r, _star_kite_dr), set()),
    "gamma_blob": (
        lambda: ParametricCurve(
            "gamma_blob", _gamma_blob_x, _gamma_blob_y, _gamma_blob_dx, _gamma_blob_dy
        ),
        set(),
    ),
    "osc_r1": (lambda: PolarCurve("osc_r1", *_osc_r(1.2)), set()),
    "osc_art": (lambda: PolarCurve("osc_art", *_osc_r(2.0)), set()),
    "eta1": (lambda: PolarCurve("eta1", _eta1_r, _eta1_dr), set()),
    "eta2": (lambda: ParametricCurve("eta2", _eta2_x, _eta2_y, _eta2_dx, _eta2_dy), set()),
}

_OFFSET_RE = re.compile(r"^offset\(\s*([a-z0-9_]+)\s*,\s*rho\s*=\s*([^\s,)]+)\s*\)$")


def curve_names():
    """Names accepted by make_curve (offset curves use 'offset(<base>, rho=<v>)')."""
    return sorted(_CATALOG)


def make_curve(name: str, **params) -> BoundaryCurve:
    """Build a catalog curve by name.

    Parameters
    ----------
    name : str
        One of the catalog names, or the form ``offset(<base>, rho=<val>)``.
    **params
        Numeric parameters for parameterized catalog entries
        (circle: radius, cx, cy; ellipse: a, b).

    Raises
    ------
    ConfigError
        Unknown name or parameter not supported by the named curve.
    """
    name = name.strip()
    m = _OFFSET_RE.match(name)
    if m:
        if params:
            raise ConfigError("offset(...) form does not take extra parameters")
        base = make_curve(m.group(1))
        try:
            rho = float(m.group(2))
        except ValueError:
            raise ConfigError(f"bad rho value in {name!r}") from None
        return OffsetCurve(base, rho)
    if name not in _CATALOG:
        raise ConfigError(f"unknown curve {name!r}; known: {', '.join(curve_names())}")
    factory, allowed = _CATALOG[name]
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"curve {name!r} does not accept parameters {sorted(unknown)}")
    return factory(**{k: float(v) for k, v in params.items()})


# --- point sets -------------------------------------------------------------


@dataclass(frozen=True)
class CollocationSet:
    """Boundary points at stored parameters, with polar coordinates."""

    points: np.ndarray    # (M, 2)
    params: np.ndarray    # (M,)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def radii(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    @property
    def angles(self) -> np.ndarray:
        return wrap_angle(np.arctan2(self.points[:, 1], self.points[:, 0]))


@dataclass(frozen=True)
class SourceSet:
    """Exterior source points with polar data (radius, angle) per point."""

    points: np.ndarray    # (N, 2)
    params: np.ndarray    # (N,)
    radii: np.ndarray     # (N,) distances from the origin
    angles: np.ndarray    # (N,) in [0, 2*pi)

    @property
    def count(self) -> int:
        return self.points.shape[0]


class ConstraintCheck(NamedTuple):
    ok: bool
    margin: float


def boundary_point(curve: BoundaryCurve, t: float) -> Point2:
    """Single curve point at parameter t."""
    p = curve.point(float(t))
    return Point2(float(p[0]), float(p[1]))


def outward_normal(curve: BoundaryCurve, t):
    """Unit outward normal(s) at parameter t.

    The tangent is rotated by -pi/2 and the sign fixed so the normal points
    away from the curve's interior reference point.

    Raises
    ------
    DegenerateCurveError
        Zero tangent vector at t.
    """
    t = _as_param_array(t)
    tg = curve.tangent(t)
    norm = np.linalg.norm(tg, axis=-1, keepdims=True)
    if np.any(norm == 0.0):
        raise DegenerateCurveError(f"zero tangent on '{curve.name}'")
    n = np.stack([tg[..., 1], -tg[..., 0]], axis=-1) / norm
    outward = curve.point(t) - curve.interior_point()
    flip = np.sum(n * outward, axis=-1) < 0.0
    return np.where(flip[..., None], -n, n)


def _uniform_params(count: int) -> np.ndarray:
    return TWO_PI * np.arange(1, count + 1) / count


def sample_collocation(curve: BoundaryCurve, count: int) -> CollocationSet:
    """Sample `count` boundary points at uniform parameters t_i = 2*pi*i/count."""
    if count < 1:
        raise ValueError("collocation count must be >= 1")
    params = _uniform_params(int(count))
    return CollocationSet(points=curve.point(params), params=params)


def sample_sources(curve: BoundaryCurve, count: int) -> SourceSet:
    """Sample `count` source points on the given curve at uniform parameters."""
    if count < 1:
        raise ValueError("source count must be >= 1")
    params = _uniform_params(int(count))
    pts = curve.point(params)
    radii = np.hypot(pts[:, 0], pts[:, 1])
    if np.any(radii == 0.0):
        raise DegenerateCurveError("source point at the origin has no polar angle")
    angles = wrap_angle(np.arctan2(pts[:, 1], pts[:, 0]))
    return SourceSet(points=pts, params=params, radii=radii, angles=angles)


def max_boundary_radius(curve: BoundaryCurve, samples: int = 2048) -> float:
    """Maximum distance of the curve from the origin.

    A dense uniform parameter grid locates the maximizer; golden-section
    refinement on the bracketing interval tightens it to ~1e-12 in parameter,
    giving a lower bound tight to ~1e-10 relative for smooth curves.
    """
    if samples < 256:
        raise ValueError("samples must be >= 256")
    grid = np.linspace(0.0, TWO_PI, int(samples), endpoint=False)
    pts = curve.point(grid)
    norms = np.hypot(pts[:, 0], pts[:, 1])
    k = int(np.argmax(norms))
    h = TWO_PI / samples

    def f(t):
        p = curve.point(t)
        return math.hypot(p[0], p[1])

    a, b = grid[k] - h, grid[k] + h
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if b - a < 1e-13:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return max(float(norms[k]), fc, fd)


def check_source_constraint(sources: SourceSet, boundary_radius: float) -> ConstraintCheck:
    """Separation margin 1 - max_j (boundary_radius / rho_j).

    Positive margin means every source lies outside the closed origin-centered
    disk that contains the boundary, which guarantees convergence of the
    log-kernel series expansion on the domain.
    """
    if boundary_radius <= 0.0:
        raise ValueError("boundary_radius must be positive")
    margin = 1.0 - float(np.max(boundary_radius / sources.radii))
    return ConstraintCheck(ok=margin > 0.0, margin=margin)
