"""Exact hyperbolic geometry of the Poincare disc.

Points live in X = {|z| < 1} with the metric 4(1-|z|^2)^-2 |dz|^2
(curvature -1). Geodesics are circle arcs orthogonal to the unit circle;
orientation-preserving isometries are the Mobius maps

    z -> (a z + b) / (conj(b) z + conj(a)),    |a|^2 - |b|^2 = 1.

``hyperbolic_distance`` is the single closed-form distance oracle for the
whole package; nothing else re-derives it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

BOUNDARY_MARGIN = 1e-12   # constructors reject |z| >= 1 - this
EPS_BDRY = 1e-3           # default boundary proximity for endpoint estimates
_TWO_PI = 2.0 * math.pi


class DegenerateEndpoints(ValueError):
    """Geodesic requested between coincident endpoints."""


class NotNearBoundary(RuntimeError):
    """Path does not reach the boundary closely enough to read off a direction."""


def _as_complex(p) -> complex:
    """Accept DiscPoint, complex or real scalars."""
    if isinstance(p, DiscPoint):
        return p.z
    return complex(p)


@dataclass(frozen=True)
class DiscPoint:
    re: float
    im: float

    def __post_init__(self):
        r = math.hypot(self.re, self.im)
        if not (r < 1.0 - BOUNDARY_MARGIN):
            raise ValueError(f"point with |z| = {r!r} is not inside the disc")
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("non-finite coordinates")

    @classmethod
    def from_complex(cls, z) -> "DiscPoint":
        z = complex(z)
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self) -> complex:
        return self.z


@dataclass(frozen=True)
class TangentVector:
    base: DiscPoint
    dre: float
    dim: float
    unit: bool = False   # asserts F(v) = 1 (within 1e-9) for the metric it was built for

    def __post_init__(self):
        if not (math.isfinite(self.dre) and math.isfinite(self.dim)):
            raise ValueError("non-finite fiber components")

    @classmethod
    def from_complex(cls, z, w, unit: bool = False) -> "TangentVector":
        w = complex(w)
        return cls(DiscPoint.from_complex(z), w.real, w.imag, unit)

    @property
    def w(self) -> complex:
        return complex(self.dre, self.dim)


def normalize_angle(theta: float) -> float:
    """Map to [0, 2*pi)."""
    t = math.fmod(theta, _TWO_PI)
    return t + _TWO_PI if t < 0.0 else t


@dataclass(frozen=True, order=False)
class BoundaryDirection:
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", normalize_angle(self.angle))

    @classmethod
    def from_complex(cls, xi) -> "BoundaryDirection":
        return cls(cmath.phase(complex(xi)))

    @property
    def xi(self) -> complex:
        return cmath.rect(1.0, self.angle)

    def ccw_distance_to(self, other: "BoundaryDirection") -> float:
        """Counterclockwise arc length from self to other, in [0, 2*pi)."""
        return normalize_angle(other.angle - self.angle)

    def separation(self, other: "BoundaryDirection") -> float:
        """Circular distance, in [0, pi]."""
        d = self.ccw_distance_to(other)
        return min(d, _TWO_PI - d)


def ccw_between(a: BoundaryDirection, b: BoundaryDirection, c: BoundaryDirection) -> bool:
    """True if b lies strictly in the counterclockwise arc from a to c."""
    return 0.0 < a.ccw_distance_to(b) < a.ccw_distance_to(c)


def hyperbolic_distance(x, y) -> float:
    """d_h(x, y) = acosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2))).

    The package's single distance oracle.
    """
    zx, zy = _as_complex(x), _as_complex(y)
    num = 2.0 * abs(zx - zy) ** 2
    den = (1.0 - abs(zx) ** 2) * (1.0 - abs(zy) ** 2)
    return math.acosh(1.0 + num / den)


def hyperbolic_distance_many(zs: np.ndarray, w) -> np.ndarray:
    """Vectorized d_h between an array of points and one point (or array)."""
    zs = np.asarray(zs, dtype=complex)
    wz = np.asarray(w, dtype=complex) if isinstance(w, np.ndarray) else _as_complex(w)
    num = 2.0 * np.abs(zs - wz) ** 2
    den = (1.0 - np.abs(zs) ** 2) * (1.0 - np.abs(wz) ** 2)
    return np.arccosh(1.0 + num / den)


@dataclass(frozen=True)
class MobiusMap:
    """Isometry z -> (a z + b) / (conj(b) z + conj(a)) with |a|^2 - |b|^2 = 1."""

    a: complex
    b: complex

    def __post_init__(self):
        det = abs(self.a) ** 2 - abs(self.b) ** 2
        # the cancellation floor for |a|^2 - |b|^2 grows with the entry size
        tol = 1e-10 * max(1.0, 1e-4 * (abs(self.a) ** 2 + abs(self.b) ** 2))
        if abs(det - 1.0) > tol:
            raise ValueError(f"matrix not SU(1,1)-normalized: det = {det!r}")

    @classmethod
    def normalized(cls, a, b) -> "MobiusMap":
        """Rescale (a, b) so that |a|^2 - |b|^2 = 1."""
        a, b = complex(a), complex(b)
        det = abs(a) ** 2 - abs(b) ** 2
        if det <= 0.0:
            raise ValueError("not an orientation-preserving disc isometry")
        s = 1.0 / math.sqrt(det)
        return cls(a * s, b * s)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1.0 + 0.0j, 0.0j)

    @classmethod
    def rotation(cls, theta: float) -> "MobiusMap":
        return cls(cmath.rect(1.0, theta / 2.0), 0.0j)

    @classmethod
    def real_translation(cls, length: float) -> "MobiusMap":
        """Hyperbolic translation along the real diameter, -1 -> +1 for length > 0."""
        return cls(complex(math.cosh(length / 2.0)), complex(math.sinh(length / 2.0)))

    @classmethod
    def from_point_direction(cls, z0, theta: float) -> "MobiusMap":
        """The isometry taking (0, +real direction) to (z0, direction angle theta)."""
        z0 = _as_complex(z0)
        s = 1.0 / math.sqrt(1.0 - abs(z0) ** 2)
        half = cmath.rect(1.0, theta / 2.0)
        return cls(half * s, z0 * s / half)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b],
                         [np.conj(self.b), np.conj(self.a)]], dtype=complex)

    def __call__(self, z):
        z = _as_complex(z)
        return (self.a * z + self.b) / (self.b.conjugate() * z + self.a.conjugate())

    def apply_many(self, zs: np.ndarray) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        return (self.a * zs + self.b) / (np.conj(self.b) * zs + np.conj(self.a))

    def apply_point(self, p: DiscPoint) -> DiscPoint:
        return DiscPoint.from_complex(self(p))

    def derivative(self, z) -> complex:
        """Complex derivative; the map is holomorphic."""
        z = _as_complex(z)
        return 1.0 / (self.b.conjugate() * z + self.a.conjugate()) ** 2

    def apply_tangent(self, v: TangentVector) -> TangentVector:
        z = v.base.z
        return TangentVector.from_complex(self(z), self.derivative(z) * v.w, v.unit)

    def apply_direction(self, xi: BoundaryDirection) -> BoundaryDirection:
        image = self(xi.xi)
        return BoundaryDirection(cmath.phase(image))

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        a = self.a * other.a + self.b * np.conj(other.b)
        b = self.a * other.b + self.b * np.conj(other.a)
        return MobiusMap.normalized(a, b)

    def inverse(self) -> "MobiusMap":
        return MobiusMap.normalized(self.a.conjugate(), -self.b)

    @property
    def trace(self) -> float:
        return 2.0 * self.a.real

    def is_identity(self, tol: float = 1e-9) -> bool:
        return abs(self.b) <= tol and abs(self.a.imag) <= tol and abs(abs(self.a.real) - 1.0) <= tol


@dataclass(frozen=True)
class HyperbolicGeodesic:
    """Oriented unit-speed geodesic c(t) = frame(tanh(t/2)).

    ``frame`` maps the real diameter (-1, 0, 1) to (minus_end, anchor, plus_end);
    the anchor is the point at parameter 0.
    """

    minus_end: BoundaryDirection
    plus_end: BoundaryDirection
    frame: MobiusMap

    def __post_init__(self):
        if abs(self.minus_end.xi - self.plus_end.xi) <= 1e-12:
            raise DegenerateEndpoints("geodesic endpoints coincide")

    @property
    def anchor(self) -> DiscPoint:
        return DiscPoint.from_complex(self.frame(0.0j))

    def point(self, t: float) -> complex:
        return self.frame(complex(math.tanh(t / 2.0)))

    def points(self, ts: np.ndarray) -> np.ndarray:
        return self.frame.apply_many(np.tanh(np.asarray(ts, dtype=float) / 2.0))

    def velocity(self, t: float) -> complex:
        """dc/dt; has hyperbolic norm 1."""
        s = math.tanh(t / 2.0)
        return self.frame.derivative(complex(s)) * (1.0 - s * s) / 2.0

    def unit_tangent(self, t: float) -> TangentVector:
        return TangentVector.from_complex(self.point(t), self.velocity(t), unit=True)

    def reversed(self) -> "HyperbolicGeodesic":
        return HyperbolicGeodesic(self.plus_end, self.minus_end,
                                  self.frame @ MobiusMap.rotation(math.pi))

    def transform(self, m: MobiusMap) -> "HyperbolicGeodesic":
        return HyperbolicGeodesic(m.apply_direction(self.minus_end),
                                  m.apply_direction(self.plus_end),
                                  m @ self.frame)


def _direction_from_to(z: complex, target: complex) -> float:
    """Angle at z of the geodesic heading to target (interior or on S^1)."""
    w = (target - z) / (1.0 - z.conjugate() * target)
    if abs(w) <= 1e-15:
        raise DegenerateEndpoints("coincident points")
    return cmath.phase(w)


def _closest_point_to_origin(xi_minus: complex, xi_plus: complex) -> complex:
    """Closest point to 0 on the geodesic with the given boundary endpoints."""
    u = (xi_minus + xi_plus) / 2.0
    one_plus_cos = 1.0 + (xi_plus * xi_minus.conjugate()).real
    if one_plus_cos < 1e-14:        # diametrically opposite: a straight diameter
        return 0.0j
    center = 2.0 * u / one_plus_cos
    radius = math.sqrt(max(abs(center) ** 2 - 1.0, 0.0))
    return center * (1.0 - radius / abs(center))


def geodesic_between(x, y) -> HyperbolicGeodesic:
    """Oriented geodesic through two points (interior and/or boundary), x to y.

    For two interior points the anchor (parameter 0) is at x; for one interior
    point the anchor is at that point; for two boundary directions the anchor
    is the point of the geodesic closest to the origin.
    """
    x_bdry = isinstance(x, BoundaryDirection)
    y_bdry = isinstance(y, BoundaryDirection)
    if x_bdry and y_bdry:
        if x.separation(y) <= 1e-12:
            raise DegenerateEndpoints("boundary endpoints coincide")
        anchor = _closest_point_to_origin(x.xi, y.xi)
        theta = _direction_from_to(anchor, y.xi)
        frame = MobiusMap.from_point_direction(anchor, theta)
        return HyperbolicGeodesic(x, y, frame)
    if x_bdry:
        zy = _as_complex(y)
        theta = _direction_from_to(zy, x.xi)  # direction from y toward xi_minus
        frame = MobiusMap.from_point_direction(zy, theta + math.pi)
        plus = BoundaryDirection.from_complex(frame(1.0 + 0.0j))
        return HyperbolicGeodesic(x, plus, frame)
    if y_bdry:
        zx = _as_complex(x)
        theta = _direction_from_to(zx, y.xi)
        frame = MobiusMap.from_point_direction(zx, theta)
        minus = BoundaryDirection.from_complex(frame(-1.0 + 0.0j))
        return HyperbolicGeodesic(minus, y, frame)
    zx, zy = _as_complex(x), _as_complex(y)
    if abs(zx - zy) <= 1e-12:
        raise DegenerateEndpoints("interior points coincide")
    theta = _direction_from_to(zx, zy)
    frame = MobiusMap.from_point_direction(zx, theta)
    minus = BoundaryDirection.from_complex(frame(-1.0 + 0.0j))
    plus = BoundaryDirection.from_complex(frame(1.0 + 0.0j))
    return HyperbolicGeodesic(minus, plus, frame)


@dataclass(frozen=True)
class MobiusClass:
    kind: str                                  # identity | elliptic | parabolic | hyperbolic
    translation_length: float = 0.0
    axis: HyperbolicGeodesic | None = None
    rotation_angle: float = 0.0


def classify(m: MobiusMap) -> MobiusClass:
    """Classify by |trace|: < 2 elliptic, = 2 (within 1e-9) parabolic/identity,
    > 2 hyperbolic with translation length 2 acosh(|tr|/2) and the axis oriented
    from the repelling to the attracting fixed point."""
    tr = abs(m.trace)
    if m.is_identity():
        return MobiusClass("identity")
    if abs(tr - 2.0) <= 1e-9:
        return MobiusClass("parabolic")
    if tr < 2.0:
        # conjugate to z -> e^{i phi} z with cos(phi/2) = |Re a|
        phi = 2.0 * math.acos(min(abs(m.a.real), 1.0))
        return MobiusClass("elliptic", rotation_angle=phi)
    length = 2.0 * math.acosh(tr / 2.0)
    im_a = m.a.imag
    root = math.sqrt(abs(m.b) ** 2 - im_a ** 2)
    fixed = []
    for sign in (+1.0, -1.0):
        z = (1j * im_a + sign * root) / m.b.conjugate()
        fixed.append(z / abs(z))
    # attracting fixed point: |m'(z)| < 1  <=>  |conj(b) z + conj(a)| > 1
    if abs(m.b.conjugate() * fixed[0] + m.a.conjugate()) > 1.0:
        attracting, repelling = fixed[0], fixed[1]
    else:
        attracting, repelling = fixed[1], fixed[0]
    axis = geodesic_between(BoundaryDirection.from_complex(repelling),
                            BoundaryDirection.from_complex(attracting))
    return MobiusClass("hyperbolic", translation_length=length, axis=axis)


@dataclass(frozen=True)
class EndpointEstimate:
    direction: BoundaryDirection
    error_bar: float
    final_radius: float


def endpoint_estimate(path, eps_bdry: float = EPS_BDRY) -> EndpointEstimate:
    """Boundary direction a path converges to, from its final samples.

    ``path`` is anything with a ``zs`` attribute of complex samples, or a
    plain complex array. Raises NotNearBoundary when the final sample has
    |z| < 1 - eps_bdry; the error bar is the angular drift over the last 10%
    of samples.
    """
    zs = np.asarray(getattr(path, "zs", path), dtype=complex)
    if zs.size == 0:
        raise ValueError("empty path")
    z_end = zs[-1]
    r_end = abs(z_end)
    if r_end < 1.0 - eps_bdry:
        raise NotNearBoundary(
            f"final sample radius {r_end:.6f} < 1 - {eps_bdry:g}; extend the horizon")
    angle = cmath.phase(z_end)
    n_tail = max(2, zs.size // 10)
    tail = np.angle(zs[-n_tail:])
    drift = np.angle(np.exp(1j * (tail - angle)))
    return EndpointEstimate(BoundaryDirection(angle), float(np.max(np.abs(drift))), r_end)
