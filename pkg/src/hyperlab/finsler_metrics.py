"""Finsler metrics on the disc: evaluators, fiber calculus, built-in families.

A metric object bundles F, the fiber derivative of F^2/2 (the Legendre
transform), the fiber Hessian, and enough position derivatives to drive the
geodesic flow.  Built-ins:

* ``hyperbolic_norm()``   -- F = 2|v| / (1-|z|^2), the background metric;
* ``randers_exact(eps)``  -- F = ||v||_h + eps Re(v), non-reversible, with an
  exact distance oracle d_F(x,y) = d_h(x,y) + eps (Re y - Re x);
* ``conformal_bump(G,a,rho)`` -- F = e^phi ||v||_h with phi a Gamma-invariant
  orbit sum of compactly supported bumps: the non-trivial invariant family.

Conventions: points and fiber vectors are complex scalars; covectors and
gradients are numpy (2,) arrays unless a complex representation is noted.
The complex representation G of a real gradient acts by <G, h> = Re(conj(G) h).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .disc_geometry import MobiusMap, TangentVector, _as_complex, hyperbolic_distance

FD_FIBER_STEP = 1e-5
_SQRT_EPS = math.sqrt(np.finfo(float).eps)


class InvalidAmplitude(ValueError):
    """Metric family parameter outside its admissible range."""


class NewtonDiverged(RuntimeError):
    """Fiber Newton iteration failed; likely a degenerate Hessian sample."""


def _vec(w: complex) -> np.ndarray:
    return np.array([w.real, w.imag])


def _cplx(v) -> complex:
    return complex(v[0], v[1])


def lambda_h(z: complex) -> float:
    """Conformal factor of the hyperbolic metric, 2/(1-|z|^2)."""
    return 2.0 / (1.0 - abs(z) ** 2)


class FinslerMetric:
    """Base evaluator bundle; derivatives default to central differences."""

    name = "finsler"
    gamma_invariant = False
    smoothness = "C-inf off the zero section"

    def value(self, z, w) -> float:
        raise NotImplementedError

    def value_many(self, zs: np.ndarray, ws: np.ndarray) -> np.ndarray:
        zs, ws = np.asarray(zs, dtype=complex), np.asarray(ws, dtype=complex)
        return np.array([self.value(z, w) for z, w in zip(zs.ravel(), ws.ravel())]).reshape(zs.shape)

    # fiber derivative of F^2/2 (= Legendre transform), as a (2,) covector
    def fiber_gradient(self, z, w) -> np.ndarray:
        z, w = _as_complex(z), complex(w)
        h = FD_FIBER_STEP * max(1.0, abs(w))
        L = lambda v: 0.5 * self.value(z, v) ** 2
        return np.array([
            (L(w + h) - L(w - h)) / (2 * h),
            (L(w + 1j * h) - L(w - 1j * h)) / (2 * h),
        ])

    def fiber_hessian(self, z, w) -> np.ndarray:
        z, w = _as_complex(z), complex(w)
        h = FD_FIBER_STEP * max(1.0, abs(w))
        gp_x = self.fiber_gradient(z, w + h)
        gm_x = self.fiber_gradient(z, w - h)
        gp_y = self.fiber_gradient(z, w + 1j * h)
        gm_y = self.fiber_gradient(z, w - 1j * h)
        H = np.column_stack([(gp_x - gm_x) / (2 * h), (gp_y - gm_y) / (2 * h)])
        return 0.5 * (H + H.T)

    def position_gradient(self, z, w) -> np.ndarray:
        """d_x of F^2/2 at fixed fiber vector."""
        z, w = _as_complex(z), complex(w)
        h = 1e-6
        L = lambda p: 0.5 * self.value(p, w) ** 2
        return np.array([
            (L(z + h) - L(z - h)) / (2 * h),
            (L(z + 1j * h) - L(z - 1j * h)) / (2 * h),
        ])

    def mixed_hessian(self, z, w) -> np.ndarray:
        """M[i, j] = d^2 (F^2/2) / dv_i dx_j."""
        z, w = _as_complex(z), complex(w)
        h = 1e-6
        gp_x = self.fiber_gradient(z + h, w)
        gm_x = self.fiber_gradient(z - h, w)
        gp_y = self.fiber_gradient(z + 1j * h, w)
        gm_y = self.fiber_gradient(z - 1j * h, w)
        return np.column_stack([(gp_x - gm_x) / (2 * h), (gp_y - gm_y) / (2 * h)])

    def geodesic_acceleration(self, z, v) -> complex:
        """Solve Hess_vv vdot = dL/dx - Hess_vx v for the EL acceleration."""
        z, v = _as_complex(z), complex(v)
        H = self.fiber_hessian(z, v)
        rhs = self.position_gradient(z, v) - self.mixed_hessian(z, v) @ _vec(v)
        return _cplx(np.linalg.solve(H, rhs))

    def unit_vector(self, z, theta: float) -> complex:
        """Fiber vector of F-norm 1 in chart direction theta."""
        z = _as_complex(z)
        w = complex(math.cos(theta), math.sin(theta))
        return w / self.value(z, w)

    def kernel_spec(self):
        """Descriptor consumed by the compiled flow kernels, or None."""
        return None

    def pulled_back(self, chart: MobiusMap) -> "FinslerMetric":
        """The metric in the chart zeta -> chart(zeta)."""
        return _GenericPullback(self, chart)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


# ---------------------------------------------------------------------------
# conformal family: F = e^{phi(z)} ||v||_h

class ConformalMetric(FinslerMetric):
    """F = mu(z) |v| with mu = e^phi * 2/(1-|z|^2); phi == 0 is hyperbolic."""

    name = "hyperbolic"
    gamma_invariant = True

    def phi(self, z: complex) -> float:
        return 0.0

    def phi_gradient(self, z: complex) -> complex:
        """Complex representation of the euclidean gradient of phi."""
        return 0.0j

    def mu(self, z: complex) -> float:
        return math.exp(self.phi(z)) * lambda_h(z)

    def value(self, z, w) -> float:
        z = _as_complex(z)
        return self.mu(z) * abs(complex(w))

    def value_many(self, zs, ws):
        zs, ws = np.asarray(zs, dtype=complex), np.asarray(ws, dtype=complex)
        mus = np.array([self.mu(z) for z in zs.ravel()]).reshape(zs.shape)
        return mus * np.abs(ws)

    def fiber_gradient(self, z, w):
        z, w = _as_complex(z), complex(w)
        m2 = self.mu(z) ** 2
        return np.array([m2 * w.real, m2 * w.imag])

    def fiber_hessian(self, z, w):
        return self.mu(_as_complex(z)) ** 2 * np.eye(2)

    def log_density_gradient(self, z: complex) -> complex:
        """g = grad of 2 log mu (complex representation)."""
        z = _as_complex(z)
        return 2.0 * self.phi_gradient(z) + 4.0 * z / (1.0 - abs(z) ** 2)

    def position_gradient(self, z, w):
        z, w = _as_complex(z), complex(w)
        g = self.log_density_gradient(z)
        m2 = self.mu(z) ** 2
        coeff = 0.5 * m2 * abs(w) ** 2
        return np.array([coeff * g.real, coeff * g.imag])

    def geodesic_acceleration(self, z, v) -> complex:
        z, v = _as_complex(z), complex(v)
        g = self.log_density_gradient(z)
        return 0.5 * abs(v) ** 2 * g - (g.conjugate() * v).real * v

    def pulled_back(self, chart: MobiusMap) -> "FinslerMetric":
        # isometry pullback of a conformal metric is conformal with
        # phi_chart  = phi o chart; lambda_h is chart-invariant
        return _PulledBackConformal(self, chart)


class HyperbolicMetric(ConformalMetric):
    """The background metric itself."""

    def kernel_spec(self):
        from . import _kernels
        return _kernels.conformal_spec(self)

    def pulled_back(self, chart: MobiusMap) -> "FinslerMetric":
        return self   # isometry-invariant


class _PulledBackConformal(ConformalMetric):
    def __init__(self, base: ConformalMetric, chart: MobiusMap):
        self.base = base
        self.chart = chart
        self.name = base.name + "|chart"
        self.gamma_invariant = False

    def phi(self, z):
        return self.base.phi(self.chart(z))

    def phi_gradient(self, z):
        z = _as_complex(z)
        return self.chart.derivative(z).conjugate() * self.base.phi_gradient(self.chart(z))

    def kernel_spec(self):
        from . import _kernels
        return _kernels.conformal_spec(self.base, chart=self.chart)


class ConformalBumpMetric(ConformalMetric):
    """Gamma-invariant conformal perturbation by bumps on the orbit of 0.

    phi(z) = a * sum_j psi(d_h(z, p_j)) with psi(s) = (1 - (s/rho)^2)^3 on
    [0, rho], the sum over the orbit Gamma.0.  Evaluation reduces z to the
    fundamental domain first (the sum is exactly invariant), so only orbit
    points within rho of the closed octagon are ever needed.
    """

    name = "bump"
    smoothness = "C^2 at the support boundary, C-inf elsewhere"

    def __init__(self, group, amplitude: float, radius: float):
        if not (-0.5 < amplitude < 2.0):
            raise InvalidAmplitude(f"amplitude {amplitude} outside (-0.5, 2)")
        if radius <= 0.0:
            raise InvalidAmplitude(f"radius {radius} must be positive")
        self.group = group
        self.amplitude = float(amplitude)
        self.radius = float(radius)
        self.name = f"bump:{amplitude:g}:{radius:g}"
        reach = group.circumradius + radius
        self.core_orbit = group.orbit_points(reach, max_len=4)

    # -- core evaluation on (near-)domain points -----------------------------

    def _phi_core(self, z: complex) -> float:
        rho = self.radius
        acc = 0.0
        for p in self.core_orbit:
            d = hyperbolic_distance(z, p)
            if d < rho:
                acc += (1.0 - (d / rho) ** 2) ** 3
        return self.amplitude * acc

    def _phi_core_gradient(self, z: complex) -> complex:
        rho = self.radius
        g = 0.0j
        for p in self.core_orbit:
            d = hyperbolic_distance(z, p)
            if d >= rho or d < 1e-14:
                continue
            u = 1.0 - (d / rho) ** 2
            dpsi_dd = -6.0 * d / rho ** 2 * u * u
            # grad of d_h(z, p): Q = 2|z-p|^2 / ((1-|z|^2)(1-|p|^2))
            one_z = 1.0 - abs(z) ** 2
            one_p = 1.0 - abs(p) ** 2
            Q = 2.0 * abs(z - p) ** 2 / (one_z * one_p)
            gradQ = (2.0 / one_p) * (2.0 * (z - p) / one_z
                                     + abs(z - p) ** 2 * 2.0 * z / one_z ** 2)
            grad_d = gradQ / math.sqrt(Q * Q + 2.0 * Q)
            g += dpsi_dd * grad_d
        return self.amplitude * g

    def phi(self, z):
        z = _as_complex(z)
        rep, _ = self.group.reduce_point(z)
        return self._phi_core(rep.z)

    def phi_gradient(self, z):
        z = _as_complex(z)
        rep, el = self.group.reduce_point(z)
        return el.map.derivative(z).conjugate() * self._phi_core_gradient(rep.z)

    def kernel_spec(self):
        from . import _kernels
        return _kernels.conformal_spec(self)


# ---------------------------------------------------------------------------
# Randers family: F = ||v||_h + Re(c(z) v), exact one-form

class RandersMetric(FinslerMetric):
    """Exact-form Randers metric F(z, v) = ||v||_h + eps Re(v).

    The one-form is df for f(z) = eps Re(z), so d_F(x, y) =
    d_h(x, y) + eps (Re y - Re x): every probe of the solver stack has a
    closed-form answer. Not Gamma-invariant. Requires eps < 2 so that F > 0.
    """

    name = "randers"
    gamma_invariant = False

    def __init__(self, eps: float, chart: MobiusMap | None = None):
        if not abs(eps) < 2.0:
            raise InvalidAmplitude(f"randers amplitude {eps} must satisfy |eps| < 2")
        self.eps = float(eps)
        self.chart = chart
        self.name = f"randers:{eps:g}"
        if chart is not None:
            self.name += "|chart"

    def _coeff(self, z: complex) -> complex:
        if self.chart is None:
            return complex(self.eps)
        return self.eps * self.chart.derivative(z)

    def _coeff_prime(self, z: complex) -> complex:
        if self.chart is None:
            return 0.0j
        cb = self.chart.b.conjugate()
        ca = self.chart.a.conjugate()
        return self.eps * (-2.0 * cb) / (cb * z + ca) ** 3

    def value(self, z, w) -> float:
        z, w = _as_complex(z), complex(w)
        return lambda_h(z) * abs(w) + (self._coeff(z) * w).real

    def value_many(self, zs, ws):
        zs, ws = np.asarray(zs, dtype=complex), np.asarray(ws, dtype=complex)
        lam = 2.0 / (1.0 - np.abs(zs) ** 2)
        if self.chart is None:
            cw = self.eps * ws
        else:
            cw = np.array([self._coeff(z) for z in zs.ravel()]).reshape(zs.shape) * ws
        return lam * np.abs(ws) + cw.real

    def _dF_fiber(self, z: complex, w: complex) -> complex:
        """Complex representation of d_v F."""
        return lambda_h(z) * w / abs(w) + self._coeff(z).conjugate()

    def fiber_gradient(self, z, w):
        z, w = _as_complex(z), complex(w)
        return self.value(z, w) * _vec(self._dF_fiber(z, w))

    def fiber_hessian(self, z, w):
        z, w = _as_complex(z), complex(w)
        F = self.value(z, w)
        lam = lambda_h(z)
        q = _vec(self._dF_fiber(z, w))
        what = _vec(w / abs(w))
        P = np.eye(2) - np.outer(what, what)
        return np.outer(q, q) + F * lam / abs(w) * P

    def _grad_lambda(self, z: complex) -> complex:
        return lambda_h(z) ** 2 * z

    def position_gradient(self, z, w):
        z, w = _as_complex(z), complex(w)
        F = self.value(z, w)
        gF = abs(w) * self._grad_lambda(z) + (self._coeff_prime(z) * w).conjugate()
        return F * _vec(gF)

    def mixed_hessian(self, z, w):
        z, w = _as_complex(z), complex(w)
        F = self.value(z, w)
        gF = abs(w) * self._grad_lambda(z) + (self._coeff_prime(z) * w).conjugate()
        q = self._dF_fiber(z, w)
        M = np.outer(_vec(q), _vec(gF))
        # + F * d(dF_fiber)/dx: lambda-part grad tensor what, coeff-part conj(c)'
        what = w / abs(w)
        gl = self._grad_lambda(z)
        M += F * np.outer(_vec(what), _vec(gl))
        cp = self._coeff_prime(z)
        if cp != 0:
            col_x = _vec(cp.conjugate())
            col_y = _vec(-1j * cp.conjugate())
            M += F * np.column_stack([col_x, col_y])
        return M

    def geodesic_acceleration(self, z, v) -> complex:
        z, v = _as_complex(z), complex(v)
        H = self.fiber_hessian(z, v)
        rhs = self.position_gradient(z, v) - self.mixed_hessian(z, v) @ _vec(v)
        return _cplx(np.linalg.solve(H, rhs))

    def oracle_distance(self, x, y) -> float:
        """Closed-form d_F for the exact family (identity chart only)."""
        if self.chart is not None:
            raise ValueError("oracle only available in the global chart")
        zx, zy = _as_complex(x), _as_complex(y)
        return hyperbolic_distance(zx, zy) + self.eps * (zy.real - zx.real)

    def kernel_spec(self):
        from . import _kernels
        return _kernels.randers_spec(self)

    def pulled_back(self, chart: MobiusMap) -> "FinslerMetric":
        if self.chart is not None:
            raise ValueError("nested pullbacks not supported for randers")
        return RandersMetric(self.eps, chart=chart)


class _GenericPullback(FinslerMetric):
    """FD-backed pullback for metrics without an analytic chart form."""

    def __init__(self, base: FinslerMetric, chart: MobiusMap):
        self.base = base
        self.chart = chart
        self.name = base.name + "|chart"
        self.gamma_invariant = False

    def value(self, z, w) -> float:
        z = _as_complex(z)
        return self.base.value(self.chart(z), self.chart.derivative(z) * complex(w))


class ReversedMetric(FinslerMetric):
    """F~(v) = F(-v): trades forward for backward rays."""

    def __init__(self, base: FinslerMetric):
        self.base = base
        self.name = base.name + "|rev"
        self.gamma_invariant = base.gamma_invariant

    def value(self, z, w) -> float:
        return self.base.value(z, -complex(w))

    def fiber_gradient(self, z, w):
        return -self.base.fiber_gradient(z, -complex(w))

    def fiber_hessian(self, z, w):
        return self.base.fiber_hessian(z, -complex(w))

    def position_gradient(self, z, w):
        return self.base.position_gradient(z, -complex(w))

    def mixed_hessian(self, z, w):
        return -self.base.mixed_hessian(z, -complex(w))

    def geodesic_acceleration(self, z, v) -> complex:
        return -self.base.geodesic_acceleration(z, -complex(v))

    def kernel_spec(self):
        from . import _kernels
        spec = self.base.kernel_spec()
        return None if spec is None else _kernels.reversed_spec(spec)


def reversed_metric(F: FinslerMetric) -> FinslerMetric:
    """Time reversal; run forward machinery on this for the backward theory."""
    if isinstance(F, ReversedMetric):
        return F.base
    if isinstance(F, ConformalMetric):
        return F                      # symmetric family
    if isinstance(F, RandersMetric) and F.chart is None:
        return RandersMetric(-F.eps)
    return ReversedMetric(F)


# ---------------------------------------------------------------------------
# constructors

def hyperbolic_norm() -> HyperbolicMetric:
    """The background metric F(z, v) = 2|v| / (1-|z|^2)."""
    return HyperbolicMetric()


def randers_exact(amplitude: float = 0.2) -> RandersMetric:
    """Non-reversible exact-form test family; InvalidAmplitude if |eps| >= 2."""
    return RandersMetric(amplitude)


def conformal_bump(group, amplitude: float = 0.5, radius: float = 0.8) -> ConformalBumpMetric:
    """Gamma-invariant non-hyperbolic metric for the width experiments."""
    return ConformalBumpMetric(group, amplitude, radius)


def metric_from_spec(spec: str, group=None) -> FinslerMetric:
    """Parse config keys: hyperbolic | randers:<eps> | bump:<a>:<rho>."""
    parts = spec.split(":")
    kind = parts[0]
    if kind == "hyperbolic" and len(parts) == 1:
        return hyperbolic_norm()
    if kind == "randers" and len(parts) == 2:
        return randers_exact(float(parts[1]))
    if kind == "bump" and len(parts) == 3:
        if group is None:
            from .fuchsian_group import genus2_group
            group = genus2_group()
        return conformal_bump(group, float(parts[1]), float(parts[2]))
    raise ValueError(f"unknown metric spec {spec!r}")


# ---------------------------------------------------------------------------
# Legendre transform

def legendre_transform(F: FinslerMetric, x, v) -> np.ndarray:
    """L_F(v) = 1/2 d_v F^2(v), a covector at x."""
    return F.fiber_gradient(_as_complex(x), complex(v))


def legendre_inverse(F: FinslerMetric, x, p) -> complex:
    """Solve L_F(v) = p by damped Newton on the fiber.

    Initial guess from the hyperbolic metric (for which L is linear); residual
    target 1e-10; NewtonDiverged after 50 iterations.
    """
    z = _as_complex(x)
    p = np.asarray(p, dtype=float) if not isinstance(p, complex) else _vec(p)
    if np.linalg.norm(p) == 0.0:
        raise ValueError("zero covector has no Legendre preimage")
    v = _cplx(p) / lambda_h(z) ** 2
    target = 1e-10 * max(1.0, np.linalg.norm(p))
    res = F.fiber_gradient(z, v) - p
    for _ in range(50):
        if np.linalg.norm(res) <= target:
            return v
        step = np.linalg.solve(F.fiber_hessian(z, v), res)
        t = 1.0
        for _ in range(30):
            v_new = v - t * _cplx(step)
            if abs(v_new) > 1e-300:
                res_new = F.fiber_gradient(z, v_new) - p
                if np.linalg.norm(res_new) < np.linalg.norm(res):
                    v, res = v_new, res_new
                    break
            t *= 0.5
        else:
            raise NewtonDiverged("no descent step found")
    if np.linalg.norm(res) <= target:
        return v
    raise NewtonDiverged(f"residual {np.linalg.norm(res):.3e} after 50 iterations")


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class EquivalenceConstants:
    c_F: float
    max_ratio: float        # sup ||v||_h / F
    min_ratio: float        # inf ||v||_h / F
    n_samples: int


@dataclass
class MetricReport:
    passed: bool
    homogeneity_residual: float
    min_hessian_eigenvalue: float
    positivity_ok: bool
    gradient_fd_residual: float
    hessian_fd_residual: float
    invariance_residual: float | None
    equivalence: EquivalenceConstants
    notes: list = field(default_factory=list)


def _sample_ball(rng, n, radius=2.0):
    """Quasi-uniform samples of a hyperbolic ball (area measure)."""
    u = rng.random(n)
    r = np.arccosh(1.0 + u * (math.cosh(radius) - 1.0))
    th = 2 * np.pi * rng.random(n)
    return np.tanh(r / 2.0) * np.exp(1j * th)


def verify_metric(F: FinslerMetric, n_samples: int = 100, *, seed: int = 0,
                  region_radius: float = 2.0, group=None) -> MetricReport:
    """Check the metric axioms on random samples and estimate c_F.

    Homogeneity at factors {0.5, 2, 7}, strict convexity of the fiber Hessian,
    positivity off the zero section, derivative consistency against central
    differences, uniform equivalence constants (smallest sampled constant
    times a 1.05 safety factor), and Gamma-invariance when claimed.
    """
    rng = np.random.default_rng(seed)
    zs = _sample_ball(rng, n_samples, region_radius)
    ws = rng.normal(size=n_samples) + 1j * rng.normal(size=n_samples)
    notes = []

    hom = 0.0
    for lam in (0.5, 2.0, 7.0):
        for z, w in zip(zs, ws):
            f1, f2 = F.value(z, lam * w), lam * F.value(z, w)
            hom = max(hom, abs(f1 - f2) / max(abs(f2), 1e-300))
    min_eig = math.inf
    positivity = True
    grad_res = 0.0
    hess_res = 0.0
    for z, w in zip(zs, ws):
        if F.value(z, w) <= 0.0 or F.value(z, -w) <= 0.0:
            positivity = False
        H = F.fiber_hessian(z, w)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(H).min()))
        g = F.fiber_gradient(z, w)
        h = FD_FIBER_STEP * max(1.0, abs(w))
        Lv = lambda v: 0.5 * F.value(z, v) ** 2
        g_fd = np.array([(Lv(w + h) - Lv(w - h)) / (2 * h),
                         (Lv(w + 1j * h) - Lv(w - 1j * h)) / (2 * h)])
        scale = max(np.linalg.norm(g_fd), 1e-12)
        grad_res = max(grad_res, float(np.linalg.norm(g - g_fd) / scale))
        gp = F.fiber_gradient(z, w + h)
        gm = F.fiber_gradient(z, w - h)
        gpy = F.fiber_gradient(z, w + 1j * h)
        gmy = F.fiber_gradient(z, w - 1j * h)
        H_fd = np.column_stack([(gp - gm) / (2 * h), (gpy - gmy) / (2 * h)])
        H_fd = 0.5 * (H_fd + H_fd.T)
        hess_res = max(hess_res, float(np.linalg.norm(H - H_fd) / max(np.linalg.norm(H_fd), 1e-12)))

    ratios = []
    for z, w in zip(zs, ws):
        ratios.append(lambda_h(z) * abs(w) / F.value(z, w))
    ratios = np.array(ratios)
    c_needed = max(ratios.max(), 1.0 / ratios.min())
    eq = EquivalenceConstants(1.05 * c_needed, float(ratios.max()),
                              float(ratios.min()), n_samples)

    inv_res = None
    if F.gamma_invariant:
        if group is None:
            from .fuchsian_group import genus2_group
            group = genus2_group()
        inv_res = 0.0
        for z, w in zip(zs[:50], ws[:50]):
            f0 = F.value(z, w)
            for g in group.generators:
                m = g.map
                f1 = F.value(m(z), m.derivative(z) * w)
                inv_res = max(inv_res, abs(f1 - f0) / max(abs(f0), 1e-300))
        if inv_res > 1e-6:
            notes.append(f"invariance residual {inv_res:.2e} exceeds 1e-6")

    passed = (hom <= 1e-8 and min_eig > 0.0 and positivity
              and grad_res <= 1e-6 and hess_res <= 1e-5
              and (inv_res is None or inv_res <= 1e-6))
    if hom > 1e-8:
        notes.append(f"homogeneity residual {hom:.2e}")
    if min_eig <= 0.0:
        notes.append(f"fiber Hessian not positive definite (min eig {min_eig:.2e})")
    if not positivity:
        notes.append("F not positive off the zero section")
    return MetricReport(passed, hom, min_eig, positivity, grad_res, hess_res,
                        inv_res, eq, notes)


def equivalence_hint(F: FinslerMetric) -> float:
    """Cached c_F estimate used by solvers for horizon padding."""
    c = getattr(F, "_c_F_hint", None)
    if c is None:
        c = verify_metric(F, 40, seed=1234).equivalence.c_F
        try:
            F._c_F_hint = c
        except AttributeError:
            pass
    return c
