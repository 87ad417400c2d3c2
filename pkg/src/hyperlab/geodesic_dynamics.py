"""Geodesic flow of F^2/2 at unit speed.

State is (z, v) in the chart; the acceleration comes from solving the fiber
Hessian against the Euler-Lagrange right-hand side (closed form for the
built-in families, compiled in ``_kernels``).  Paths record every accepted
step of the embedded Dormand-Prince 5(4) pair, capped at h_max so that cubic
Hermite interpolation between samples stays at the integration accuracy.
Velocity is renormalized to F = 1 every 100 accepted steps; the largest
correction is logged on the path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .disc_geometry import TangentVector, _as_complex
from .finsler_metrics import FinslerMetric

DEFAULT_TOL = 1e-8
H_MAX = 0.05
RENORM_EVERY = 100


class LeftDomain(RuntimeError):
    """Trajectory reached |z| >= 1 - 1e-9: horizon too long for precision."""

    def __init__(self, msg, path=None):
        super().__init__(msg)
        self.path = path


class StepUnderflow(RuntimeError):
    """Step controller collapsed (degenerate Hessian or boundary contact)."""


@dataclass
class GeodesicPath:
    metric_name: str
    ts: np.ndarray
    zs: np.ndarray
    vs: np.ndarray
    accs: np.ndarray
    energy_drift_max: float = 0.0
    max_renorm_correction: float = 0.0
    metric: FinslerMetric | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.ts.size >= 2 and self.ts[1] < self.ts[0]:
            self._sign = -1.0
        else:
            self._sign = 1.0

    @property
    def n_samples(self) -> int:
        return int(self.ts.size)

    @property
    def duration(self) -> float:
        return float(self.ts[-1] - self.ts[0])

    @property
    def end_z(self) -> complex:
        return complex(self.zs[-1])

    @property
    def end_v(self) -> complex:
        return complex(self.vs[-1])

    def _segment(self, t):
        s = self._sign
        st = s * np.asarray(self.ts)
        idx = np.clip(np.searchsorted(st, s * np.asarray(t, dtype=float)) - 1,
                      0, self.ts.size - 2)
        return idx

    def position_at(self, t):
        """Cubic Hermite interpolation of the position."""
        t = np.asarray(t, dtype=float)
        i = self._segment(t)
        t0, t1 = self.ts[i], self.ts[i + 1]
        h = t1 - t0
        u = np.where(h != 0, (t - t0) / np.where(h == 0, 1, h), 0.0)
        h00 = (1 + 2 * u) * (1 - u) ** 2
        h10 = u * (1 - u) ** 2
        h01 = u * u * (3 - 2 * u)
        h11 = u * u * (u - 1)
        return (h00 * self.zs[i] + h10 * h * self.vs[i]
                + h01 * self.zs[i + 1] + h11 * h * self.vs[i + 1])

    def velocity_at(self, t):
        """Cubic Hermite on velocity using recorded accelerations."""
        t = np.asarray(t, dtype=float)
        i = self._segment(t)
        t0, t1 = self.ts[i], self.ts[i + 1]
        h = t1 - t0
        u = np.where(h != 0, (t - t0) / np.where(h == 0, 1, h), 0.0)
        h00 = (1 + 2 * u) * (1 - u) ** 2
        h10 = u * (1 - u) ** 2
        h01 = u * u * (3 - 2 * u)
        h11 = u * u * (u - 1)
        return (h00 * self.vs[i] + h10 * h * self.accs[i]
                + h01 * self.vs[i + 1] + h11 * h * self.accs[i + 1])

    def at(self, t):
        return self.position_at(t), self.velocity_at(t)

    def resample(self, spacing: float):
        """Uniform (ts, zs) samples at the given parameter spacing."""
        n = max(2, int(abs(self.duration) / spacing) + 1)
        ts = np.linspace(self.ts[0], self.ts[-1], n)
        return ts, self.position_at(ts)

    def to_csv(self, path):
        data = np.column_stack([self.ts, self.zs.real, self.zs.imag,
                                self.vs.real, self.vs.imag])
        np.savetxt(path, data, delimiter=",", header="t,re,im,vre,vim", comments="")


def _unpack_v0(F, v0):
    if isinstance(v0, TangentVector):
        z, w = v0.base.z, v0.w
    else:
        z, w = v0
        z, w = _as_complex(z), complex(w)
    Fv = F.value(z, w)
    if abs(Fv - 1.0) > 1e-6:
        raise ValueError(f"initial vector not unit: F(v0) = {Fv!r}")
    if abs(Fv - 1.0) > 1e-9:
        w = w / Fv      # drift-sized deviation, e.g. restarting from a path end
    return z, w


def _flow_python(F, z, v, T, tol, h_max, cap):
    """Generic adaptive DP45 for metrics without a compiled kernel."""
    A = [
        (),
        (1 / 5,),
        (3 / 40, 9 / 40),
        (44 / 45, -56 / 15, 32 / 9),
        (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
        (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    ]
    B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
    E = (35 / 384 - 5179 / 57600, 0.0, 500 / 1113 - 7571 / 16695,
         125 / 192 - 393 / 640, -2187 / 6784 + 92097 / 339200,
         11 / 84 - 187 / 2100, -1 / 40)
    rhs = lambda zz, vv: (vv, F.geodesic_acceleration(zz, vv))
    direction = 1.0 if T >= 0 else -1.0
    t = 0.0
    out = [(t, z, v, rhs(z, v)[1])]
    h = direction * min(h_max, 0.01)
    drift, max_corr, accepted = 0.0, 0.0, 0
    k1 = rhs(z, v)
    while (T - t) * direction > 1e-14:
        if abs(h) > abs(T - t):
            h = T - t
        ks = [k1]
        for row in A[1:]:
            zz = z + h * sum(a * k[0] for a, k in zip(row, ks))
            vv = v + h * sum(a * k[1] for a, k in zip(row, ks))
            ks.append(rhs(zz, vv))
        z_new = z + h * sum(b * k[0] for b, k in zip(B, ks))
        v_new = v + h * sum(b * k[1] for b, k in zip(B, ks))
        k7 = rhs(z_new, v_new)
        ks.append(k7)
        err_z = h * sum(e * k[0] for e, k in zip(E, ks))
        err_v = h * sum(e * k[1] for e, k in zip(E, ks))
        sc = tol * (1.0 + max(abs(z), abs(v)))
        err = max(abs(err_z), abs(err_v)) / sc
        if err <= 1.0:
            t, z, v, k1 = t + h, z_new, v_new, k7
            accepted += 1
            if abs(z) >= 1.0 - 1e-9:
                out.append((t, z, v, k7[1]))
                return out, 1, drift, max_corr
            Fv = F.value(z, v)
            drift = max(drift, abs(Fv - 1.0))
            if accepted % RENORM_EVERY == 0:
                max_corr = max(max_corr, abs(Fv - 1.0))
                v = v / Fv
                k1 = rhs(z, v)
            out.append((t, z, v, k1[1]))
            if len(out) >= cap:
                return out, 3, drift, max_corr
        fac = min(5.0, max(0.2, 0.9 * err ** -0.2)) if err > 0 else 5.0
        h *= fac
        if abs(h) > h_max:
            h = direction * h_max
        if abs(h) < 1e-13:
            return out, 2, drift, max_corr
    return out, 0, drift, max_corr


def flow(F: FinslerMetric, v0, T: float, tol: float = DEFAULT_TOL, *,
         h_max: float = H_MAX, renorm_every: int = RENORM_EVERY) -> GeodesicPath:
    """Integrate the unit-speed geodesic flow for time T (negative = backward).

    Energy drift max |F(c') - 1| is kept below ~tol (default 1e-8); raises
    LeftDomain near |z| = 1 and StepUnderflow when the controller collapses.
    """
    z, w = _unpack_v0(F, v0)
    if T == 0.0:
        acc = F.geodesic_acceleration(z, w)
        return GeodesicPath(F.name, np.array([0.0]), np.array([z]),
                            np.array([w]), np.array([acc]), 0.0, 0.0, F)
    rtol = 0.1 * tol
    spec = F.kernel_spec()
    if spec is not None:
        cap = 256 + int(8 * abs(T) / h_max)
        for _ in range(4):
            # retry tighter when order reduction (C^2 kinks) inflates the drift
            ts, zs, vs, accs, status, drift, corr, _, _ = spec.flow(
                z, w, T, rtol, h_max, renorm_every, cap)
            if status == 3:
                cap *= 4
                continue
            if drift > tol and rtol > 1e-14:
                rtol *= 0.02
                continue
            break
        path = GeodesicPath(F.name, ts.copy(), zs.copy(), vs.copy(), accs.copy(),
                            float(drift), float(corr), F)
    else:
        out, status, drift, corr = _flow_python(F, z, w, T, rtol, h_max,
                                                cap=int(1e6))
        ts = np.array([o[0] for o in out])
        zs = np.array([o[1] for o in out], dtype=complex)
        vs = np.array([o[2] for o in out], dtype=complex)
        accs = np.array([o[3] for o in out], dtype=complex)
        path = GeodesicPath(F.name, ts, zs, vs, accs, float(drift), float(corr), F)
    if status == 1:
        raise LeftDomain(f"left the disc at t = {path.ts[-1]:.3f} (horizon {T})",
                         path)
    if status == 2:
        raise StepUnderflow("adaptive step collapsed below 1e-13")
    return path


def energy_drift(path: GeodesicPath) -> float:
    """max |F(c'(t)) - 1| over the recorded samples."""
    if path.metric is None:
        return path.energy_drift_max
    vals = path.metric.value_many(path.zs, path.vs)
    return float(np.max(np.abs(vals - 1.0)))
