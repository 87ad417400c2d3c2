"""Compiled numerical cores: adaptive geodesic flow for the built-in metric
families, with greedy fundamental-domain reduction and bump orbit sums done
inside the integration loop.

Everything here works on plain scalars/arrays so numba can compile it; when
numba is unavailable the same code runs as pure Python (slow but identical).
Flow status codes: 0 ok, 1 left the disc (|z| >= 1 - 1e-9), 2 step underflow,
3 record buffer overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit

    NUMBA_OK = True
except Exception:  # pragma: no cover - numba is a declared dependency
    NUMBA_OK = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


BOUNDARY_GUARD = 1e-9
H_MIN = 1e-13

# Dormand-Prince 5(4) coefficients
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    35 / 384 - 5179 / 57600,
    500 / 1113 - 7571 / 16695,
    125 / 192 - 393 / 640,
    -2187 / 6784 + 92097 / 339200,
    11 / 84 - 187 / 2100,
    -1 / 40,
)


@njit(cache=True)
def _reduce_composite(zeta, Ca, Cb, pa, pb):
    """Greedily update the composite map C so that C(zeta) is in the domain.

    Returns (z_reduced, Ca, Cb). C acts by z -> (Ca z + Cb)/(conj(Cb) z + conj(Ca));
    pa/pb hold the eight side pairings.
    """
    zr = (Ca * zeta + Cb) / (np.conj(Cb) * zeta + np.conj(Ca))
    for _ in range(200):
        r0 = abs(zr)
        best = -1
        best_r = r0 * (1.0 - 1e-15)
        for k in range(pa.shape[0]):
            w = (pa[k] * zr + pb[k]) / (np.conj(pb[k]) * zr + np.conj(pa[k]))
            rw = abs(w)
            if rw < best_r:
                best_r = rw
                best = k
        if best < 0:
            break
        na = pa[best] * Ca + pb[best] * np.conj(Cb)
        nb = pa[best] * Cb + pb[best] * np.conj(Ca)
        s = 1.0 / math.sqrt(abs(na) ** 2 - abs(nb) ** 2)
        Ca, Cb = na * s, nb * s
        zr = (Ca * zeta + Cb) / (np.conj(Cb) * zeta + np.conj(Ca))
    return zr, Ca, Cb


@njit(cache=True)
def _phi_core(zr, amp, rho, orbit):
    """Bump orbit sum and its gradient at a (near-)domain point."""
    phi = 0.0
    grad = 0.0j
    one_z = 1.0 - abs(zr) ** 2
    for j in range(orbit.shape[0]):
        p = orbit[j]
        one_p = 1.0 - abs(p) ** 2
        dz2 = abs(zr - p) ** 2
        Q = 2.0 * dz2 / (one_z * one_p)
        d = math.acosh(1.0 + Q)
        if d >= rho:
            continue
        u = 1.0 - (d / rho) ** 2
        phi += u * u * u
        if d > 1e-14:
            gradQ = (2.0 / one_p) * (2.0 * (zr - p) / one_z + dz2 * 2.0 * zr / one_z ** 2)
            grad_d = gradQ / math.sqrt(Q * Q + 2.0 * Q)
            grad += (-6.0 * d / rho ** 2) * u * u * grad_d
    return amp * phi, amp * grad


@njit(cache=True)
def _conformal_eval(zeta, amp, rho, orbit, pa, pb, Ca, Cb):
    """phi and log-density gradient g = 2 grad(phi) + 4 z/(1-|z|^2) in chart."""
    if amp == 0.0:
        g = 4.0 * zeta / (1.0 - abs(zeta) ** 2)
        return 0.0, g, Ca, Cb
    zr, Ca, Cb = _reduce_composite(zeta, Ca, Cb, pa, pb)
    phi, grad_core = _phi_core(zr, amp, rho, orbit)
    cderiv = 1.0 / (np.conj(Cb) * zeta + np.conj(Ca)) ** 2
    grad_chart = np.conj(cderiv) * grad_core
    g = 2.0 * grad_chart + 4.0 * zeta / (1.0 - abs(zeta) ** 2)
    return phi, g, Ca, Cb


@njit(cache=True)
def _conformal_rhs(z, v, amp, rho, orbit, pa, pb, Ca, Cb):
    phi, g, Ca, Cb = _conformal_eval(z, amp, rho, orbit, pa, pb, Ca, Cb)
    acc = 0.5 * abs(v) ** 2 * g - (np.conj(g) * v).real * v
    return acc, phi, Ca, Cb


@njit(cache=True)
def _randers_rhs(z, v, eps, Ma, Mb):
    """EL acceleration for F = lambda|v| + Re(c v), c = eps * chart'(z)."""
    lam = 2.0 / (1.0 - abs(z) ** 2)
    den = np.conj(Mb) * z + np.conj(Ma)
    c = eps / (den * den)
    cp = -2.0 * eps * np.conj(Mb) / (den * den * den)
    av = abs(v)
    what = v / av
    F = lam * av + (c * v).real
    q = lam * what + np.conj(c)                     # d_v F (complex rep)
    grad_lam = lam * lam * z
    gF = av * grad_lam + np.conj(cp * v)            # d_x F (complex rep)
    # rhs = dL/dx - Hess_vx v ; dL/dx = F gF
    # Hess_vx v = (gF . v) q + F [(grad_lam . v) what + Re(cp v) - i Im... ]
    gFv = (np.conj(gF) * v).real
    glv = (np.conj(grad_lam) * v).real
    dc_dt = cp * v                                   # dc/dt along the motion
    hv = gFv * q + F * (glv * what + np.conj(dc_dt))
    rhs = F * gF - hv
    # solve (q q^T + F lam/av (I - what what^T)) vdot = rhs
    alpha = F * lam / av
    # matrix = alpha I + q q^T - alpha what what^T; invert via 2x2 closed form
    m11 = alpha + q.real * q.real - alpha * what.real * what.real
    m12 = q.real * q.imag - alpha * what.real * what.imag
    m22 = alpha + q.imag * q.imag - alpha * what.imag * what.imag
    det = m11 * m22 - m12 * m12
    rx, ry = rhs.real, rhs.imag
    ax = (m22 * rx - m12 * ry) / det
    ay = (m11 * ry - m12 * rx) / det
    return complex(ax, ay), F


@njit(cache=True)
def flow_conformal(z0, v0, T, rtol, h_max, amp, rho, orbit, pa, pb, Ca, Cb,
                   renorm_every, cap):
    ts = np.empty(cap)
    zs = np.empty(cap, dtype=np.complex128)
    vs = np.empty(cap, dtype=np.complex128)
    accs = np.empty(cap, dtype=np.complex128)
    direction = 1.0 if T >= 0 else -1.0
    t = 0.0
    z, v = z0, v0
    acc, phi, Ca, Cb = _conformal_rhs(z, v, amp, rho, orbit, pa, pb, Ca, Cb)
    k1z, k1v = v, acc
    n = 0
    ts[n], zs[n], vs[n], accs[n] = t, z, v, acc
    n += 1
    h = direction * min(h_max, 0.01 + 0.0 * abs(T))
    drift = 0.0
    max_corr = 0.0
    accepted = 0
    status = 0
    while (T - t) * direction > 1e-14:
        if abs(h) > abs(T - t):
            h = T - t
        z2 = z + h * _A21 * k1z
        v2 = v + h * _A21 * k1v
        a2, _, Ca, Cb = _conformal_rhs(z2, v2, amp, rho, orbit, pa, pb, Ca, Cb)
        k2z, k2v = v2, a2
        z3 = z + h * (_A31 * k1z + _A32 * k2z)
        v3 = v + h * (_A31 * k1v + _A32 * k2v)
        a3, _, Ca, Cb = _conformal_rhs(z3, v3, amp, rho, orbit, pa, pb, Ca, Cb)
        k3z, k3v = v3, a3
        z4 = z + h * (_A41 * k1z + _A42 * k2z + _A43 * k3z)
        v4 = v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v)
        a4, _, Ca, Cb = _conformal_rhs(z4, v4, amp, rho, orbit, pa, pb, Ca, Cb)
        k4z, k4v = v4, a4
        z5 = z + h * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z)
        v5 = v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v)
        a5, _, Ca, Cb = _conformal_rhs(z5, v5, amp, rho, orbit, pa, pb, Ca, Cb)
        k5z, k5v = v5, a5
        z6 = z + h * (_A61 * k1z + _A62 * k2z + _A63 * k3z + _A64 * k4z + _A65 * k5z)
        v6 = v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v)
        a6, _, Ca, Cb = _conformal_rhs(z6, v6, amp, rho, orbit, pa, pb, Ca, Cb)
        k6z, k6v = v6, a6
        z_new = z + h * (_B1 * k1z + _B3 * k3z + _B4 * k4z + _B5 * k5z + _B6 * k6z)
        v_new = v + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
        a7, phi_new, Ca, Cb = _conformal_rhs(z_new, v_new, amp, rho, orbit, pa, pb, Ca, Cb)
        k7z, k7v = v_new, a7
        err_z = h * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z + _E6 * k6z + _E7 * k7z)
        err_v = h * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v)
        sc = rtol * (1.0 + max(abs(z), abs(v)))
        err = max(abs(err_z), abs(err_v)) / sc
        if err <= 1.0:
            t += h
            z, v = z_new, v_new
            k1z, k1v = k7z, k7v
            accepted += 1
            if abs(z) >= 1.0 - BOUNDARY_GUARD:
                status = 1
                ts[n], zs[n], vs[n], accs[n] = t, z, v, a7
                n += 1
                break
            mu = math.exp(phi_new) * 2.0 / (1.0 - abs(z) ** 2)
            Fv = mu * abs(v)
            if abs(Fv - 1.0) > drift:
                drift = abs(Fv - 1.0)
            if renorm_every > 0 and accepted % renorm_every == 0:
                corr = abs(Fv - 1.0)
                if corr > max_corr:
                    max_corr = corr
                v = v / Fv
                acc2, _, Ca, Cb = _conformal_rhs(z, v, amp, rho, orbit, pa, pb, Ca, Cb)
                k1z, k1v = v, acc2
            if n >= cap:
                status = 3
                break
            ts[n], zs[n], vs[n], accs[n] = t, z, v, k1v
            n += 1
        fac = 0.9 * err ** -0.2 if err > 0 else 5.0
        if fac > 5.0:
            fac = 5.0
        if fac < 0.2:
            fac = 0.2
        h = h * fac
        if abs(h) > h_max:
            h = direction * h_max
        if abs(h) < H_MIN:
            status = 2
            break
    return ts[:n], zs[:n], vs[:n], accs[:n], status, drift, max_corr, Ca, Cb


@njit(cache=True)
def flow_randers(z0, v0, T, rtol, h_max, eps, Ma, Mb, renorm_every, cap):
    ts = np.empty(cap)
    zs = np.empty(cap, dtype=np.complex128)
    vs = np.empty(cap, dtype=np.complex128)
    accs = np.empty(cap, dtype=np.complex128)
    direction = 1.0 if T >= 0 else -1.0
    t = 0.0
    z, v = z0, v0
    acc, _ = _randers_rhs(z, v, eps, Ma, Mb)
    k1z, k1v = v, acc
    n = 0
    ts[n], zs[n], vs[n], accs[n] = t, z, v, acc
    n += 1
    h = direction * min(h_max, 0.01)
    drift = 0.0
    max_corr = 0.0
    accepted = 0
    status = 0
    while (T - t) * direction > 1e-14:
        if abs(h) > abs(T - t):
            h = T - t
        z2 = z + h * _A21 * k1z
        v2 = v + h * _A21 * k1v
        a2, _ = _randers_rhs(z2, v2, eps, Ma, Mb)
        k2z, k2v = v2, a2
        z3 = z + h * (_A31 * k1z + _A32 * k2z)
        v3 = v + h * (_A31 * k1v + _A32 * k2v)
        a3, _ = _randers_rhs(z3, v3, eps, Ma, Mb)
        k3z, k3v = v3, a3
        z4 = z + h * (_A41 * k1z + _A42 * k2z + _A43 * k3z)
        v4 = v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v)
        a4, _ = _randers_rhs(z4, v4, eps, Ma, Mb)
        k4z, k4v = v4, a4
        z5 = z + h * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z)
        v5 = v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v)
        a5, _ = _randers_rhs(z5, v5, eps, Ma, Mb)
        k5z, k5v = v5, a5
        z6 = z + h * (_A61 * k1z + _A62 * k2z + _A63 * k3z + _A64 * k4z + _A65 * k5z)
        v6 = v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v)
        a6, _ = _randers_rhs(z6, v6, eps, Ma, Mb)
        k6z, k6v = v6, a6
        z_new = z + h * (_B1 * k1z + _B3 * k3z + _B4 * k4z + _B5 * k5z + _B6 * k6z)
        v_new = v + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
        a7, F_new = _randers_rhs(z_new, v_new, eps, Ma, Mb)
        k7z, k7v = v_new, a7
        err_z = h * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z + _E6 * k6z + _E7 * k7z)
        err_v = h * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v)
        sc = rtol * (1.0 + max(abs(z), abs(v)))
        err = max(abs(err_z), abs(err_v)) / sc
        if err <= 1.0:
            t += h
            z, v = z_new, v_new
            k1z, k1v = k7z, k7v
            accepted += 1
            if abs(z) >= 1.0 - BOUNDARY_GUARD:
                status = 1
                ts[n], zs[n], vs[n], accs[n] = t, z, v, a7
                n += 1
                break
            if abs(F_new - 1.0) > drift:
                drift = abs(F_new - 1.0)
            if renorm_every > 0 and accepted % renorm_every == 0:
                corr = abs(F_new - 1.0)
                if corr > max_corr:
                    max_corr = corr
                v = v / F_new
                acc2, _ = _randers_rhs(z, v, eps, Ma, Mb)
                k1z, k1v = v, acc2
            if n >= cap:
                status = 3
                break
            ts[n], zs[n], vs[n], accs[n] = t, z, v, k1v
            n += 1
        fac = 0.9 * err ** -0.2 if err > 0 else 5.0
        if fac > 5.0:
            fac = 5.0
        if fac < 0.2:
            fac = 0.2
        h = h * fac
        if abs(h) > h_max:
            h = direction * h_max
        if abs(h) < H_MIN:
            status = 2
            break
    return ts[:n], zs[:n], vs[:n], accs[:n], status, drift, max_corr, Ma, Mb


_EMPTY_ORBIT = np.zeros(0, dtype=np.complex128)
_EMPTY_PAIR = np.ones(1, dtype=np.complex128)


@dataclass
class KernelSpec:
    """Flow-kernel descriptor for one metric family in one chart."""

    kind: int                 # 0 conformal, 1 randers
    amp: float = 0.0
    rho: float = 1.0
    eps: float = 0.0
    orbit: np.ndarray = None
    pa: np.ndarray = None
    pb: np.ndarray = None
    chart_a: complex = 1.0 + 0j
    chart_b: complex = 0.0j

    def flow(self, z0, v0, T, rtol, h_max, renorm_every=100, cap=None):
        if cap is None:
            cap = 256 + int(8 * abs(T) / h_max)
        if self.kind == 0:
            return flow_conformal(
                complex(z0), complex(v0), float(T), float(rtol), float(h_max),
                self.amp, self.rho, self.orbit, self.pa, self.pb,
                self.chart_a, self.chart_b, int(renorm_every), int(cap))
        return flow_randers(
            complex(z0), complex(v0), float(T), float(rtol), float(h_max),
            self.eps, self.chart_a, self.chart_b, int(renorm_every), int(cap))


def conformal_spec(metric, chart: "MobiusMap|None" = None) -> KernelSpec:
    amp = getattr(metric, "amplitude", 0.0)
    rho = getattr(metric, "radius", 1.0)
    if amp == 0.0:
        orbit, pa, pb = _EMPTY_ORBIT, _EMPTY_PAIR, _EMPTY_PAIR * 0
    else:
        orbit = np.asarray(metric.core_orbit, dtype=np.complex128)
        pa = metric.group.pairing_a
        pb = metric.group.pairing_b
    ca, cb = (1.0 + 0j, 0.0j) if chart is None else (chart.a, chart.b)
    return KernelSpec(0, amp=float(amp), rho=float(rho), orbit=orbit,
                      pa=pa, pb=pb, chart_a=ca, chart_b=cb)


def randers_spec(metric) -> KernelSpec:
    chart = metric.chart
    ca, cb = (1.0 + 0j, 0.0j) if chart is None else (chart.a, chart.b)
    return KernelSpec(1, eps=float(metric.eps), chart_a=ca, chart_b=cb)


def reversed_spec(spec: KernelSpec) -> KernelSpec:
    if spec.kind == 0:
        return spec   # conformal metrics are reversible
    if spec.chart_b == 0 and spec.chart_a == 1.0 + 0j:
        return KernelSpec(1, eps=-spec.eps)
    raise ValueError("cannot reverse a chart-pulled randers spec")
