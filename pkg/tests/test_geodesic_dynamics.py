import math

import numpy as np
import pytest

from hyperlab.disc_geometry import TangentVector, hyperbolic_distance
from hyperlab.finsler_metrics import conformal_bump, hyperbolic_norm, randers_exact
from hyperlab.fuchsian_group import genus2_group
from hyperlab.geodesic_dynamics import GeodesicPath, LeftDomain, energy_drift, flow


@pytest.fixture(scope="module")
def G():
    return genus2_group()


@pytest.fixture(scope="module")
def bump(G):
    return conformal_bump(G, 0.5, 0.8)


def unit(F, z, theta):
    return (z, F.unit_vector(z, theta))


class TestHyperbolicFlow:
    def test_diameter_tanh_law(self):
        F = hyperbolic_norm()
        path = flow(F, unit(F, 0j, 0.0), math.log(3.0))
        assert path.end_z == pytest.approx(0.5 + 0j, abs=1e-8)

    def test_zero_horizon(self):
        F = hyperbolic_norm()
        path = flow(F, unit(F, 0.1 + 0.2j, 1.0), 0.0)
        assert path.n_samples == 1
        assert path.end_z == 0.1 + 0.2j

    def test_non_unit_rejected(self):
        F = hyperbolic_norm()
        with pytest.raises(ValueError):
            flow(F, (0j, 1.0 + 0j), 1.0)

    def test_unit_speed_every_sample(self):
        F = hyperbolic_norm()
        path = flow(F, unit(F, 0.2j, 0.7), 8.0)
        vals = F.value_many(path.zs, path.vs)
        assert np.max(np.abs(vals - 1.0)) <= 1e-6

    def test_interpolation_matches_closed_form(self):
        F = hyperbolic_norm()
        path = flow(F, unit(F, 0j, 0.0), 10.0)
        ts = np.linspace(0.0, 10.0, 257)
        zs = path.position_at(ts)
        assert np.max(np.abs(zs - np.tanh(ts / 2))) <= 2e-8

    def test_backward_flow(self):
        F = hyperbolic_norm()
        path = flow(F, unit(F, 0j, 0.0), -math.log(3.0))
        assert path.end_z == pytest.approx(-0.5 + 0j, abs=1e-8)

    def test_flow_property(self):
        F = hyperbolic_norm()
        for s, t in [(0.5, 1.5), (2.0, 3.0), (1.0, 4.0)]:
            p1 = flow(F, unit(F, 0.1 + 0.1j, 0.9), s)
            p2 = flow(F, (p1.end_z, p1.end_v), t)
            p3 = flow(F, unit(F, 0.1 + 0.1j, 0.9), s + t)
            assert abs(p2.end_z - p3.end_z) <= 1e-6

    def test_reversibility(self):
        F = hyperbolic_norm()
        p = flow(F, unit(F, 0.1j, 0.3), 3.0)
        back = flow(F, (p.end_z, -p.end_v), 3.0)
        assert abs(back.end_z - 0.1j) <= 1e-6

    def test_left_domain_guard(self):
        F = hyperbolic_norm()
        with pytest.raises(LeftDomain):
            flow(F, unit(F, 0j, 0.0), 50.0)

    def test_long_horizon_drift(self):
        # longest horizon inside the |z| < 1 - 1e-9 guard (~21.4)
        F = hyperbolic_norm()
        path = flow(F, unit(F, 0j, 0.0), 21.0)
        assert energy_drift(path) <= 1e-6


class TestEnergyDrift:
    def test_fresh_path_within_tol(self):
        F = hyperbolic_norm()
        path = flow(F, unit(F, 0.1 + 0j, 0.4), 5.0, tol=1e-8)
        assert energy_drift(path) <= 1e-8

    def test_scaled_velocities(self):
        F = hyperbolic_norm()
        path = flow(F, unit(F, 0.1 + 0j, 0.4), 3.0)
        scaled = GeodesicPath(path.metric_name, path.ts, path.zs,
                              path.vs * 1.01, path.accs, metric=F)
        assert energy_drift(scaled) == pytest.approx(0.01, abs=2e-3)


class TestRandersFlow:
    def test_same_point_set_as_diameter(self):
        F = randers_exact(0.2)
        path = flow(F, unit(F, 0j, 0.0), 2.0)
        assert np.max(np.abs(path.zs.imag)) <= 1e-10

    def test_exact_form_time_bookkeeping(self):
        # at unit F-speed, T = d_h(0, c(T)) + eps * Re(c(T))
        F = randers_exact(0.2)
        T = 2.0
        path = flow(F, unit(F, 0j, 0.0), T)
        x = path.end_z.real
        assert T == pytest.approx(math.log((1 + x) / (1 - x)) + 0.2 * x, abs=1e-7)

    def test_asymmetric_parametrization(self):
        F = randers_exact(0.2)
        fwd = flow(F, unit(F, 0j, 0.0), 1.0)
        bwd = flow(F, unit(F, 0j, math.pi), 1.0)
        # both on the real axis, but the backward end is euclidean-farther
        assert np.max(np.abs(fwd.zs.imag)) <= 1e-10
        assert np.max(np.abs(bwd.zs.imag)) <= 1e-10
        assert abs(bwd.end_z) > abs(fwd.end_z) + 1e-3

    def test_drift(self):
        F = randers_exact(0.2)
        path = flow(F, unit(F, 0.2 + 0.1j, 2.1), 8.0)
        assert energy_drift(path) <= 1e-7


class TestBumpFlow:
    def test_drift(self, bump):
        path = flow(bump, unit(bump, 0.05 + 0.02j, 0.8), 10.0)
        assert energy_drift(path) <= 1e-7

    def test_gamma_equivariance(self, G, bump):
        tau = G.generators[0].map
        z0, th = 0.1 + 0.05j, 0.8
        v0 = bump.unit_vector(z0, th)
        p = flow(bump, (z0, v0), 4.0)
        z1 = tau(z0)
        v1 = tau.derivative(z0) * v0
        p_tau = flow(bump, (z1, v1), 4.0)
        ts = np.linspace(0, 4.0, 41)
        moved = np.array([tau(z) for z in p.position_at(ts)])
        assert np.max(np.abs(moved - p_tau.position_at(ts))) <= 1e-6

    def test_flow_property(self, bump):
        s, t = 1.5, 2.5
        v = unit(bump, 0.1 + 0.1j, 0.3)
        p1 = flow(bump, v, s)
        p2 = flow(bump, (p1.end_z, p1.end_v), t)
        p3 = flow(bump, v, s + t)
        assert abs(p2.end_z - p3.end_z) <= 1e-6

    def test_bends_compared_to_hyperbolic(self, bump):
        # a geodesic clipping the bump support must deviate from the
        # hyperbolic geodesic with the same initial data
        z0 = -0.4 + 0.25j
        v0 = bump.unit_vector(z0, -0.4)
        p = flow(bump, (z0, v0), 3.0)
        Fh = hyperbolic_norm()
        vh = Fh.unit_vector(z0, -0.4)
        ph = flow(Fh, (z0, vh), 3.0)
        sep = max(
            hyperbolic_distance(a, b)
            for a, b in zip(p.position_at(np.linspace(1, 3, 10)),
                            ph.position_at(np.linspace(1, 3, 10)))
        )
        assert sep > 1e-3
