import math

import numpy as np
import pytest

from hyperlab.disc_geometry import MobiusMap, hyperbolic_distance
from hyperlab.finsler_metrics import (
    FinslerMetric,
    InvalidAmplitude,
    NewtonDiverged,
    conformal_bump,
    hyperbolic_norm,
    legendre_inverse,
    legendre_transform,
    metric_from_spec,
    randers_exact,
    reversed_metric,
    verify_metric,
)
from hyperlab.fuchsian_group import genus2_group


@pytest.fixture(scope="module")
def G():
    return genus2_group()


@pytest.fixture(scope="module")
def bump(G):
    return conformal_bump(G, 0.5, 0.8)


def sample(rng, n, rmax=0.9):
    r = rmax * np.sqrt(rng.random(n))
    th = 2 * np.pi * rng.random(n)
    zs = r * np.exp(1j * th)
    ws = rng.normal(size=n) + 1j * rng.normal(size=n)
    return zs, ws


class TestHyperbolicNorm:
    def test_origin_factor_two(self):
        F = hyperbolic_norm()
        assert F.value(0j, 0.5 + 0j) == pytest.approx(1.0, abs=1e-15)

    def test_metric_formula(self):
        F = hyperbolic_norm()
        assert F.value(0.5 + 0j, 1.0 + 0j) == pytest.approx(2 / 0.75, abs=1e-12)

    def test_homogeneity(self):
        F = hyperbolic_norm()
        assert F.value(0j, 1 + 0j) == pytest.approx(2 * F.value(0j, 0.5 + 0j), abs=1e-15)

    def test_verify_passes(self):
        rep = verify_metric(hyperbolic_norm(), 100, seed=0)
        assert rep.passed
        assert rep.equivalence.c_F == pytest.approx(1.05, abs=1e-9)


class TestRanders:
    def test_distance_oracle_values(self):
        F = randers_exact(0.2)
        assert F.oracle_distance(0j, 0.5 + 0j) == pytest.approx(math.log(3) + 0.1, abs=1e-12)
        assert F.oracle_distance(0.5 + 0j, 0j) == pytest.approx(math.log(3) - 0.1, abs=1e-12)

    def test_zero_amplitude_is_hyperbolic(self):
        F0 = randers_exact(0.0)
        Fh = hyperbolic_norm()
        rng = np.random.default_rng(0)
        zs, ws = sample(rng, 20)
        for z, w in zip(zs, ws):
            assert F0.value(z, w) == pytest.approx(Fh.value(z, w), rel=1e-14)

    def test_amplitude_guard(self):
        with pytest.raises(InvalidAmplitude):
            randers_exact(2.0)

    def test_verify_passes_with_expected_cf(self):
        rep = verify_metric(randers_exact(0.2), 100, seed=1)
        assert rep.passed
        assert rep.equivalence.c_F <= 1.25

    def test_analytic_derivatives_match_fd(self):
        # spec invariants: gradient vs FD of F^2/2 (rel <= 1e-6), hessian vs
        # FD of fiber_gradient (rel <= 1e-5), both in the matrix/vector norm
        F = randers_exact(0.2)
        base = FinslerMetric()
        base.value = F.value
        rng = np.random.default_rng(3)
        zs, ws = sample(rng, 30)
        h = 1e-5
        for z, w in zip(zs, ws):
            g = F.fiber_gradient(z, w)
            g_fd = FinslerMetric.fiber_gradient(base, z, w)
            assert np.linalg.norm(g - g_fd) <= 1e-6 * np.linalg.norm(g_fd)
            hh = h * max(1.0, abs(w))
            col_x = (F.fiber_gradient(z, w + hh) - F.fiber_gradient(z, w - hh)) / (2 * hh)
            col_y = (F.fiber_gradient(z, w + 1j * hh) - F.fiber_gradient(z, w - 1j * hh)) / (2 * hh)
            H_fd = np.column_stack([col_x, col_y])
            H = F.fiber_hessian(z, w)
            assert np.linalg.norm(H - H_fd) <= 1e-5 * np.linalg.norm(H_fd)
            p_fd = FinslerMetric.position_gradient(base, z, w)
            p = F.position_gradient(z, w)
            assert np.linalg.norm(p - p_fd) <= 1e-4 * max(1.0, np.linalg.norm(p_fd))

    def test_mixed_hessian_matches_fd(self):
        F = randers_exact(0.2)
        rng = np.random.default_rng(5)
        zs, ws = sample(rng, 10)
        h = 1e-6
        for z, w in zip(zs, ws):
            col_x = (F.fiber_gradient(z + h, w) - F.fiber_gradient(z - h, w)) / (2 * h)
            col_y = (F.fiber_gradient(z + 1j * h, w) - F.fiber_gradient(z - 1j * h, w)) / (2 * h)
            M_fd = np.column_stack([col_x, col_y])
            assert np.allclose(F.mixed_hessian(z, w), M_fd, rtol=1e-4, atol=1e-5)


class TestConformalBump:
    def test_zero_amplitude_is_hyperbolic(self, G):
        F0 = conformal_bump(G, 0.0, 0.8)
        Fh = hyperbolic_norm()
        rng = np.random.default_rng(2)
        zs, ws = sample(rng, 20)
        for z, w in zip(zs, ws):
            assert F0.value(z, w) == pytest.approx(Fh.value(z, w), rel=1e-12)

    def test_value_at_orbit_center(self, G):
        # only tau = id contributes at 0 when rho < half the orbit separation
        F = conformal_bump(G, 0.5, 0.8)
        sep = min(
            hyperbolic_distance(p.map(0j), 0j) for p in G.side_pairings
        )
        assert 0.8 < sep / 2
        Fh = hyperbolic_norm()
        w = 0.3 + 0.1j
        assert F.value(0j, w) == pytest.approx(math.exp(0.5) * Fh.value(0j, w), rel=1e-12)

    def test_amplitude_guard(self, G):
        with pytest.raises(InvalidAmplitude):
            conformal_bump(G, 2.5, 0.8)
        with pytest.raises(InvalidAmplitude):
            conformal_bump(G, 0.5, -1.0)

    def test_invariance_under_generators(self, G, bump):
        rng = np.random.default_rng(7)
        zs, ws = sample(rng, 50, rmax=0.93)
        for z, w in zip(zs, ws):
            f0 = bump.value(z, w)
            for g in G.generators:
                f1 = bump.value(g.map(z), g.map.derivative(z) * w)
                assert abs(f1 - f0) <= 1e-6 * max(1.0, abs(f0))

    def test_gradient_matches_fd(self, bump):
        rng = np.random.default_rng(11)
        zs, _ = sample(rng, 25, rmax=0.85)
        h = 1e-6
        for z in zs:
            g = bump.phi_gradient(z)
            gx = (bump.phi(z + h) - bump.phi(z - h)) / (2 * h)
            gy = (bump.phi(z + 1j * h) - bump.phi(z - 1j * h)) / (2 * h)
            assert g.real == pytest.approx(gx, abs=2e-7)
            assert g.imag == pytest.approx(gy, abs=2e-7)

    def test_verify_passes(self, bump):
        rep = verify_metric(bump, 100, seed=3)
        assert rep.passed, rep.notes


class TestVerifyMetricFailure:
    def test_l1_pseudo_metric_fails(self):
        class L1(FinslerMetric):
            name = "l1"

            def value(self, z, w):
                w = complex(w)
                return abs(w.real) + abs(w.imag)

        rep = verify_metric(L1(), 40, seed=4)
        assert not rep.passed
        assert rep.min_hessian_eigenvalue < 1e-6


class TestLegendre:
    def test_hyperbolic_closed_form_at_origin(self):
        F = hyperbolic_norm()
        v = legendre_inverse(F, 0j, np.array([1.0, 0.0]))
        assert v == pytest.approx(0.25 + 0j, abs=1e-10)

    def test_round_trip_100(self):
        F = hyperbolic_norm()
        rng = np.random.default_rng(5)
        zs, ws = sample(rng, 100)
        for z, w in zip(zs, ws):
            p = legendre_transform(F, z, w)
            v = legendre_inverse(F, z, p)
            resid = np.linalg.norm(legendre_transform(F, z, v) - p)
            assert resid <= 1e-10 * max(1, np.linalg.norm(p))

    def test_randers_round_trip(self):
        F = randers_exact(0.2)
        rng = np.random.default_rng(6)
        zs, ws = sample(rng, 50)
        for z, w in zip(zs, ws):
            p = legendre_transform(F, z, w)
            v = legendre_inverse(F, z, p)
            assert v == pytest.approx(w, rel=1e-8, abs=1e-9)

    def test_unit_vectors_round_trip(self, bump):
        rng = np.random.default_rng(7)
        zs, _ = sample(rng, 20, rmax=0.8)
        for z in zs:
            u = bump.unit_vector(z, float(np.pi / 3))
            p = legendre_transform(bump, z, u)
            v = legendre_inverse(bump, z, p)
            assert v == pytest.approx(u, rel=1e-9, abs=1e-10)

    def test_zero_covector_rejected(self):
        with pytest.raises(ValueError):
            legendre_inverse(hyperbolic_norm(), 0j, np.zeros(2))


class TestReversedMetric:
    def test_conformal_reversal_is_identity(self, bump):
        assert reversed_metric(bump) is bump

    def test_randers_reversal_flips_eps(self):
        F = randers_exact(0.2)
        Fr = reversed_metric(F)
        assert Fr.eps == -0.2
        assert Fr.value(0.1 + 0j, 0.3 + 0.4j) == pytest.approx(
            F.value(0.1 + 0j, -(0.3 + 0.4j)), rel=1e-14)


class TestMetricSpec:
    def test_parse(self, G):
        assert metric_from_spec("hyperbolic").name == "hyperbolic"
        assert metric_from_spec("randers:0.2").eps == 0.2
        b = metric_from_spec("bump:0.5:0.8", group=G)
        assert b.amplitude == 0.5 and b.radius == 0.8

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            metric_from_spec("euclidean")
