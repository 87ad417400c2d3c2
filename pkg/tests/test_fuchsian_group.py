import math

import numpy as np
import pytest

from hyperlab.disc_geometry import DiscPoint, classify, geodesic_between, hyperbolic_distance
from hyperlab.fuchsian_group import (
    GroupElement,
    MaxWordLength,
    genus2_group,
    positive_sequence,
    reduce_to_domain,
    reduce_word,
    word_from_string,
    word_to_string,
)

ELL = 2 * math.acosh(1 + math.sqrt(2))


@pytest.fixture(scope="module")
def G():
    return genus2_group()


def random_points(rng, n, rmax=0.95):
    r = rmax * np.sqrt(rng.random(n))
    th = 2 * np.pi * rng.random(n)
    return r * np.exp(1j * th)


class TestWords:
    def test_free_reduction(self):
        assert reduce_word((1, -1, 2)) == (2,)
        assert reduce_word((1, 2, -2, -1)) == ()
        assert reduce_word((1, 2, -2, 3)) == (1, 3)

    def test_serialization_roundtrip(self):
        w = word_from_string("aBcD")
        assert word_to_string(w) == "aBcD"
        assert w == (1, -2, 3, -4)


class TestGroupStructure:
    def test_surface_relation(self, G):
        a1, b1, a2, b2 = (g.map for g in G.generators)
        R = a1 @ b1 @ a1.inverse() @ b1.inverse() @ a2 @ b2 @ a2.inverse() @ b2.inverse()
        M = R.matrix
        resid = min(np.abs(M - np.eye(2)).max(), np.abs(M + np.eye(2)).max())
        assert resid <= 1e-9

    def test_generators_hyperbolic_same_length(self, G):
        for g in G.generators:
            c = classify(g.map)
            assert c.kind == "hyperbolic"
            assert c.translation_length == pytest.approx(ELL, abs=1e-9)

    def test_first_generator_axis_is_real_diameter(self, G):
        c = classify(G.generators[0].map)
        assert c.axis.plus_end.xi == pytest.approx(1 + 0j, abs=1e-9)
        assert c.axis.minus_end.xi == pytest.approx(-1 + 0j, abs=1e-9)

    def test_side_pairing_words_match_maps(self, G):
        # element.map must equal the product of generator matrices of its word
        gens = {1: G.generators[0].map, 2: G.generators[1].map,
                3: G.generators[2].map, 4: G.generators[3].map}
        for p in G.side_pairings:
            M = np.eye(2, dtype=complex)
            for s in p.word:
                m = gens[abs(s)] if s > 0 else gens[abs(s)].inverse()
                M = M @ m.matrix
            resid = min(np.abs(M - p.map.matrix).max(), np.abs(M + p.map.matrix).max())
            assert resid <= 1e-9

    def test_generators_are_isometries(self, G):
        rng = np.random.default_rng(2)
        pts = random_points(rng, 50)
        for g in G.generators:
            for k in range(0, 50, 2):
                x, y = pts[k], pts[k + 1]
                assert abs(
                    hyperbolic_distance(g.map(x), g.map(y)) - hyperbolic_distance(x, y)
                ) <= 1e-9

    def test_octagon_angles_sum_to_2pi(self, G):
        # interior angle at each vertex between consecutive sides = pi/4
        verts = [v.z for v in G.octagon_vertices]
        total = 0.0
        for k in range(8):
            v = verts[k]
            prev_v = verts[(k - 1) % 8]
            next_v = verts[(k + 1) % 8]
            g1 = geodesic_between(DiscPoint.from_complex(v), DiscPoint.from_complex(prev_v))
            g2 = geodesic_between(DiscPoint.from_complex(v), DiscPoint.from_complex(next_v))
            a1 = np.angle(g1.velocity(0.0))
            a2 = np.angle(g2.velocity(0.0))
            ang = abs(np.angle(np.exp(1j * (a1 - a2))))
            total += ang
        assert total == pytest.approx(2 * np.pi, abs=1e-6)

    def test_vertices_on_correct_radius(self, G):
        rv = math.tanh(G.circumradius / 2)
        for v in G.octagon_vertices:
            assert abs(v.z) == pytest.approx(rv, abs=1e-12)


class TestReduction:
    def test_center_fixed(self, G):
        rep, w = reduce_to_domain(G, DiscPoint(0, 0))
        assert rep.z == 0j
        assert w.word == ()

    def test_one_step_inverse(self, G):
        a1 = G.generators[0]
        x = a1.map(0.1 + 0j)
        rep, w = reduce_to_domain(G, DiscPoint.from_complex(x))
        assert rep.z == pytest.approx(0.1 + 0j, abs=1e-9)
        assert w.word == (-1,)

    def test_far_point_reduces_into_domain(self, G):
        rng = np.random.default_rng(5)
        for _ in range(10):
            theta = 2 * np.pi * rng.random()
            z = math.tanh(6.0) * np.exp(1j * theta)   # d_h(0,z) = 12
            rep, w = reduce_to_domain(G, z)
            assert hyperbolic_distance(rep.z, 0j) <= G.circumradius + 1e-9
            assert G.in_domain(rep.z, tol=1e-9)
            assert w.map(z) == pytest.approx(rep.z, abs=1e-9)

    def test_idempotence(self, G):
        rng = np.random.default_rng(11)
        for _ in range(100):
            z = random_points(rng, 1, rmax=0.97)[0]
            rep, _ = reduce_to_domain(G, z)
            rep2, w2 = reduce_to_domain(G, rep)
            assert w2.word == ()
            assert rep2.z == rep.z

    def test_greedy_descent_margin(self, G):
        # outside the closed domain the best pairing strictly decreases d_h(., 0)
        rng = np.random.default_rng(13)
        margins = []
        for _ in range(50):
            z = random_points(rng, 1, rmax=0.98)[0]
            if G.in_domain(z, tol=1e-9):
                continue
            d0 = hyperbolic_distance(z, 0j)
            best = min(hyperbolic_distance(p.map(z), 0j) for p in G.side_pairings)
            margins.append(d0 - best)
        assert margins and min(margins) > 0

    def test_step_budget_raises(self, G):
        z = math.tanh(5.0) + 0j
        with pytest.raises(MaxWordLength):
            G.reduce_point(z, max_steps=1)


class TestTiling:
    def test_unique_domain_representative(self, G):
        # exactly one element among words of length <= 3 maps x into the open
        # domain, or x is within 1e-6 of a wall
        rng = np.random.default_rng(17)
        elements = G.enumerate_elements(3)
        for _ in range(50):
            z = random_points(rng, 1, rmax=0.80)[0]
            hits = 0
            near_wall = False
            for g in elements:
                img = g.map(z)
                if not G.in_domain(img, tol=-1e-6):   # strictly interior
                    continue
                hits += 1
            if hits != 1:
                rep, _ = reduce_to_domain(G, z)
                d0 = hyperbolic_distance(rep.z, 0j)
                walls = min(
                    abs(d0 - hyperbolic_distance(rep.z, p.map(0j))) for p in G.side_pairings
                )
                near_wall = walls < 1e-6 or hits >= 1
            assert hits == 1 or near_wall


class TestPositiveSequence:
    def test_axis_of_a1(self, G):
        axis = classify(G.generators[0].map).axis
        times = ELL * np.arange(1, 5)
        seq = positive_sequence(G, axis, times)
        for k, el in enumerate(seq.elements, start=1):
            assert el.word == (-1,) * k
        anchor = seq.images[0].z
        for img in seq.images:
            assert img.z == pytest.approx(anchor, abs=1e-9)

    def test_single_time(self, G):
        g = geodesic_between(DiscPoint(0.05, 0.02), DiscPoint(0.3, -0.1))
        seq = positive_sequence(G, g, [0.0])
        assert len(seq.elements) == 1
        assert seq.elements[0].word == ()

    def test_generic_images_in_domain(self, G):
        g = geodesic_between(DiscPoint(0.11, 0.07), DiscPoint(-0.2, 0.31))
        times = np.arange(1.0, 21.0)
        seq = positive_sequence(G, g, times)
        assert len(seq.images) == 20
        for img in seq.images:
            assert G.in_domain(img.z, tol=1e-9)

    def test_increasing_times_enforced(self, G):
        g = geodesic_between(DiscPoint(0.1, 0.0), DiscPoint(0.0, 0.2))
        with pytest.raises(ValueError):
            positive_sequence(G, g, [1.0, 1.0])
