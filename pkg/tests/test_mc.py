import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize
from scipy.spatial import ConvexHull

from orthocentric import cones, gauss, mc
from orthocentric.gfun import g
from orthocentric.gram import ConeParams, realize_generators

from conftest import random_params


class TestStreams:
    def test_pinned_vectors(self):
        raw = mc.RngStream(0, 0).generator().bit_generator.random_raw(3).tolist()
        assert raw == [213000021201967259, 4455796210202625458, 2055444239878205049]
        raw = mc.RngStream(12345, 7).generator().bit_generator.random_raw(3).tolist()
        assert raw == [751819530719010057, 6128695344906083465, 6599494311358180441]
        z = mc.RngStream(2024, 1).generator().standard_normal(3)
        np.testing.assert_allclose(z, [0.27695638, -0.89447254, -0.77337869], atol=5e-9)

    def test_split(self):
        s = mc.RngStream(3, 2).split(3)
        assert [x.stream_index for x in s] == [2, 3, 4]
        a, b = (x.generator().random(5) for x in s[:2])
        assert not np.allclose(a, b)

    def test_determinism(self):
        p = ConeParams(1, [1, 1])
        assert mc.orthant_probability(p, 50_000, mc.RngStream(4)) == \
            mc.orthant_probability(p, 50_000, mc.RngStream(4))

    def test_pooling_matches_single_stream(self):
        p = ConeParams(1, [1, 2, 0.5])
        single = mc.orthant_probability(p, 400_000, mc.RngStream(5))
        parts = [mc.orthant_probability(p, 100_000, s) for s in mc.RngStream(6).split(4)]
        pooled = mc.pool(parts)
        assert pooled.n_samples == 400_000
        assert pooled.mean == pytest.approx(np.mean([q.mean for q in parts]))
        se = math.hypot(single.stderr, pooled.stderr)
        assert abs(single.mean - pooled.mean) <= 6 * se

    def test_stderr_formula(self):
        e = mc.orthant_probability(ConeParams(1, [1, 1]), 10_000, mc.RngStream(8))
        p = e.mean
        assert e.stderr == pytest.approx(math.sqrt(p * (1 - p) / (e.n_samples - 1)), rel=1e-12)


class TestOrthant:
    def test_independent_limit(self):
        e = mc.orthant_probability(ConeParams(1e12, [1, 1]), 200_000, mc.RngStream(1))
        assert abs(e.z_score(0.25)) < 4

    def test_closed_form(self):
        p = ConeParams(1, [1, 1])
        e = mc.orthant_probability(p, 200_000, mc.RngStream(2))
        assert abs(e.z_score(g(p).value)) < 4

    def test_d0(self):
        assert mc.orthant_probability(ConeParams(1, []), 10, 0).mean == 1.0


class TestSolidAngle:
    def test_quadrant(self):
        e = mc.solid_angle(np.eye(2), 200_000, mc.RngStream(3))
        assert abs(e.z_score(0.25)) < 4

    def test_sixty_degrees(self):
        e = mc.solid_angle(realize_generators(ConeParams(1, [1, 1])), 200_000, mc.RngStream(4))
        assert abs(e.z_score(1 / 6)) < 4

    def test_central_symmetry(self, rng):
        G = rng.normal(size=(3, 5))
        a = mc.solid_angle(G, 200_000, mc.RngStream(5))
        b = mc.solid_angle(-G, 200_000, mc.RngStream(6))
        assert abs(a.mean - b.mean) <= 4 * math.hypot(a.stderr, b.stderr)


class TestNNLS:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**31 - 1))
    def test_against_scipy(self, n, seed):
        r = np.random.default_rng(seed)
        A = r.normal(size=(n + 2, n))
        b = r.normal(size=n + 2)
        x, res = mc.nnls(A, b)
        xs, rs = optimize.nnls(A, b)
        assert res == pytest.approx(rs, abs=1e-9)
        np.testing.assert_allclose(x, xs, atol=1e-8)
        assert mc.kkt_violation(A, x, b) <= 1e-8
        assert np.all(x >= 0)

    def test_iteration_cap(self):
        from orthocentric.errors import ProjectionNonConvergence
        A = np.random.default_rng(0).normal(size=(6, 6))
        b = np.ones(6)
        with pytest.raises(ProjectionNonConvergence):
            mc.nnls(A, b, max_iter=0)


class TestIntrinsicVolumes:
    def test_quadrant(self):
        est = mc.conic_intrinsic_volumes(np.eye(2), 200_000, mc.RngStream(7))
        for e, v in zip(est, [0.25, 0.5, 0.25]):
            assert abs(e.z_score(v)) < 4
        assert sum(e.mean for e in est) == pytest.approx(1.0)

    def test_against_closed_form(self, rng):
        for case in ("A", "B0", "Bk"):
            p = random_params(rng, 3, case)
            exact = cones.conic_intrinsic_volumes(p).values
            diag = mc.ProjectionDiagnostics()
            est = mc.conic_intrinsic_volumes(cones.OrthocentricCone(p).generators(), 100_000,
                                             mc.RngStream(8), diagnostics=diag)
            for e, v in zip(est, exact):
                assert abs(e.z_score(v)) < 4
            assert diag.checked > 0 and diag.disagreements == 0
            assert diag.max_kkt_violation <= 1e-8


class TestPlanar:
    def test_orient2d_exact(self):
        a, b = (0.5, 0.5), (12.0, 12.0)
        # points extremely close to the diagonal: the float determinant is unreliable
        for c in [(24.0, 24.0), (0.5 + 2**-50, 0.5), (0.5, 0.5 + 2**-50)]:
            from fractions import Fraction as F
            det = (F(b[0]) - F(a[0])) * (F(c[1]) - F(a[1])) - (F(b[1]) - F(a[1])) * (F(c[0]) - F(a[0]))
            assert mc.orient2d(a, b, c) == (det > 0) - (det < 0)

    def test_hull_against_qhull(self, rng):
        for _ in range(50):
            P = rng.normal(size=(int(rng.integers(3, 30)), 2))
            H = mc.convex_hull_2d(P)
            Q = ConvexHull(P)
            assert len(H) == len(Q.vertices)
            assert mc.polygon_area(H) == pytest.approx(Q.volume, rel=1e-12)

    def test_triangle_f_vector(self):
        f0, f1 = mc.empirical_f_vector_2d(3, (1, 1, 1), 1000, mc.RngStream(9))
        assert f0.mean == 3 and f1.mean == 3 and f0.stderr == 0

    def test_f_vector_closed_form(self):
        f = gauss.expected_f_vector(gauss.GaussianPolytopeSpec(2, 5, [1] * 5)).values
        f0, _ = mc.empirical_f_vector_2d(5, [1] * 5, 100_000, mc.RngStream(10))
        assert abs(f0.z_score(f[0])) < 4

    def test_volume(self):
        e = mc.empirical_volume_2d(3, (1, 1, 1), 200_000, mc.RngStream(11))
        assert abs(e.z_score(math.sqrt(3) / 2)) < 4

    def test_volume_scaling(self):
        a = mc.empirical_volume_2d(4, (1, 1, 1, 2), 20_000, mc.RngStream(12))
        b = mc.empirical_volume_2d(4, (2, 2, 2, 4), 20_000, mc.RngStream(12))
        assert b.mean == pytest.approx(a.mean / 4, rel=1e-12)
