import itertools
import math

import numpy as np
import pytest

from orthocentric import gauss, mc
from orthocentric.errors import CombinatorialBudgetExceeded, InvalidParams, NonPositiveTau
from orthocentric.gauss import GaussianPolytopeSpec


def _simplex_volume(P):
    """k-volume of the simplex with vertex rows P (Gram determinant)."""
    E = P[1:] - P[0]
    k = len(E)
    return math.sqrt(max(np.linalg.det(E @ E.T), 0.0)) / math.factorial(k)


class TestPolytopeSpec:
    def test_validation(self):
        with pytest.raises(InvalidParams):
            GaussianPolytopeSpec(2, 2, [1, 1])
        with pytest.raises(InvalidParams):
            GaussianPolytopeSpec(2, 3, [1, 1])
        with pytest.raises(NonPositiveTau):
            GaussianPolytopeSpec(2, 3, [1, 0, 1])


class TestFVector:
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_simplex_case(self, rng, d):
        f = gauss.expected_f_vector(GaussianPolytopeSpec(d, d + 1, rng.uniform(0.3, 3, d + 1)))
        np.testing.assert_allclose(f.values, [math.comb(d + 1, k + 1) for k in range(d)], atol=1e-8)

    @pytest.mark.parametrize("d,n", [(2, 5), (3, 5), (3, 6), (4, 7)])
    def test_euler_relation(self, rng, d, n):
        f = gauss.expected_f_vector(GaussianPolytopeSpec(d, n, rng.uniform(0.5, 2, n)))
        assert f.euler_characteristic() == pytest.approx(1 - (-1) ** d, abs=1e-8)

    def test_bounds(self, rng):
        for d, n in [(2, 6), (3, 6), (3, 7)]:
            f = gauss.expected_f_vector(GaussianPolytopeSpec(d, n, rng.uniform(0.5, 2, n)))
            for k in range(d):
                assert 0 <= f.values[k] <= math.comb(n, k + 1) + 1e-9
            assert f.values[d - 1] >= d + 1 - 1e-9
            assert f.values[0] <= n + 1e-9

    def test_scale_invariant(self, rng):
        tau = rng.uniform(0.5, 2, 6)
        a = gauss.expected_f_vector(GaussianPolytopeSpec(3, 6, tau)).values
        b = gauss.expected_f_vector(GaussianPolytopeSpec(3, 6, 3.7 * tau)).values
        np.testing.assert_allclose(a, b, atol=1e-9)

    def test_planar_hull_oracle(self):
        tau = (1, 1, 1, 2, 2)
        f = gauss.expected_f_vector(GaussianPolytopeSpec(2, 5, tau))
        f0, f1 = mc.empirical_f_vector_2d(5, tau, 100_000, mc.RngStream(77))
        assert abs(f0.z_score(f.values[0])) < 4
        assert abs(f1.z_score(f.values[1])) < 4

    def test_budget(self):
        assert gauss.f_vector_cost(3, 6) > 0
        with pytest.raises(CombinatorialBudgetExceeded):
            gauss.expected_f_vector(GaussianPolytopeSpec(3, 6, [1] * 6), budget=10)


class TestIntrinsicVolumes:
    def test_triangle(self, rng):
        for _ in range(5):
            tau = rng.uniform(0.3, 3, 3)
            V = np.diag(1 / tau)
            v = gauss.simplex_intrinsic_volumes(tau)
            edges = [np.linalg.norm(V[i] - V[j]) for i, j in itertools.combinations(range(3), 2)]
            assert v[0] == pytest.approx(1.0, abs=1e-10)
            assert v[1] == pytest.approx(sum(edges) / 2, rel=1e-10)
            assert v[2] == pytest.approx(_simplex_volume(V), rel=1e-12)

    def test_tetrahedron(self, rng):
        tau = rng.uniform(0.3, 3, 4)
        V = np.diag(1 / tau)
        v = gauss.simplex_intrinsic_volumes(tau)
        facets = [_simplex_volume(V[list(I)]) for I in itertools.combinations(range(4), 3)]
        assert v[0] == pytest.approx(1.0, abs=1e-10)
        assert v[2] == pytest.approx(sum(facets) / 2, rel=1e-10)
        assert v[3] == pytest.approx(_simplex_volume(V), rel=1e-12)


class TestVolume:
    def test_triangle_closed_form(self):
        v = gauss.expected_volume(GaussianPolytopeSpec(2, 3, [1, 1, 1]))
        assert v == pytest.approx(math.sqrt(3) / 2, abs=1e-8)

    def test_segment(self):
        v = gauss.expected_volume(GaussianPolytopeSpec(1, 2, [1, 1]))
        assert v == pytest.approx(2 / math.sqrt(math.pi), abs=1e-12)

    def test_single_term(self, rng):
        for d in (2, 3, 4):
            tau = rng.uniform(0.3, 3, d + 1)
            expect = gauss.volume_constant(d) * math.sqrt(np.sum(tau ** 2)) / (
                math.factorial(d) * np.prod(tau))
            v = gauss.expected_volume(GaussianPolytopeSpec(d, d + 1, tau))
            assert v == pytest.approx(expect, rel=1e-12)

    def test_scaling(self, rng):
        tau = rng.uniform(0.5, 2, 5)
        a = gauss.expected_volume(GaussianPolytopeSpec(3, 5, tau))
        b = gauss.expected_volume(GaussianPolytopeSpec(3, 5, 2 * tau))
        assert b == pytest.approx(a / 8, rel=1e-9)

    def test_monotone_in_n(self):
        tau = [1, 1, 1, 2, 0.5]
        vals = [gauss.expected_volume(GaussianPolytopeSpec(2, n, tau[:n])) for n in (3, 4, 5)]
        assert vals[0] <= vals[1] <= vals[2]

    def test_mc_oracle(self):
        tau = (1, 1, 1, 2)
        v = gauss.expected_volume(GaussianPolytopeSpec(2, 4, tau))
        est = mc.empirical_volume_2d(4, tau, 1_000_000, mc.RngStream(78))
        assert abs(est.z_score(v)) < 4
