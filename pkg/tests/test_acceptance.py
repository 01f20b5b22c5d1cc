"""Acceptance criteria 1-10, each at its stated tolerance and time budget.

Every test appends one ``PASS``/``FAIL`` line to ``RESULTS``; the lines are
printed in the pytest terminal summary (and immediately with ``-s``).
"""
import itertools
import math
import time

import numpy as np
import pytest
from scipy.spatial.distance import pdist
from scipy.stats import special_ortho_group

from orthocentric import cones, gauss, gfun, mc, simplex as sx
from orthocentric.gfun import g
from orthocentric.gram import ConeParams

from conftest import random_params

RESULTS = []
N_MC = 1_000_000


class Check:
    """Collects failures of one criterion and reports a single line."""

    def __init__(self, number, title, budget_s):
        self.number, self.title, self.budget = number, title, budget_s
        self.failures = []
        self.worst = 0.0

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def that(self, ok, msg):
        if not ok:
            self.failures.append(msg)

    def ratio(self, err, allowed, msg):
        """Record ``err / allowed`` (the fraction of the tolerance used)."""
        r = err / allowed if allowed > 0 else (0.0 if err == 0 else math.inf)
        self.worst = max(self.worst, r)
        self.that(r <= 1.0, msg)

    def __exit__(self, *exc):
        elapsed = time.perf_counter() - self.t0
        if exc[0] is not None:
            self.failures.append(f"exception {exc[0].__name__}: {exc[1]}")
        self.that(elapsed < self.budget, f"runtime {elapsed:.1f}s exceeds {self.budget}s")
        status = "PASS" if not self.failures else "FAIL"
        line = (f"{status} criterion {self.number}: {self.title} "
                f"[{elapsed:.1f}s / {self.budget:g}s, worst error/tolerance {self.worst:.3g}]")
        if self.failures:
            line += " -- " + "; ".join(self.failures[:3])
        RESULTS.append(line)
        print(line)
        assert not self.failures, line
        return False


def _mc_ok(check, est, exact, extra, msg):
    check.ratio(abs(exact - est.mean), 4 * est.stderr + extra, msg)


def test_criterion_01_conventions():
    rng = np.random.default_rng(101)
    with Check(1, "g_0 = 1 and g_1 = 1/2", 1.0) as c:
        for _ in range(20):
            lam0 = rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 3)
            c.ratio(abs(g(ConeParams(lam0, [])).value - 1.0), 1e-12, f"g_0({lam0})")
            p = random_params(rng, 1, rng.choice(["A", "B0", "Bk"]))
            c.ratio(abs(g(p).value - 0.5), 1e-12, f"g_1({p})")


def test_criterion_02_orthant_specializations():
    rng = np.random.default_rng(102)
    with Check(2, "orthant limit 1/2^d and rectangular faces through 0", 5.0) as c:
        for d in range(1, 7):
            cone = cones.OrthocentricCone(ConeParams(1e12, rng.uniform(0.5, 2.0, d)))
            c.ratio(abs(cones.solid_angle(cone).value - 0.5 ** d), 1e-5, f"orthant d={d}")
        for d in range(2, 7):
            s = sx.CanonicalSimplex(sx.RECTANGULAR, rng.uniform(0.3, 3, d))
            for k in range(d):
                for f in s.faces(k):
                    if not f.contains_special_vertex:
                        continue
                    exact = 0.5 ** (d - k)
                    c.ratio(abs(sx.internal_angle(s, f).value - exact), 1e-10, f"beta d={d} {f}")
                    c.ratio(abs(sx.external_angle(s, f).value - exact), 1e-10, f"gamma d={d} {f}")


def test_criterion_03_planar_golden_values():
    with Check(3, "equilateral 1/6, 1/3; right isosceles 1/8, 3/8", 1.0) as c:
        eq = sx.CanonicalSimplex(sx.ACUTE, [1, 1, 1])
        ri = sx.CanonicalSimplex(sx.RECTANGULAR, [1, 1])
        v, e1 = sx.FaceSelector([0]), sx.FaceSelector([1])
        for got, exact, name in [(sx.internal_angle(eq, v).value, 1 / 6, "equilateral beta"),
                                 (sx.external_angle(eq, v).value, 1 / 3, "equilateral gamma"),
                                 (sx.internal_angle(ri, e1).value, 1 / 8, "right isosceles beta"),
                                 (sx.external_angle(ri, e1).value, 3 / 8, "right isosceles gamma")]:
            c.ratio(abs(got - exact), 1e-9, name)


def test_criterion_04_g_vs_monte_carlo():
    rng = np.random.default_rng(104)
    with Check(4, "g vs MC orthant probability, 3 x 50 cases at 1e6 samples", 600.0) as c:
        for ci, case in enumerate(["A", "B0", "Bk"]):
            for i in range(50):
                d = 2 + i % 5
                p = random_params(rng, d, case)
                est = mc.orthant_probability(p, N_MC, mc.RngStream(104, 1000 * ci + i))
                _mc_ok(c, est, g(p).value, 1e-3, f"{case} {p}")


def test_criterion_05_conic_intrinsic_volumes():
    rng = np.random.default_rng(105)
    cases = ["A", "B0", "Bk"]
    with Check(5, "conic intrinsic volumes: sum, end value, projection oracle", 600.0) as c:
        for i in range(100):
            d = 1 + i % 4
            cone = cones.OrthocentricCone(random_params(rng, d, cases[i % 3]))
            v = cones.conic_intrinsic_volumes(cone)
            c.ratio(abs(v.values.sum() - 1.0), 1e-8, f"sum {cone.params}")
            c.ratio(abs(v[d] - cones.solid_angle(cone).value), 1e-9, f"end {cone.params}")
        for i in range(10):
            d = 2 + i % 3
            cone = cones.OrthocentricCone(random_params(rng, d, cases[i % 3]))
            v = cones.conic_intrinsic_volumes(cone)
            diag = mc.ProjectionDiagnostics()
            est = mc.conic_intrinsic_volumes(cone.generators(), N_MC, mc.RngStream(105, i),
                                             diagnostics=diag)
            for k in range(d + 1):
                _mc_ok(c, est[k], v[k], 0.0, f"upsilon_{k} {cone.params}")
            c.that(diag.disagreements == 0, f"projection disagreements {diag.disagreements}")
            c.that(diag.max_kkt_violation <= 1e-8, f"KKT violation {diag.max_kkt_violation}")


def test_criterion_06_shifted_orthant():
    rng = np.random.default_rng(106)
    with Check(6, "folded vs unfolded forms; shifted orthant vs MC", 300.0) as c:
        for _ in range(100):
            d = int(rng.integers(1, 6))
            lam = rng.uniform(0.2, 5, d)
            r = rng.uniform(-0.95 / lam.sum(), 3.0)
            t = rng.normal(size=d)
            eps = rng.choice([-1, 1], d)
            a = gfun.shifted_orthant(lam, r, t, eps, form="folded")
            b = gfun.shifted_orthant(lam, r, t, eps, form="unfolded")
            c.ratio(abs(a - b), 1e-9, f"forms lam={lam} r={r}")
        for i in range(20):
            d = int(rng.integers(1, 5))
            lam = rng.uniform(0.2, 5, d)
            r = rng.uniform(0.05, 3.0)
            t = rng.normal(scale=0.7, size=d)
            eps = rng.choice([-1, 1], d)
            exact = gfun.shifted_orthant(lam, r, t, eps)
            est = mc.shifted_orthant_probability(lam, r, t, eps, N_MC, mc.RngStream(106, i))
            _mc_ok(c, est, exact, 0.0, f"MC lam={lam} r={r} t={t}")


def test_criterion_07_rectangular_limit_identity():
    rng = np.random.default_rng(107)
    with Check(7, "rectangular angles: explicit formula, two limit routes, MC", 600.0) as c:
        for i in range(10):
            d = 2 + i % 3
            s = sx.CanonicalSimplex(sx.RECTANGULAR, rng.uniform(0.3, 3, d))
            for k in range(d):
                for j, f in enumerate(s.faces(k)):
                    if f.contains_special_vertex:
                        continue
                    beta = sx.internal_angle(s, f).value
                    gamma = sx.external_angle(s, f).value
                    for l1 in (-1e8, 1e8):
                        b1 = sx.rectangular_internal_angle_via_limit(s, f, l1).value
                        g1 = sx.rectangular_external_angle_via_limit(s, f, l1).value
                        c.ratio(abs(b1 - beta), 1e-3, f"beta route {l1:g} tau={s.tau} {f}")
                        c.ratio(abs(g1 - gamma), 1e-3, f"gamma route {l1:g} tau={s.tau} {f}")
                    T, N = sx.tangent_normal_cones(s, f)
                    stream = mc.RngStream(107, 100 * i + 2 * j + 1000 * k)
                    eb = mc.solid_angle(T.cholesky_generators(), N_MC, stream)
                    eg = mc.solid_angle(N.cholesky_generators(), N_MC, mc.RngStream(107, stream.stream_index + 1))
                    c.ratio(abs(eb.mean - beta), max(1e-3, 4 * eb.stderr), f"beta MC tau={s.tau} {f}")
                    c.ratio(abs(eg.mean - gamma), max(1e-3, 4 * eg.stderr), f"gamma MC tau={s.tau} {f}")


def test_criterion_08_classification():
    rng = np.random.default_rng(108)
    build = {sx.ACUTE: sx.build_acute, sx.OBTUSE: sx.build_obtuse, sx.RECTANGULAR: sx.build_rectangular}
    with Check(8, "classification: triangles, tetrahedra, round trips, Egervary swap", 60.0) as c:
        for _ in range(100):
            c.that(sx.classify(rng.normal(size=(3, 2))).is_orthocentric, "triangle not orthocentric")
        for _ in range(100):
            c.that(not sx.classify(rng.normal(size=(4, 3))).is_orthocentric, "tetrahedron orthocentric")
        for kind, fn in build.items():
            for d in (2, 3, 4):
                for _ in range(20):
                    tau = rng.uniform(0.3, 3, d if kind == sx.RECTANGULAR else d + 1)
                    V = fn(tau)
                    Q = special_ortho_group.rvs(V.shape[1], random_state=rng)
                    cl = sx.classify(V @ Q.T + rng.normal(size=V.shape[1]))
                    c.that(cl.verdict == kind, f"{kind} d={d} classified {cl.verdict}")
                    if cl.verdict != kind:
                        continue
                    got = np.asarray(cl.canonical_tau)
                    if kind == sx.ACUTE:
                        err = np.max(np.abs(np.sort(got) / np.sort(tau) - 1))
                    else:
                        err = max(abs(got[0] / tau[0] - 1),
                                  np.max(np.abs(np.sort(got[1:]) / np.sort(tau[1:]) - 1)))
                    c.ratio(err, 1e-8, f"{kind} tau round trip")
        for i in range(50):
            kind = [sx.ACUTE, sx.OBTUSE][i % 2]
            d = 2 + i % 3
            V = build[kind](rng.uniform(0.3, 3, d + 1))
            cl = sx.classify(V)
            j = int(rng.integers(d + 1))
            cw = sx.classify(sx.egervary_swap(V, j, cl))
            c.that(cw.is_orthocentric, f"swap {kind} d={d} not orthocentric")
            if cw.is_orthocentric:
                dist = np.linalg.norm(cw.orthocenter - V[j]) / math.sqrt(np.max(pdist(V)) ** 2)
                c.ratio(dist, 1e-8, f"swap {kind} d={d} orthocenter")


def test_criterion_09_gaussian_polytopes():
    rng = np.random.default_rng(109)
    with Check(9, "Gaussian polytopes: simplex case, Euler, E Vol, hull oracle", 900.0) as c:
        for d in (1, 2, 3, 4):
            f = gauss.expected_f_vector(gauss.GaussianPolytopeSpec(d, d + 1, rng.uniform(0.3, 3, d + 1)))
            for k in range(d):
                c.ratio(abs(f.values[k] - math.comb(d + 1, k + 1)), 1e-8, f"n=d+1 d={d} k={k}")
        for d, n in [(2, 5), (3, 5), (3, 6)]:
            f = gauss.expected_f_vector(gauss.GaussianPolytopeSpec(d, n, rng.uniform(0.3, 3, n)))
            c.ratio(abs(f.euler_characteristic() - (1 - (-1) ** d)), 1e-8, f"Euler d={d} n={n}")
        v = gauss.expected_volume(gauss.GaussianPolytopeSpec(2, 3, [1, 1, 1]))
        c.ratio(abs(v - math.sqrt(3) / 2), 1e-8, "E Vol closed form")
        est = mc.empirical_volume_2d(3, (1, 1, 1), N_MC, mc.RngStream(109, 0))
        _mc_ok(c, est, v, 0.0, "E Vol MC")
        tau = (1, 1, 1, 2, 2)
        f = gauss.expected_f_vector(gauss.GaussianPolytopeSpec(2, 5, tau)).values
        f0, f1 = mc.empirical_f_vector_2d(5, tau, 100_000, mc.RngStream(109, 1))
        _mc_ok(c, f0, f[0], 0.0, "E f_0 hull oracle")
        _mc_ok(c, f1, f[1], 0.0, "E f_1 hull oracle")


def test_criterion_10_extreme_spread():
    rng = np.random.default_rng(110)
    with Check(10, "g_one_negative with extreme parameter spread", 60.0) as c:
        for i in range(5):
            d = 2 + i % 4
            lam = rng.uniform(1, 10, d)
            k = int(rng.integers(d))
            lam[k] = -1e6
            eps = rng.choice([-1, 1], d)
            p = ConeParams(1e-3, lam, eps)
            c.that(p.total < 0, "sum condition")
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                r = gfun.g_one_negative(p.lambda0, p.lambdas, p.eps)
            c.that(math.isfinite(r.value) and 0 <= r.value <= 1, f"value {r.value}")
            c.ratio(r.err_estimate, 1e-6, f"err_estimate {r.err_estimate}")
            est = mc.orthant_probability(p, N_MC, mc.RngStream(110, i))
            _mc_ok(c, est, r.value, 0.0, f"MC {p}")
