"""Monte-Carlo oracles for orthant probabilities, angles and Gaussian polytopes.

Random numbers come from numpy's counter-based Philox generator.  A stream
is identified by ``(seed, stream_index)``, which is packed into the 128-bit
Philox key, so distinct streams never overlap and every estimate is a pure
function of its inputs, the seed, the stream index and the sample count.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import CholeskyFailure, ProjectionNonConvergence, SingularGenerators
from .gram import _params, gram

CHUNK = 1 << 17
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A reproducible, independent random stream."""

    seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        key = ((int(self.stream_index) & _MASK64) << 64) | (int(self.seed) & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))

    def split(self, n: int):
        """``n`` streams with consecutive indices starting at this one."""
        return [RngStream(self.seed, self.stream_index + i) for i in range(n)]


def _stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    return RngStream(int(rng))


@dataclass(frozen=True)
class McEstimate:
    """Sample mean, its standard error (``sample std / sqrt(n)``) and provenance."""

    mean: float
    stderr: float
    n_samples: int
    seed: int
    stream_index: int = 0

    def z_score(self, exact: float) -> float:
        if self.stderr == 0:
            return 0.0 if exact == self.mean else math.copysign(math.inf, exact - self.mean)
        return (exact - self.mean) / self.stderr

    def as_dict(self):
        return {"mean": self.mean, "stderr": self.stderr, "n_samples": self.n_samples,
                "seed": self.seed, "stream_index": self.stream_index}


def _from_sums(s1, s2, n, stream: RngStream) -> McEstimate:
    mean = s1 / n
    var = max(s2 - n * mean * mean, 0.0) / (n - 1) if n > 1 else 0.0
    return McEstimate(mean, math.sqrt(var / n), n, stream.seed, stream.stream_index)


def pool(estimates: Sequence[McEstimate]) -> McEstimate:
    """Merge estimates from disjoint streams (in the given order)."""
    N = sum(e.n_samples for e in estimates)
    s1 = math.fsum(e.mean * e.n_samples for e in estimates)
    s2 = math.fsum(e.stderr ** 2 * e.n_samples * (e.n_samples - 1) + e.n_samples * e.mean ** 2
                   for e in estimates)
    first = estimates[0]
    return _from_sums(s1, s2, N, RngStream(first.seed, first.stream_index))


def _chunks(n):
    while n > 0:
        m = min(n, CHUNK)
        yield m
        n -= m


def orthant_probability(params, n_samples: int, rng) -> McEstimate:
    """Estimate ``P[eps_j eta_j <= 0 for all j]`` by Cholesky sampling."""
    p = _params(params)
    stream = _stream(rng)
    if p.d == 0:
        return McEstimate(1.0, 0.0, n_samples, stream.seed, stream.stream_index)
    try:
        L = np.linalg.cholesky(gram(p))
    except np.linalg.LinAlgError as exc:
        raise CholeskyFailure(str(exc)) from exc
    eps = np.array(p.eps, dtype=float)
    gen = stream.generator()
    hits = 0
    for m in _chunks(n_samples):
        eta = gen.standard_normal((m, p.d)) @ L.T
        hits += int(np.count_nonzero(np.all(eta * eps <= 0, axis=1)))
    return _from_sums(hits, hits, n_samples, stream)


def shifted_orthant_probability(lambdas, r, t, eps, n_samples: int, rng) -> McEstimate:
    """Estimate ``P[eps_j eta_j >= t_j for all j]`` for covariance ``r + delta_ij/lambda_i``."""
    lam = np.asarray(lambdas, dtype=float)
    t = np.asarray(t, dtype=float)
    eps = np.ones_like(lam) if eps is None else np.asarray(eps, dtype=float)
    stream = _stream(rng)
    try:
        L = np.linalg.cholesky(r + np.diag(1.0 / lam))
    except np.linalg.LinAlgError as exc:
        raise CholeskyFailure(str(exc)) from exc
    gen = stream.generator()
    hits = 0
    for m in _chunks(n_samples):
        eta = gen.standard_normal((m, lam.size)) @ L.T
        hits += int(np.count_nonzero(np.all(eta * eps >= t, axis=1)))
    return _from_sums(hits, hits, n_samples, stream)


def _span_basis(generators):
    """Upper-triangular coordinates ``R`` of the generators in an orthonormal basis."""
    V = np.atleast_2d(np.asarray(generators, dtype=float))
    d = V.shape[0]
    if V.shape[1] < d:
        raise SingularGenerators("more generators than ambient dimensions")
    _, R = np.linalg.qr(V.T)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-12 * diag.max():
        raise SingularGenerators("generators are linearly dependent")
    return R  # columns: generators in the span coordinates


def solid_angle(generators, n_samples: int, rng) -> McEstimate:
    """Fraction of standard Gaussian points of ``span(generators)`` inside the cone."""
    R = _span_basis(generators)
    d = R.shape[0]
    stream = _stream(rng)
    gen = stream.generator()
    hits = 0
    for m in _chunks(n_samples):
        xi = gen.standard_normal((m, d))
        coef = solve_triangular(R, xi.T, lower=False)
        hits += int(np.count_nonzero(np.all(coef >= 0, axis=0)))
    return _from_sums(hits, hits, n_samples, stream)


def nnls(A, b, max_iter: int | None = None, tol: float = 1e-12):
    """Lawson-Hanson active-set solution of ``min |A x - b|, x >= 0``.

    Parameters
    ----------
    A : ndarray, shape (m, n)
    b : ndarray, shape (m,)
    max_iter : int, optional
        Cap on the total number of inner and outer iterations; defaults to
        ``3 n^2``.

    Returns
    -------
    x : ndarray
    residual_norm : float

    Raises
    ------
    ProjectionNonConvergence
        If the iteration cap is reached.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    cap = max_iter if max_iter is not None else max(3 * n * n, 3)
    x = np.zeros(n)
    P = np.zeros(n, dtype=bool)
    scale = tol * max(1.0, float(np.abs(A).max()) * float(np.abs(b).max()))
    w = A.T @ (b - A @ x)
    it = 0
    while not P.all() and np.max(np.where(P, -np.inf, w)) > scale:
        j = int(np.argmax(np.where(P, -np.inf, w)))
        P[j] = True
        while True:
            it += 1
            if it > cap:
                raise ProjectionNonConvergence(f"NNLS exceeded {cap} iterations")
            z = np.zeros(n)
            z[P] = np.linalg.lstsq(A[:, P], b, rcond=None)[0]
            if np.all(z[P] > 0):
                x = z
                break
            mask = P & (z <= 0)
            alpha = np.min(x[mask] / (x[mask] - z[mask]))
            x = x + alpha * (z - x)
            P &= x > tol
            x[~P] = 0.0
        w = A.T @ (b - A @ x)
    return x, float(np.linalg.norm(A @ x - b))


def kkt_violation(A, x, b) -> float:
    """Largest violation of the projection optimality conditions."""
    r = b - A @ x
    w = A.T @ r
    pos = x > 0
    v = 0.0
    if np.any(~pos):
        v = max(v, float(np.max(w[~pos], initial=0.0)))
    if np.any(pos):
        v = max(v, float(np.max(np.abs(w[pos]))))
    return v


@dataclass
class ProjectionDiagnostics:
    checked: int = 0
    disagreements: int = 0
    max_kkt_violation: float = 0.0
    fallbacks: int = 0


def _faces_by_enumeration(R, X):
    """Face dimension of the projection of each row of ``X`` onto ``pos(R[:, j])``.

    For every support ``S`` the projection is supported exactly on ``S`` iff
    the least-squares coefficients on ``S`` are positive and the residual
    has non-positive inner product with the other generators.  Returns -1
    where no or several supports qualify (measure-zero boundaries).
    """
    d = R.shape[1]
    m = X.shape[0]
    k_of = np.full(m, -1)
    n_match = np.zeros(m, dtype=int)
    for size in range(d + 1):
        for S in itertools.combinations(range(d), size):
            S = list(S)
            Sc = [j for j in range(d) if j not in S]
            if S:
                AS = R[:, S]
                C = np.linalg.lstsq(AS, X.T, rcond=None)[0]
                res = X.T - AS @ C
                ok = np.all(C > 0, axis=0)
            else:
                res = X.T
                ok = np.ones(m, dtype=bool)
            if Sc:
                ok &= np.all(R[:, Sc].T @ res <= 0, axis=0)
            k_of[ok] = size
            n_match += ok
    k_of[n_match != 1] = -1
    return k_of


def conic_intrinsic_volumes(generators, n_samples: int, rng, spot_fraction: float = 0.01,
                            diagnostics: ProjectionDiagnostics | None = None):
    """Estimate ``upsilon_0..upsilon_d`` of a simplicial cone by Gaussian projection.

    The face containing the metric projection of each sample is found by a
    vectorised support enumeration with KKT certification; samples on
    boundaries fall back to :func:`nnls`.  A fraction ``spot_fraction`` of
    samples is re-projected with :func:`nnls` and checked for agreement and
    KKT optimality; results are recorded in ``diagnostics``.

    Returns
    -------
    list of McEstimate
        One estimate per ``k = 0..d``; their means sum to one.
    """
    R = _span_basis(generators)
    d = R.shape[0]
    stream = _stream(rng)
    gen = stream.generator()
    spot_gen = RngStream(stream.seed ^ 0x5EED, stream.stream_index).generator()
    diag = diagnostics if diagnostics is not None else ProjectionDiagnostics()
    counts = np.zeros(d + 1, dtype=np.int64)
    for m in _chunks(n_samples):
        X = gen.standard_normal((m, d))
        k_of = _faces_by_enumeration(R, X)
        for i in np.flatnonzero(k_of < 0):
            x, _ = nnls(R, X[i])
            k_of[i] = int(np.count_nonzero(x > 0))
            diag.fallbacks += 1
        spots = np.flatnonzero(spot_gen.random(m) < spot_fraction)
        for i in spots:
            x, _ = nnls(R, X[i])
            diag.checked += 1
            diag.disagreements += int(np.count_nonzero(x > 0) != k_of[i])
            diag.max_kkt_violation = max(diag.max_kkt_violation, kkt_violation(R, x, X[i]))
        counts += np.bincount(k_of, minlength=d + 1)
    return [_from_sums(float(c), float(c), n_samples, stream) for c in counts]


# ------------------------------------------------------------ planar hulls

_ORIENT_ERR = 3.3306690738754716e-16  # (3 + 16 eps) eps


def orient2d(a, b, c) -> int:
    """Exact sign of the turn ``a -> b -> c`` (+1 left, -1 right, 0 collinear).

    A floating-point evaluation is accepted when it exceeds a forward error
    bound; otherwise the determinant is recomputed exactly with rationals.
    """
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    bound = _ORIENT_ERR * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    ax, ay, bx, by, cx, cy = map(Fraction, (a[0], a[1], b[0], b[1], c[0], c[1]))
    e = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (e > 0) - (e < 0)


def convex_hull_2d(points):
    """Hull vertices in counter-clockwise order (monotone chain, collinear points dropped)."""
    pts = sorted(map(tuple, np.asarray(points, dtype=float).tolist()))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and orient2d(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and orient2d(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def polygon_area(hull) -> float:
    """Shoelace area of a polygon given in counter-clockwise order."""
    n = len(hull)
    return 0.5 * math.fsum(hull[i][0] * hull[(i + 1) % n][1] - hull[(i + 1) % n][0] * hull[i][1]
                           for i in range(n))


def _planar_points(gen, n, tau, m):
    return gen.standard_normal((m, n, 2)) / np.asarray(tau, dtype=float)[None, :, None]


def empirical_f_vector_2d(n: int, tau, n_polytopes: int, rng):
    """Mean number of hull vertices (= edges) of ``n`` scaled planar Gaussian points.

    Returns
    -------
    (McEstimate, McEstimate)
        Estimates of ``E f_0`` and ``E f_1`` (identical in the plane).
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    stream = _stream(rng)
    gen = stream.generator()
    s1 = s2 = 0
    for m in _chunks(n_polytopes):
        P = _planar_points(gen, n, tau, m)
        for pts in P:
            h = len(convex_hull_2d(pts))
            s1 += h
            s2 += h * h
    est = _from_sums(float(s1), float(s2), n_polytopes, stream)
    return est, est


def empirical_volume_2d(n: int, tau, n_polytopes: int, rng) -> McEstimate:
    """Mean hull area of ``n`` scaled planar Gaussian points."""
    if n < 3:
        raise ValueError("n must be >= 3")
    stream = _stream(rng)
    gen = stream.generator()
    s1 = s2 = 0.0
    for m in _chunks(n_polytopes):
        P = _planar_points(gen, n, tau, m)
        if n == 3:
            u = P[:, 1] - P[:, 0]
            v = P[:, 2] - P[:, 0]
            areas = 0.5 * np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
        else:
            areas = np.array([polygon_area(convex_hull_2d(pts)) for pts in P])
        s1 += math.fsum(areas.tolist())
        s2 += math.fsum((areas * areas).tolist())
    return _from_sums(s1, s2, n_polytopes, stream)
