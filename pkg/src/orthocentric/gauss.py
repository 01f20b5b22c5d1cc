"""Expected face numbers and volume of scaled Gaussian polytopes.

The polytope is the convex hull of ``g_1/tau_1, ..., g_n/tau_n`` with
independent standard Gaussian vectors ``g_i`` in ``R^d``.  It is a Gaussian
projection of the acute orthocentric simplex
``T = [e_1/tau_1, ..., e_n/tau_n]``, so face counts follow from the
internal and external angles of ``T`` and the expected volume from its
intrinsic volume ``V_d(T)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CombinatorialBudgetExceeded, InvalidParams, NonPositiveTau
from .gfun import g
from .gram import ConeParams
from .quadrature import QuadratureConfig

#: The face sums need many g-values to cancel in alternating sums, so the
#: default quadrature is tighter than the library default.
GAUSS_QUAD = QuadratureConfig(abs_tol=1e-12, rel_tol=1e-12)
DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class GaussianPolytopeSpec:
    """Dimension ``d``, number of points ``n >= d+1`` and scales ``tau``."""

    d: int
    n: int
    tau: tuple

    def __post_init__(self):
        t = tuple(float(x) for x in self.tau)
        object.__setattr__(self, "tau", t)
        if self.d < 1:
            raise InvalidParams("d must be >= 1")
        if self.n < self.d + 1:
            raise InvalidParams("need n >= d + 1")
        if len(t) != self.n:
            raise InvalidParams("tau must have n entries")
        if any(not (x > 0 and math.isfinite(x)) for x in t):
            raise NonPositiveTau("all tau must be positive")


@dataclass
class ExpectedFVector:
    """``E f_0, ..., E f_{d-1}`` with per-entry error estimates."""

    values: np.ndarray
    err_estimates: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.err_estimates is None:
            self.err_estimates = np.zeros_like(self.values)

    def euler_characteristic(self) -> float:
        return math.fsum((-1) ** k * v for k, v in enumerate(self.values))


def _gamma(t2, I, quad):
    """External angle of ``T`` at the face with vertex set ``I``."""
    rest = [j for j in range(len(t2)) if j not in I]
    r = g(ConeParams(math.fsum(t2[i] for i in I), [t2[j] for j in rest]), quad)
    return r.value, r.err_estimate


def _beta(t2, I, M, quad):
    """Internal angle of the acute simplex on ``I`` at its face ``I \\ M``."""
    if not M:
        return 1.0, 0.0
    r = g(ConeParams(-math.fsum(t2[i] for i in I), [t2[j] for j in M]), quad)
    return r.value, r.err_estimate


def f_vector_cost(d, n) -> int:
    """Number of g-evaluations needed by :func:`expected_f_vector`."""
    total = 0
    for k in range(d):
        s = 0
        while d - 1 - 2 * s >= k:
            m = d - 2 * s
            total += math.comb(n, m) * (1 + math.comb(m, m - k - 1))
            s += 1
    return total


def expected_f_vector(spec: GaussianPolytopeSpec, quad: QuadratureConfig = GAUSS_QUAD,
                      budget: int = DEFAULT_BUDGET) -> ExpectedFVector:
    """Expected number of ``k``-faces, ``k = 0..d-1``.

    ``E f_k = 2 sum_{s>=0} sum_{|I| = d-2s} gamma(I) * sum_{F subset I, |F| = k+1} beta(F, I)``
    where ``gamma(I) = g(sum_I tau^2; tau^2 on the complement of I)`` (the
    complement has ``n - d + 2s`` elements) and ``beta(F, I)`` is the
    internal angle of the acute simplex on ``I`` at ``F``.  Subsets are
    enumerated in lexicographic order.
    """
    d, n = spec.d, spec.n
    cost = f_vector_cost(d, n)
    if cost > budget:
        raise CombinatorialBudgetExceeded(f"{cost} g-evaluations exceed budget {budget}")
    t2 = [t * t for t in spec.tau]
    vals = np.zeros(d)
    errs = np.zeros(d)
    for k in range(d):
        terms, terr = [], []
        s = 0
        while d - 1 - 2 * s >= k:
            m = d - 2 * s
            for I in itertools.combinations(range(n), m):
                ga, ea = _gamma(t2, I, quad)
                bsum, besum = [], []
                for M in itertools.combinations(I, m - k - 1):
                    b, eb = _beta(t2, I, M, quad)
                    bsum.append(b)
                    besum.append(eb)
                bs = math.fsum(bsum)
                terms.append(2.0 * ga * bs)
                terr.append(2.0 * (ea * bs + ga * math.fsum(besum)))
            s += 1
        vals[k] = math.fsum(terms)
        errs[k] = math.fsum(terr)
    return ExpectedFVector(vals, errs)


def _face_volume_factor(tau, I):
    """``sqrt(sum_I tau^2) / prod_I tau`` = ``k!`` times the volume of the face ``I``."""
    return math.sqrt(math.fsum(tau[i] ** 2 for i in I)) / math.prod(tau[i] for i in I)


def simplex_intrinsic_volumes(tau, quad: QuadratureConfig = GAUSS_QUAD) -> np.ndarray:
    """Intrinsic volumes ``V_0..V_d`` of ``[e_0/tau_0, ..., e_d/tau_d]``.

    ``V_k = (1/k!) sum_{|I|=k+1} sqrt(sum_I tau^2)/prod_I tau * g(sum_I tau^2; tau^2_rest)``.
    """
    tau = [float(t) for t in tau]
    if any(not t > 0 for t in tau):
        raise NonPositiveTau("all tau must be positive")
    d = len(tau) - 1
    t2 = [t * t for t in tau]
    out = np.zeros(d + 1)
    for k in range(d + 1):
        terms = []
        for I in itertools.combinations(range(d + 1), k + 1):
            ga, _ = _gamma(t2, I, quad)
            terms.append(_face_volume_factor(tau, I) * ga)
        out[k] = math.fsum(terms) / math.factorial(k)
    return out


def volume_constant(d) -> float:
    """``2^(d/2) Gamma((d+1)/2) / sqrt(pi)``: E Vol_d of the Gaussian image per unit ``V_d``."""
    return 2.0 ** (d / 2) * math.gamma((d + 1) / 2) / math.sqrt(math.pi)


def expected_volume(spec: GaussianPolytopeSpec, quad: QuadratureConfig = GAUSS_QUAD,
                    budget: int = DEFAULT_BUDGET) -> float:
    """Expected ``d``-volume of the scaled Gaussian polytope.

    ``c_d / d! * sum_{|I|=d+1} sqrt(sum_I tau^2)/prod_I tau * g(sum_I tau^2; tau^2_rest)``
    with ``c_d`` from :func:`volume_constant`.
    """
    d, n = spec.d, spec.n
    if math.comb(n, d + 1) > budget:
        raise CombinatorialBudgetExceeded("too many (d+1)-subsets")
    tau = list(spec.tau)
    t2 = [t * t for t in tau]
    terms = []
    for I in itertools.combinations(range(n), d + 1):
        ga, _ = _gamma(t2, I, quad)
        terms.append(_face_volume_factor(tau, I) * ga)
    return volume_constant(d) / math.factorial(d) * math.fsum(terms)
