"""Orthocentric cones: polar, faces, tangent/normal cones, angles.

The family ``C_d(lambda0; lambda; eps)`` is closed under all of these
operations, and every angle is a value of ``g``.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySubset, InvalidIntermediateParams, InvalidParams, InvalidSubset
from .gfun import AngleResult, g
from .gram import ConeParams, _params, gram, signed_generators
from .quadrature import DEFAULT_QUAD, QuadratureConfig

MAX_INTRINSIC_DIM = 20


def _sgn(x):
    return 1 if x > 0 else -1


@dataclass(frozen=True)
class OrthocentricCone:
    """The cone spanned by ``eps_i v_i`` with Gram ``1/lambda0 + delta_ij/lambda_i``."""

    params: ConeParams

    def __post_init__(self):
        p = _params(self.params)
        object.__setattr__(self, "params", p.checked())

    @classmethod
    def from_values(cls, lambda0, lambdas, eps=None) -> "OrthocentricCone":
        return cls(ConeParams(lambda0, lambdas, eps))

    @property
    def d(self) -> int:
        return self.params.d

    def gram(self) -> np.ndarray:
        return gram(self.params)

    def generators(self) -> np.ndarray:
        """Rows ``eps_i v_i`` in ``R^(d+1)``."""
        return signed_generators(self.params)


def _cone(c) -> OrthocentricCone:
    return c if isinstance(c, OrthocentricCone) else OrthocentricCone(_params(c))


def _make(lambda0, lambdas, eps, what) -> OrthocentricCone:
    p = ConeParams(lambda0, lambdas, eps)
    label = p.case
    if not label.valid:
        raise InvalidIntermediateParams(f"{what}: {label.reason}")
    return OrthocentricCone(p)


def polar(c) -> OrthocentricCone:
    """Polar cone ``C_d(-lambda0 - sum(lambda); lambda; eps * sgn(lambda))``.

    The polar remembers its origin, so ``polar(polar(c))`` returns ``c``
    with bit-identical parameters (recomputing ``-(-lambda0 - s) - s`` in
    floating point would not be exact).
    """
    c = _cone(c)
    origin = getattr(c, "_polar_of", None)
    if origin is not None:
        return origin
    p = c.params
    out = _make(-p.total, p.lambdas, [e * _sgn(x) for x, e in zip(p.lambdas, p.eps)], "polar")
    object.__setattr__(out, "_polar_of", c)
    return out


def _subset(d, I, proper=False):
    idx = sorted(set(int(i) for i in I))
    if not idx:
        raise EmptySubset("subset must be nonempty")
    if idx[0] < 1 or idx[-1] > d:
        raise InvalidSubset(f"indices must lie in 1..{d}")
    if proper and len(idx) == d:
        raise InvalidSubset("subset must be proper")
    return idx


def face(c, I) -> OrthocentricCone:
    """Face spanned by the generators with (1-based) indices in ``I``."""
    p = _cone(c).params
    idx = _subset(p.d, I)
    return _make(p.lambda0, [p.lambdas[i - 1] for i in idx], [p.eps[i - 1] for i in idx], "face")


def tangent_normal_at_face(c, I):
    """Pointed part of the tangent cone and the normal cone at the face ``I``.

    Returns
    -------
    tangent, normal : OrthocentricCone
        ``C_{d-k}(lambda0 + sum_I lambda; lambda_rest; eps_rest)`` and
        ``C_{d-k}(-lambda0 - sum(lambda); lambda_rest; eps_rest * sgn(lambda_rest))``.
    """
    p = _cone(c).params
    idx = _subset(p.d, I, proper=True)
    rest = [j for j in range(1, p.d + 1) if j not in idx]
    lam_r = [p.lambdas[j - 1] for j in rest]
    eps_r = [p.eps[j - 1] for j in rest]
    t0 = p.lambda0 + math.fsum(p.lambdas[i - 1] for i in idx)
    tangent = _make(t0, lam_r, eps_r, "tangent cone")
    normal = _make(-p.total, lam_r, [e * _sgn(x) for x, e in zip(lam_r, eps_r)], "normal cone")
    return tangent, normal


def solid_angle(c, quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """Solid angle ``g_d(-lambda0 - sum(lambda); lambda; eps * sgn(lambda))``."""
    return g(polar(c).params, quad)


@dataclass
class IntrinsicVolumeVector:
    """Conic intrinsic volumes ``upsilon_0..upsilon_d`` with error estimates."""

    values: np.ndarray
    err_estimates: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.err_estimates is None:
            self.err_estimates = np.zeros_like(self.values)
        self.err_estimates = np.asarray(self.err_estimates, dtype=float)

    def __len__(self):
        return self.values.size

    def __getitem__(self, k):
        return self.values[k]


def conic_intrinsic_volumes(c, quad: QuadratureConfig = DEFAULT_QUAD) -> IntrinsicVolumeVector:
    """Conic intrinsic volumes by summation over all faces.

    ``upsilon_k = sum_{|I|=k} g_k(-lambda0 - sum_I lambda; lambda_I; eps_I sgn lambda_I)
    * g_{d-k}(lambda0 + sum_I lambda; lambda_rest; eps_rest)``, i.e. the
    solid angle of each ``k``-face times the angle of its normal cone.
    Every intermediate tuple is validated.
    """
    p = _cone(c).params
    d = p.d
    if d > MAX_INTRINSIC_DIM:
        raise InvalidParams(f"d = {d} exceeds the subset-enumeration cap {MAX_INTRINSIC_DIM}")
    if d > 12:
        warnings.warn(f"enumerating 2^{d} faces", RuntimeWarning, stacklevel=2)
    vals = np.zeros(d + 1)
    errs = np.zeros(d + 1)
    for k in range(d + 1):
        terms, terr = [], []
        for I in itertools.combinations(range(d), k):
            lam_I = [p.lambdas[i] for i in I]
            eps_I = [p.eps[i] for i in I]
            rest = [j for j in range(d) if j not in I]
            s_I = math.fsum(lam_I)
            a = _make(-p.lambda0 - s_I, lam_I, [e * _sgn(x) for x, e in zip(lam_I, eps_I)],
                      "face angle") if k else None
            b = _make(p.lambda0 + s_I, [p.lambdas[j] for j in rest], [p.eps[j] for j in rest],
                      "normal angle") if k < d else None
            ga = g(a.params, quad) if a else AngleResult(1.0)
            gb = g(b.params, quad) if b else AngleResult(1.0)
            terms.append(ga.value * gb.value)
            terr.append(ga.err_estimate * gb.value + gb.err_estimate * ga.value)
        vals[k] = math.fsum(terms)
        errs[k] = math.fsum(terr)
    return IntrinsicVolumeVector(vals, errs)
