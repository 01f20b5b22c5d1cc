"""Orthocentric simplices: construction, classification and angles.

A simplex ``[v_0, ..., v_d]`` is orthocentric with orthocenter ``w`` iff
``<v_i - w, v_j - w> = c`` for all ``i != j``.  The sign of ``c`` separates
acute (``c < 0``), rectangular (``c = 0``, ``w`` is a vertex) and obtuse
(``c > 0``) simplices.  Up to isometry each class is described by a vector
of positive numbers ``tau``:

* acute:       ``[e_0/tau_0, ..., e_d/tau_d]``
* obtuse:      ``[H, e_1/tau_1, ..., e_d/tau_d]`` with orthocenter ``e_0/tau_0``
* rectangular: ``[0, e_1/tau_1, ..., e_d/tau_d]``

Faces are addressed by indices into this canonical vertex order; for the
obtuse and rectangular classes index 0 is the special vertex.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cones import OrthocentricCone
from .errors import DegenerateVertices, FaceOutOfRange, NonPositiveTau, NotOrthocentric, NuEqualsOne
from .gfun import AngleResult, Branch, g, g_limit_lambda1_to_minus_inf, g_limit_rectangular
from .gram import ConeParams
from .quadrature import DEFAULT_QUAD, QuadratureConfig

ACUTE = "Acute"
OBTUSE = "Obtuse"
RECTANGULAR = "Rectangular"
NOT_ORTHOCENTRIC = "NotOrthocentric"


def _tau(tau, n_min=1) -> np.ndarray:
    t = np.asarray(tau, dtype=float).ravel()
    if t.size < n_min:
        raise ValueError(f"need at least {n_min} tau values")
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        raise NonPositiveTau("all tau must be positive and finite")
    return t


# ---------------------------------------------------------------- builders

def build_acute(tau) -> np.ndarray:
    """Vertices ``e_i / tau_i`` in ``R^(d+1)`` (rows)."""
    t = _tau(tau, 2)
    return np.diag(1.0 / t)


def build_obtuse(tau) -> np.ndarray:
    """Vertices ``[H, e_1/tau_1, ..., e_d/tau_d]`` in ``R^(d+1)``.

    ``H = sum_{i>=0} tau_i e_i / sum_{i>=0} tau_i^2``; the orthocenter is
    ``e_0/tau_0`` and ``c = 1/tau_0^2``.
    """
    t = _tau(tau, 3)
    d = t.size - 1
    V = np.zeros((d + 1, d + 1))
    V[0] = t / np.sum(t * t)
    V[np.arange(1, d + 1), np.arange(1, d + 1)] = 1.0 / t[1:]
    return V


def obtuse_orthocenter(tau) -> np.ndarray:
    t = _tau(tau, 3)
    w = np.zeros(t.size)
    w[0] = 1.0 / t[0]
    return w


def build_rectangular(tau) -> np.ndarray:
    """Vertices ``[0, e_1/tau_1, ..., e_d/tau_d]`` in ``R^d``."""
    t = _tau(tau, 2)
    return np.vstack([np.zeros(t.size), np.diag(1.0 / t)])


def build_nu_family(nu, tau) -> np.ndarray:
    """Vertices ``[nu H, e_1/tau_1, ..., e_d/tau_d]`` in ``R^d``, ``H = sum tau_i e_i / sum tau_i^2``.

    Orthocenter ``-nu/(1-nu) H`` and ``c = nu(2-nu) / ((1-nu)^2 sum tau^2)``:
    acute for ``nu < 0``, rectangular at ``nu = 0``, obtuse for ``0 < nu < 1``
    (and symmetric under ``nu -> 2 - nu``).
    """
    nu = float(nu)
    if nu == 1.0:
        raise NuEqualsOne("nu = 1 puts the first vertex on the opposite facet")
    t = _tau(tau, 2)
    H = t / np.sum(t * t)
    return np.vstack([nu * H, np.diag(1.0 / t)])


# ---------------------------------------------------------- classification

@dataclass
class SimplexClassification:
    """Result of :func:`classify`.

    Attributes
    ----------
    verdict : str
        ``"Acute"``, ``"Obtuse"``, ``"Rectangular"`` or ``"NotOrthocentric"``.
    special_index : int or None
        Original index of the right-angle vertex (rectangular) or of the
        vertex with negative ``mu`` (obtuse).
    orthocenter : ndarray
    c : float
        Obtuseness ``<v_i - w, v_j - w>``.
    mu : ndarray
        ``1/(|v_i - w|^2 - c)`` per original vertex (``inf`` at the
        rectangular special vertex).
    canonical_tau : ndarray
        ``tau`` of the canonical model (length ``d+1``, or ``d`` for
        rectangular).
    order : list of int
        Original vertex index of each canonical vertex.
    residual : float
        Relative residual of the altitude system.
    boundary_warning : bool
        Set when the rectangular tests were only partially met.
    """

    verdict: str
    orthocenter: np.ndarray = None
    c: float = float("nan")
    mu: np.ndarray = None
    canonical_tau: np.ndarray = None
    order: list = field(default_factory=list)
    residual: float = float("nan")
    special_index: int | None = None
    boundary_warning: bool = False

    @property
    def is_orthocentric(self) -> bool:
        return self.verdict != NOT_ORTHOCENTRIC

    @property
    def canonical(self) -> "CanonicalSimplex":
        if not self.is_orthocentric:
            raise NotOrthocentric(f"residual {self.residual:.3g}")
        return CanonicalSimplex(self.verdict, self.canonical_tau)

    @property
    def affine_weights(self) -> np.ndarray:
        """Weights ``c/(c - |v_i - w|^2)`` of the orthocenter (oblique only)."""
        return -self.c * self.mu

    def as_dict(self):
        f = lambda a: None if a is None else [float(x) for x in np.asarray(a).ravel()]
        return {"verdict": self.verdict, "special_index": self.special_index,
                "orthocenter": f(self.orthocenter), "c": float(self.c),
                "mu": f(self.mu), "canonical_tau": f(self.canonical_tau),
                "order": list(map(int, self.order)), "residual": float(self.residual),
                "boundary_warning": bool(self.boundary_warning)}


def classify(vertices, tol: float = 1e-8) -> SimplexClassification:
    """Decide whether a simplex is orthocentric and compute its canonical form.

    Parameters
    ----------
    vertices : array_like, shape (d+1, N)
        One vertex per row, ``d >= 2``, ``N >= d``.
    tol : float
        Relative tolerance; residuals are compared with ``tol * scale``
        where ``scale`` is the largest squared edge length.

    Returns
    -------
    SimplexClassification

    Raises
    ------
    DegenerateVertices
        If ``d < 2`` or the points are affinely dependent.
    """
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[0] < 3:
        raise DegenerateVertices("need at least 3 vertices (d >= 2)")
    d = V.shape[0] - 1
    if V.shape[1] < d:
        raise DegenerateVertices("ambient dimension smaller than d")
    E = V[1:] - V[0]
    sv = np.linalg.svd(E, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise DegenerateVertices("vertices are affinely dependent")
    diff = V[:, None, :] - V[None, :, :]
    scale = float(np.max(np.sum(diff ** 2, axis=-1)))

    rows, rhs = [], []
    for i in range(d + 1):
        others = [j for j in range(d + 1) if j != i]
        for j, k in itertools.combinations(others, 2):
            u = V[j] - V[k]
            rows.append(E @ u)
            rhs.append((V[i] - V[0]) @ u)
    A = np.array(rows)
    b = np.array(rhs)
    a, *_ = np.linalg.lstsq(A, b, rcond=None)
    w = V[0] + a @ E
    residual = float(np.max(np.abs(A @ a - b))) / scale

    U = V - w
    G = U @ U.T
    off = G[~np.eye(d + 1, dtype=bool)]
    c = float(np.mean(off))
    dev = float(np.max(np.abs(off - c))) / scale
    residual = max(residual, dev)
    if residual > tol:
        return SimplexClassification(NOT_ORTHOCENTRIC, orthocenter=w, residual=residual)

    sq = np.diag(G).copy()
    dist = np.sqrt(sq)
    near_zero = abs(c) <= tol * scale
    iv = int(np.argmin(dist))
    near_vertex = dist[iv] <= tol * math.sqrt(scale)
    res = SimplexClassification(ACUTE, orthocenter=w, c=c, residual=residual)
    if near_zero and near_vertex:
        res.verdict = RECTANGULAR
        res.special_index = iv
        res.c = 0.0
        mu = np.full(d + 1, np.inf)
        others = [j for j in range(d + 1) if j != iv]
        mu[others] = 1.0 / sq[others]
        res.mu = mu
        res.order = [iv, *others]
        res.canonical_tau = 1.0 / np.linalg.norm(V[others] - V[iv], axis=1)
        return res
    if near_zero or near_vertex:
        res.boundary_warning = True
        warnings.warn("simplex is close to rectangular; using the oblique verdict",
                      RuntimeWarning, stacklevel=2)
    mu = 1.0 / (sq - c)
    res.mu = mu
    if c < 0:
        res.verdict = ACUTE
        res.order = list(range(d + 1))
        res.canonical_tau = np.sqrt(mu)
    else:
        res.verdict = OBTUSE
        i0 = int(np.argmin(mu))
        res.special_index = i0
        others = [j for j in range(d + 1) if j != i0]
        res.order = [i0, *others]
        res.canonical_tau = np.concatenate([[math.sqrt(1.0 / c)], np.sqrt(mu[others])])
    return res


def egervary_swap(vertices, i, classification=None) -> np.ndarray:
    """Replace vertex ``i`` by the orthocenter (the result is again orthocentric)."""
    V = np.array(vertices, dtype=float)
    cl = classification or classify(V)
    if not cl.is_orthocentric:
        raise NotOrthocentric("input simplex is not orthocentric")
    V[i] = cl.orthocenter
    return V


# --------------------------------------------------------- canonical angles

@dataclass(frozen=True)
class CanonicalSimplex:
    """Class label plus canonical ``tau`` (see module docstring)."""

    kind: str
    tau: tuple

    def __post_init__(self):
        if self.kind not in (ACUTE, OBTUSE, RECTANGULAR):
            raise ValueError(f"unknown class {self.kind!r}")
        t = _tau(self.tau, 2 if self.kind == RECTANGULAR else 3)
        object.__setattr__(self, "tau", tuple(float(x) for x in t))

    @property
    def d(self) -> int:
        return len(self.tau) if self.kind == RECTANGULAR else len(self.tau) - 1

    def vertices(self) -> np.ndarray:
        return {ACUTE: build_acute, OBTUSE: build_obtuse,
                RECTANGULAR: build_rectangular}[self.kind](self.tau)

    def faces(self, k):
        """All faces of dimension ``k`` as :class:`FaceSelector` objects."""
        return [FaceSelector(I) for I in itertools.combinations(range(self.d + 1), k + 1)]


@dataclass(frozen=True)
class FaceSelector:
    """A face given by indices of canonical vertices.

    For obtuse and rectangular simplices index 0 is the special vertex
    (the point ``H`` resp. the right-angle vertex 0).
    """

    indices: tuple

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        object.__setattr__(self, "indices", idx)

    @property
    def k(self) -> int:
        return len(self.indices) - 1

    @property
    def contains_special_vertex(self) -> bool:
        return 0 in self.indices

    @classmethod
    def with_special(cls, k: int) -> "FaceSelector":
        """``[special, v_1, ..., v_k]``."""
        return cls(range(k + 1))

    @classmethod
    def without_special(cls, k: int) -> "FaceSelector":
        """``[v_1, ..., v_{k+1}]``."""
        return cls(range(1, k + 2))


def _canon(s) -> CanonicalSimplex:
    if isinstance(s, CanonicalSimplex):
        return s
    if isinstance(s, SimplexClassification):
        return s.canonical
    kind, tau = s
    return CanonicalSimplex(kind, tau)


def _check_face(s: CanonicalSimplex, face: FaceSelector):
    if not face.indices:
        raise FaceOutOfRange("empty face")
    if face.indices[0] < 0 or face.indices[-1] > s.d:
        raise FaceOutOfRange(f"vertex indices must lie in 0..{s.d}")


def _mu(s: CanonicalSimplex) -> np.ndarray:
    t2 = np.array(s.tau) ** 2
    if s.kind == ACUTE:
        return t2
    mu = t2.copy()
    mu[0] = -np.sum(t2)
    return mu


@dataclass(frozen=True)
class RectangularGram:
    """Gram matrix of the generators of a rectangular-simplex cone."""

    matrix: np.ndarray

    def cholesky_generators(self) -> np.ndarray:
        return np.linalg.cholesky(self.matrix)


def tangent_normal_cones(simplex, face: FaceSelector):
    """Pointed tangent cone and normal cone of a simplex at a face.

    Returns
    -------
    tangent, normal : OrthocentricCone or RectangularGram
        For acute and obtuse simplices, orthocentric cones with
        ``mu``-parameters: ``C(sum_F mu; mu_rest; +)`` and
        ``C(-sum mu; mu_rest; sgn mu_rest)``.  For rectangular simplices
        explicit Gram matrices (identity for faces containing 0).

    Raises
    ------
    FaceOutOfRange
        For invalid indices or ``k = d`` (the tangent cone is the whole
        space).
    """
    s = _canon(simplex)
    _check_face(s, face)
    d = s.d
    if face.k >= d:
        raise FaceOutOfRange("the simplex itself has no proper tangent/normal cone")
    rest = [j for j in range(d + 1) if j not in face.indices]
    if s.kind in (ACUTE, OBTUSE):
        mu = _mu(s)
        tangent = OrthocentricCone(ConeParams(math.fsum(mu[list(face.indices)]), mu[rest],
                                              [1] * len(rest)))
        normal = OrthocentricCone(ConeParams(-math.fsum(mu), mu[rest],
                                             [1 if m > 0 else -1 for m in mu[rest]]))
        return tangent, normal
    if face.contains_special_vertex:
        eye = RectangularGram(np.eye(d - face.k))
        return eye, eye
    tau, J, R = _rect_face_parts(s, face)
    tR = tau[R]
    W = np.eye(len(R) + 1)
    W[0, 0] = np.sum(tau ** 2)
    W[0, 1:] = W[1:, 0] = -tR
    sJ = np.sum(tau[J] ** 2)
    M = np.zeros_like(W)
    M[0, 0] = 1.0
    M[0, 1:] = M[1:, 0] = tR
    M[1:, 1:] = np.outer(tR, tR) + sJ * np.eye(len(R))
    return RectangularGram(M), RectangularGram(W)


def _rect_face_parts(s, face):
    tau = np.array(s.tau)
    J = [j - 1 for j in face.indices]
    R = [j - 1 for j in range(1, s.d + 1) if j not in face.indices]
    return tau, J, R


def internal_angle(simplex, face: FaceSelector, quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """Internal angle ``beta(F, S)`` (solid angle of the tangent cone)."""
    s = _canon(simplex)
    _check_face(s, face)
    if face.k == s.d:
        return AngleResult(1.0, 0.0, Branch.DEGENERATE)
    if s.kind in (ACUTE, OBTUSE):
        mu = _mu(s)
        rest = [j for j in range(s.d + 1) if j not in face.indices]
        # angle of C(sum_F mu; mu_rest; +) is g(-sum mu; mu_rest; sgn mu_rest)
        return g(ConeParams(-math.fsum(mu), mu[rest], np.sign(mu[rest])), quad)
    if face.contains_special_vertex:
        return AngleResult(0.5 ** (s.d - face.k), 0.0, Branch.DEGENERATE)
    tau, J, R = _rect_face_parts(s, face)
    eps = [-1] + [1] * len(R)
    return g_limit_rectangular(np.sum(tau ** 2), tau[R] ** 2, eps, quad)


def external_angle(simplex, face: FaceSelector, quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """External angle ``gamma(F, S)`` (solid angle of the normal cone)."""
    s = _canon(simplex)
    _check_face(s, face)
    if face.k == s.d:
        return AngleResult(1.0, 0.0, Branch.DEGENERATE)
    if s.kind in (ACUTE, OBTUSE):
        mu = _mu(s)
        rest = [j for j in range(s.d + 1) if j not in face.indices]
        # angle of C(-sum mu; mu_rest; sgn) is g(sum_F mu; mu_rest; +)
        return g(ConeParams(math.fsum(mu[list(face.indices)]), mu[rest], [1] * len(rest)), quad)
    if face.contains_special_vertex:
        return AngleResult(0.5 ** (s.d - face.k), 0.0, Branch.DEGENERATE)
    tau, J, R = _rect_face_parts(s, face)
    return g_limit_lambda1_to_minus_inf(np.sum(tau[J] ** 2), tau[R] ** 2, None, quad)


def rectangular_internal_angle_via_limit(simplex, face: FaceSelector, lambda1: float,
                                         quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """Finite-``lambda1`` approximation ``g(-sum tau^2 - lambda1; lambda1, tau_rest^2; sgn lambda1, +)``.

    Tends to the internal angle of a rectangular simplex at a face not
    containing 0 as ``lambda1 -> +inf`` or ``-inf``.
    """
    s = _canon(simplex)
    if s.kind != RECTANGULAR or face.contains_special_vertex:
        raise FaceOutOfRange("only for rectangular faces not containing 0")
    tau, J, R = _rect_face_parts(s, face)
    l1 = float(lambda1)
    lam = [l1, *(tau[R] ** 2)]
    return g(ConeParams(-np.sum(tau ** 2) - l1, lam, [1 if l1 > 0 else -1] + [1] * len(R)), quad)


def rectangular_external_angle_via_limit(simplex, face: FaceSelector, lambda1: float,
                                         quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """Finite-``lambda1`` approximation ``g(sum_F tau^2; lambda1, tau_rest^2; +)`` of ``gamma``."""
    s = _canon(simplex)
    if s.kind != RECTANGULAR or face.contains_special_vertex:
        raise FaceOutOfRange("only for rectangular faces not containing 0")
    tau, J, R = _rect_face_parts(s, face)
    lam = [float(lambda1), *(tau[R] ** 2)]
    return g(ConeParams(np.sum(tau[J] ** 2), lam, [1] * len(lam)), quad)


def angle_table(simplex, quad: QuadratureConfig = DEFAULT_QUAD):
    """``(face, beta, gamma)`` for every proper face, ordered by dimension."""
    s = _canon(simplex)
    out = []
    for k in range(s.d):
        for f in s.faces(k):
            out.append((f, internal_angle(s, f, quad), external_angle(s, f, quad)))
    return out
