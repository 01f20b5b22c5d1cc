"""Parameters, Gram matrices and explicit generators of orthocentric cones.

An orthocentric cone ``C_d(lambda0; lambda_1..lambda_d; eps_1..eps_d)`` is
the positive hull of ``eps_i v_i`` where the vectors ``v_i`` have scalar
products ``<v_i, v_j> = 1/lambda0 + delta_ij/lambda_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptySubset, InvalidParams, InvalidSubset, ZeroParameter

_BOUNDARY_RTOL = 1e-12


def parse_sign(s) -> int:
    """Map ``'+'``, ``'-'``, ``1``, ``-1`` (or strings thereof) to ``+1`` / ``-1``."""
    if isinstance(s, str):
        t = s.strip()
        if t in ("+", "+1", "1"):
            return 1
        if t in ("-", "-1"):
            return -1
        raise ValueError(f"cannot parse sign {s!r}")
    v = int(s)
    if v not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {s!r}")
    return v


@dataclass(frozen=True)
class CaseLabel:
    """Outcome of :func:`validate`.

    ``kind`` is ``"A"`` (all positive), ``"B"`` (one negative entry at
    ``index``; 0 means ``lambda0``) or ``"Invalid"`` with a ``reason``.
    """

    kind: str
    index: int | None = None
    reason: str = ""
    boundary: bool = False

    @property
    def valid(self) -> bool:
        return self.kind in ("A", "B")

    def __str__(self):
        if self.kind == "A":
            return "CaseA"
        if self.kind == "B":
            return f"CaseB({self.index})"
        return f"Invalid({self.reason})"


def validate(lambda0, lambdas, eps=None) -> CaseLabel:
    """Classify a parameter tuple as case A, case B or invalid.

    Case A: all of ``lambda0..lambda_d`` positive.  Case B: exactly one is
    negative and the total sum is negative.  These are exactly the tuples
    for which every principal minor of the Gram matrix is positive.

    Raises
    ------
    ZeroParameter
        If any entry equals zero.
    """
    lam = [float(lambda0), *map(float, lambdas)]
    if eps is not None and len(eps) != len(lam) - 1:
        raise InvalidParams("eps and lambdas must have the same length")
    if any(not math.isfinite(x) for x in lam):
        raise InvalidParams("parameters must be finite")
    if any(x == 0.0 for x in lam):
        raise ZeroParameter("parameters must be nonzero")
    neg = [i for i, x in enumerate(lam) if x < 0]
    if not neg:
        return CaseLabel("A")
    if len(neg) > 1:
        return CaseLabel("Invalid", reason="more than one negative parameter")
    total = math.fsum(lam)
    scale = math.fsum(abs(x) for x in lam)
    if abs(total) <= _BOUNDARY_RTOL * scale:
        return CaseLabel("Invalid", reason="sum condition violated (sum is zero)", boundary=True)
    if total > 0:
        return CaseLabel("Invalid", reason="sum condition violated")
    return CaseLabel("B", index=neg[0])


@dataclass(frozen=True)
class ConeParams:
    """The tuple ``(lambda0; lambdas; eps)`` of an orthocentric cone.

    Construction does not validate; use :meth:`checked` or :func:`validate`.
    """

    lambda0: float
    lambdas: tuple = ()
    eps: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "lambda0", float(self.lambda0))
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        eps = self.eps
        if eps is None:
            eps = (1,) * len(self.lambdas)
        object.__setattr__(self, "eps", tuple(parse_sign(e) for e in eps))
        if len(self.eps) != len(self.lambdas):
            raise InvalidParams("eps and lambdas must have the same length")

    @property
    def d(self) -> int:
        return len(self.lambdas)

    @property
    def total(self) -> float:
        return math.fsum((self.lambda0, *self.lambdas))

    @property
    def case(self) -> CaseLabel:
        return validate(self.lambda0, self.lambdas, self.eps)

    def checked(self) -> "ConeParams":
        """Return ``self`` or raise :class:`InvalidParams` with the reason."""
        label = self.case
        if not label.valid:
            raise InvalidParams(label.reason)
        return self

    def as_arrays(self):
        return self.lambda0, np.array(self.lambdas), np.array(self.eps, dtype=float)


def _params(p) -> ConeParams:
    if isinstance(p, ConeParams):
        return p
    return ConeParams(*p)


def gram(params) -> np.ndarray:
    """Gram matrix ``1/lambda0 + delta_ij/lambda_i`` (positive definite)."""
    p = _params(params).checked()
    lam = np.array(p.lambdas)
    return np.full((p.d, p.d), 1.0 / p.lambda0) + np.diag(1.0 / lam)


def gram_inverse(params) -> np.ndarray:
    """Closed-form inverse ``-lambda_i lambda_j / S + lambda_i delta_ij``, ``S = sum``."""
    p = _params(params).checked()
    lam = np.array(p.lambdas)
    return -np.outer(lam, lam) / p.total + np.diag(lam)


def principal_minor(params, subset) -> float:
    """Determinant of the Gram submatrix on ``subset`` (1-based indices).

    Equals ``(lambda0 + sum_I lambda_i) / (lambda0 * prod_I lambda_i)``.
    """
    p = _params(params)
    idx = sorted(set(subset))
    if not idx:
        raise EmptySubset("subset must be nonempty")
    if idx[0] < 1 or idx[-1] > p.d:
        raise InvalidSubset(f"indices must lie in 1..{p.d}")
    lam = [p.lambdas[i - 1] for i in idx]
    return (p.lambda0 + math.fsum(lam)) / (p.lambda0 * math.prod(lam))


def realize_generators(params) -> np.ndarray:
    """Explicit vectors ``v_1..v_d`` in ``R^(d+1)`` with the prescribed Gram matrix.

    Returns an array of shape ``(d, d+1)`` whose rows are the *unsigned*
    vectors; the cone itself is spanned by ``eps_i * v_i`` (see
    :func:`signed_generators`).  Three constructions cover case A, case B
    with ``lambda0 < 0`` and case B with some ``lambda_k < 0``.
    """
    p = _params(params).checked()
    d = p.d
    lam = np.array(p.lambdas)
    l0 = p.lambda0
    V = np.zeros((d, d + 1))
    label = p.case
    if label.kind == "A":
        V[:, 0] = -1.0 / math.sqrt(l0)
        V[np.arange(d), np.arange(1, d + 1)] = 1.0 / np.sqrt(lam)
    elif label.index == 0:
        common = np.zeros(d + 1)
        common[0] = math.sqrt(-p.total)
        common[1:] = np.sqrt(lam)
        common /= l0
        V[:] = common
        V[np.arange(d), np.arange(1, d + 1)] += 1.0 / np.sqrt(lam)
    else:
        k = label.index  # coordinate e_k, row k-1
        others = [j for j in range(1, d + 1) if j != k]
        for j in others:
            V[j - 1, j] = 1.0 / math.sqrt(lam[j - 1])
            V[j - 1, k] = -1.0 / math.sqrt(l0)
        b = np.zeros(d + 1)
        b[0] = math.sqrt(-p.total)
        b[k] = math.sqrt(l0)
        for j in others:
            b[j] = math.sqrt(lam[j - 1])
        b /= -lam[k - 1]
        b[k] -= 1.0 / math.sqrt(l0)
        V[k - 1] = b
    return V


def signed_generators(params) -> np.ndarray:
    """Rows ``eps_i v_i`` spanning the cone ``C_d(params)``."""
    p = _params(params)
    return realize_generators(p) * np.array(p.eps, dtype=float)[:, None]


def cholesky_generators(params) -> np.ndarray:
    """Alternative realization in ``R^d`` from the Cholesky factor of the Gram."""
    return np.linalg.cholesky(gram(params))
