"""Evaluation of the orthant-probability function ``g_d``.

``g_d(lambda0; lambda; eps) = P[eps_j eta_j <= 0 for all j]`` where
``eta`` is a centred Gaussian vector with covariance
``1/lambda0 + delta_ij/lambda_i``.  Depending on which parameter (if any) is
negative, ``g_d`` reduces to a single or a double one-dimensional integral
over the half line, evaluated here by adaptive Gauss-Kronrod quadrature.

All integrands that involve ``Phi`` on the imaginary axis are evaluated in
scaled form: every factor ``1/2 + i D(a y)`` is written as
``exp(a^2 y^2/2) * (exp(-a^2 y^2/2)/2 + i d_scaled(a y))`` and the
exponentials are combined analytically, so the net exponent is always
negative and nothing overflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import InvalidParams
from .gram import ConeParams, _params
from .quadrature import DEFAULT_QUAD, QuadratureConfig, gk15
from .specfun import INV_SQRT2PI, d_scaled, mills_scaled, phi_scaled_complex


class Branch(str, Enum):
    ALL_POSITIVE_L0_POS = "AllPositiveL0Pos"
    ALL_POSITIVE_L0_NEG = "AllPositiveL0Neg"
    ONE_NEGATIVE = "OneNegative"
    LIMIT_RECTANGULAR_BETA = "LimitRectangularBeta"
    LIMIT_RECTANGULAR_GAMMA = "LimitRectangularGamma"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class AngleResult:
    """A probability-valued result with a numerical error estimate."""

    value: float
    err_estimate: float = 0.0
    branch: Branch = Branch.DEGENERATE

    def __float__(self):
        return float(self.value)

    def as_dict(self):
        return {"value": self.value, "err_estimate": self.err_estimate,
                "branch": Branch(self.branch).value}


def _graded_breaks(min_scale: float, upper: float):
    """Geometric breakpoints ``min_scale * 4^k`` below ``upper``.

    Steep features of width ~``min_scale`` near the origin can hide between
    the Kronrod nodes of a coarse initial partition; grading the partition
    towards zero makes sure they are sampled.
    """
    if not (min_scale > 0) or min_scale >= upper / 16:
        return ()
    out = []
    s = min_scale / 4
    while s < upper:
        out.append(s)
        s *= 4.0
    return tuple(out)


def _imag_axis_product(coef, signs, y):
    """Scaled ``prod_j Phi(i * signs_j * coef_j * y)``.

    Returns the complex scaled product; the true product equals it times
    ``exp(sum(coef^2) * y^2 / 2)``.
    """
    out = np.ones(y.shape, dtype=complex)
    for c, s in zip(coef, signs):
        a = c * y
        out = out * (0.5 * np.exp(-0.5 * a * a) + 1j * s * d_scaled(a))
    return out


def _tail(amplitude, rate, Y):
    # int_Y^inf amp * exp(-rate y^2/2) dy <= amp * exp(-rate Y^2/2) / (rate Y)
    return amplitude * math.exp(-0.5 * rate * Y * Y) / (rate * Y)


def g_all_positive(lambda0, lambdas, eps=None, quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """``g_d`` when all ``lambda_j > 0`` and ``lambda0 > 0`` or ``lambda0 < -sum(lambda)``.

    Evaluates ``(1/sqrt(2 pi)) int_0^inf [prod Phi(eps_j b_j x) + prod Phi(-eps_j b_j x)]
    exp(-x^2/2) dx`` with ``b_j = sqrt(lambda_j/lambda0)``.  For negative
    ``lambda0`` the square root is imaginary and the bracket becomes
    ``2 Re prod(1/2 + i eps_j D(b_j x))`` with ``b_j = sqrt(lambda_j/(-lambda0))``.
    """
    lam = np.asarray(lambdas, dtype=float)
    eps = np.ones_like(lam) if eps is None else np.asarray(eps, dtype=float)
    l0 = float(lambda0)
    if np.any(lam <= 0):
        raise InvalidParams("g_all_positive requires all lambda_j > 0")
    d = lam.size
    if d == 0:
        return AngleResult(1.0, 0.0, Branch.DEGENERATE)
    if l0 > 0:
        b = eps * np.sqrt(lam / l0)
        Y = quad.truncation_point(1.0)

        def f(x):
            bx = b[:, None] * x[None, :]
            return (np.prod(special.ndtr(bx), axis=0) + np.prod(special.ndtr(-bx), axis=0)) \
                * np.exp(-0.5 * x * x) * INV_SQRT2PI

        brk = _graded_breaks(1.0 / np.max(np.abs(b)), Y)
        val, err = gk15(f, 0.0, Y, quad.abs_tol, quad.rel_tol, quad.max_depth, breakpoints=brk)
        err += _tail(2 * INV_SQRT2PI, 1.0, Y)
        return AngleResult(val, err, Branch.ALL_POSITIVE_L0_POS)
    if not l0 < -lam.sum():
        raise InvalidParams("lambda0 must be positive or below -sum(lambdas)")
    b = np.sqrt(lam / -l0)
    rate = 1.0 - float(np.sum(b * b))
    if rate <= 0:
        raise InvalidParams("lambda0 too close to -sum(lambdas)")
    Y = quad.truncation_point(rate)

    def f(x):
        prod = _imag_axis_product(b, eps, x)
        return 2.0 * prod.real * np.exp(-0.5 * rate * x * x) * INV_SQRT2PI

    brk = _graded_breaks(1.0 / np.max(b), Y)
    val, err = gk15(f, 0.0, Y, quad.abs_tol, quad.rel_tol, quad.max_depth, breakpoints=brk)
    err += _tail(2 * INV_SQRT2PI, rate, Y)
    return AngleResult(val, err, Branch.ALL_POSITIVE_L0_NEG)


def g_one_negative(lambda0, lambdas, eps=None, quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """``g_d`` when ``lambda0 > 0`` and exactly one ``lambda_k < 0`` (total sum negative).

    Evaluates ``sqrt(lambda0/(2 pi)) * (I1 + 2 I2)`` with

    * ``I1 = int_0^inf exp(-lambda0 y^2/2) prod_{j!=k} Phi(eps_k eps_j sqrt(lambda_j) y) dy``
    * ``I2 = int_0^inf exp(lambda0 y^2/2) Phi(-sqrt(-lambda_k) y)
      Im prod_{j!=k} Phi(i eps_k eps_j sqrt(lambda_j) y) dy``.

    The integrand of ``I2`` is assembled from the Mills-scaled
    ``Phi(-c y) = exp(-c^2 y^2/2) * m(c y)`` and scaled imaginary-axis
    factors; its net exponent is ``(sum of all parameters) y^2/2 < 0``.
    """
    lam = np.asarray(lambdas, dtype=float)
    eps = np.ones_like(lam) if eps is None else np.asarray(eps, dtype=float)
    l0 = float(lambda0)
    neg = np.flatnonzero(lam < 0)
    total = l0 + float(lam.sum())
    if not (l0 > 0 and neg.size == 1 and total < 0):
        raise InvalidParams("g_one_negative requires lambda0 > 0, one negative lambda_k and negative sum")
    k = int(neg[0])
    rest = np.delete(np.arange(lam.size), k)
    a = np.sqrt(lam[rest])
    sig = eps[k] * eps[rest]
    c = math.sqrt(-lam[k])
    pref = math.sqrt(l0 / (2 * math.pi))
    scales = [1.0 / c, *(1.0 / a)]

    Y1 = quad.truncation_point(l0)

    def f1(y):
        out = np.exp(-0.5 * l0 * y * y)
        for aj, sj in zip(a, sig):
            out = out * special.ndtr(sj * aj * y)
        return out

    q1 = quad.scaled(pref)
    i1, e1 = gk15(f1, 0.0, Y1, q1.abs_tol, q1.rel_tol, q1.max_depth,
                  breakpoints=_graded_breaks(min(scales), Y1))
    e1 += _tail(1.0, l0, Y1)

    if rest.size:
        Y2 = quad.truncation_point(total)

        def f2(y):
            return np.exp(0.5 * total * y * y) * mills_scaled(c * y) * \
                _imag_axis_product(a, sig, y).imag

        q2 = quad.scaled(2 * pref)
        i2, e2 = gk15(f2, 0.0, Y2, q2.abs_tol, q2.rel_tol, q2.max_depth,
                      breakpoints=_graded_breaks(min(scales), Y2))
        e2 += _tail(1.0, -total, Y2)
    else:
        i2 = e2 = 0.0
    val = pref * (i1 + 2.0 * i2)
    return AngleResult(val, pref * (e1 + 2.0 * e2), Branch.ONE_NEGATIVE)


@lru_cache(maxsize=100_000)
def _g_cached(lambda0, lambdas, eps, quad):
    return _g_uncached(ConeParams(lambda0, lambdas, eps), quad)


def _g_uncached(p: ConeParams, quad) -> AngleResult:
    label = p.case
    if not label.valid:
        raise InvalidParams(label.reason)
    if p.d == 0:
        return AngleResult(1.0, 0.0, Branch.DEGENERATE)
    if p.d == 1:
        # P[eps * eta <= 0] = 1/2 for any centred non-degenerate Gaussian.
        return AngleResult(0.5, 0.0, Branch.DEGENERATE)
    if label.kind == "A" or label.index == 0:
        return g_all_positive(p.lambda0, p.lambdas, p.eps, quad)
    return g_one_negative(p.lambda0, p.lambdas, p.eps, quad)


def g(params, quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """Evaluate ``g_d(lambda0; lambdas; eps)`` in any admissible regime.

    Parameters
    ----------
    params : ConeParams or tuple
        ``(lambda0, lambdas, eps)``.
    quad : QuadratureConfig

    Returns
    -------
    AngleResult
        Value, error estimate and the branch used.

    Notes
    -----
    ``g`` is invariant under simultaneous permutation of ``lambdas`` and
    ``eps``; results are cached under a canonical ordering.
    """
    p = _params(params)
    pairs = sorted(zip(p.lambdas, p.eps))
    lam = tuple(x for x, _ in pairs)
    eps = tuple(e for _, e in pairs)
    return _g_cached(p.lambda0, lam, eps, quad)


def _shifted_integrand(lam, r, t, eps):
    """Full-line integrand of the shifted orthant probability (real part)."""
    sl = np.sqrt(lam)
    if r >= 0:
        s = math.sqrt(r)

        def f(x):
            arg = (eps[:, None] * s * x[None, :] - t[:, None]) * sl[:, None]
            return np.prod(special.ndtr(arg), axis=0) * np.exp(-0.5 * x * x) * INV_SQRT2PI

        return f, 1.0
    s = math.sqrt(-r)
    rate = 1.0 + r * float(lam.sum())

    def f(x):
        z = (1j * eps[:, None] * s * x[None, :] - t[:, None]) * sl[:, None]
        m, L = phi_scaled_complex(z)
        prod = np.prod(m, axis=0)
        return (prod * np.exp(L.sum(axis=0) - 0.5 * x * x)).real * INV_SQRT2PI

    return f, rate


def shifted_orthant(lambdas, r, t, eps=None, quad: QuadratureConfig = DEFAULT_QUAD,
                    form: str = "folded") -> float:
    """``P[eps_j eta_j >= t_j for all j]`` for covariance ``r + delta_ij/lambda_i``.

    Parameters
    ----------
    lambdas : array_like
        Positive inverse variances.
    r : float
        Common covariance; must satisfy ``r > -1/sum(lambdas)``.  Negative
        ``r`` uses the imaginary square root and ``Phi`` at complex
        arguments (evaluated through the Faddeeva function).
    t : array_like
        Thresholds.
    eps : array_like of +-1, optional
    form : {"folded", "unfolded"}
        Integrate over the half line (sum of reflected integrands) or over
        the whole line.
    """
    lam = np.asarray(lambdas, dtype=float)
    t = np.asarray(t, dtype=float)
    eps = np.ones_like(lam) if eps is None else np.asarray(eps, dtype=float)
    if lam.size == 0:
        return 1.0
    if np.any(lam <= 0):
        raise InvalidParams("lambdas must be positive")
    if t.shape != lam.shape or eps.shape != lam.shape:
        raise InvalidParams("lambdas, t and eps must have equal length")
    if not r > -1.0 / lam.sum():
        raise InvalidParams("r must exceed -1/sum(lambdas)")
    f, rate = _shifted_integrand(lam, float(r), t, eps)
    Y = quad.truncation_point(rate)
    brk = _graded_breaks(1.0 / (math.sqrt(abs(r)) * float(np.max(np.sqrt(lam))) + 1e-300), Y)
    if form == "folded":
        val, _ = gk15(lambda x: f(x) + f(-x), 0.0, Y, quad.abs_tol, quad.rel_tol,
                      quad.max_depth, breakpoints=brk)
    elif form == "unfolded":
        brk2 = tuple(-b for b in brk) + (0.0,) + brk
        val, _ = gk15(f, -Y, Y, quad.abs_tol, quad.rel_tol, quad.max_depth, breakpoints=brk2)
    else:
        raise ValueError("form must be 'folded' or 'unfolded'")
    return val


def centered_sample_orthant(lambdas, t, eps=None, quad: QuadratureConfig = DEFAULT_QUAD,
                            offset: float = 1e-8) -> float:
    """``P[eps_j (Z_j - Z) >= t_j]`` for the weighted mean ``Z`` of independent ``Z_j``.

    The covariance ``delta_ij/lambda_i - 1/sum(lambda)`` sits exactly on the
    boundary ``r = -1/sum(lambda)``; the value is obtained from
    :func:`shifted_orthant` at ``r = -(1 - offset)/sum(lambda)``.  The
    limit error is not quantified.
    """
    lam = np.asarray(lambdas, dtype=float)
    r = -(1.0 - offset) / float(lam.sum())
    return shifted_orthant(lam, r, t, eps, quad)


def g_limit_lambda1_to_minus_inf(lambda0, lambdas_rest, eps=None,
                                 quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """Limit of ``g_d(lambda0; lambda1, rest; eps)`` as ``lambda1 -> -inf``.

    ``(1/sqrt(2 pi)) int_0^inf prod_{j>=2} Phi(eps_1 eps_j sqrt(lambda_j/lambda0) x) exp(-x^2/2) dx``.
    ``eps`` has length ``1 + len(lambdas_rest)``.
    """
    lam = np.asarray(lambdas_rest, dtype=float)
    eps = np.ones(lam.size + 1) if eps is None else np.asarray(eps, dtype=float)
    l0 = float(lambda0)
    if not l0 > 0 or np.any(lam <= 0):
        raise InvalidParams("lambda0 and the remaining lambdas must be positive")
    b = eps[0] * eps[1:] * np.sqrt(lam / l0)
    Y = quad.truncation_point(1.0)

    def f(x):
        out = np.exp(-0.5 * x * x) * INV_SQRT2PI
        for bj in b:
            out = out * special.ndtr(bj * x)
        return out

    brk = _graded_breaks(1.0 / np.max(np.abs(b)), Y) if b.size else ()
    val, err = gk15(f, 0.0, Y, quad.abs_tol, quad.rel_tol, quad.max_depth, breakpoints=brk)
    return AngleResult(val, err + _tail(INV_SQRT2PI, 1.0, Y), Branch.LIMIT_RECTANGULAR_GAMMA)


def g_limit_rectangular(lambda0, lambdas_rest, eps=None,
                        quad: QuadratureConfig = DEFAULT_QUAD) -> AngleResult:
    """Limit of ``g_d(-lambda0 - lambda1; lambda1, rest; eps)`` as ``lambda1 -> -inf``.

    ``1/2^d + int_0^inf exp(-lambda0 y^2/2)/(pi y) Im prod_{j>=2} Phi(i eps_1 eps_j sqrt(lambda_j) y) dy``,
    valid for ``lambda0 > sum(rest)``.  The integrand has a finite limit
    at ``y = 0``.
    """
    lam = np.asarray(lambdas_rest, dtype=float)
    eps = np.ones(lam.size + 1) if eps is None else np.asarray(eps, dtype=float)
    l0 = float(lambda0)
    d = lam.size + 1
    if np.any(lam <= 0) or not l0 > lam.sum():
        raise InvalidParams("requires positive rest and lambda0 > sum(rest)")
    if lam.size == 0:
        return AngleResult(0.5, 0.0, Branch.LIMIT_RECTANGULAR_BETA)
    a = np.sqrt(lam)
    sig = eps[0] * eps[1:]
    rate = l0 - float(lam.sum())
    Y = quad.truncation_point(rate)
    # Im prod ~ y * sum_j sig_j a_j / (sqrt(2 pi) 2^(d-2)) as y -> 0
    lim0 = float(np.sum(sig * a)) * INV_SQRT2PI / 2.0 ** (d - 2) / math.pi

    def f(y):
        ysafe = np.where(y == 0, 1.0, y)
        val = np.exp(-0.5 * rate * y * y) * _imag_axis_product(a, sig, y).imag / (math.pi * ysafe)
        return np.where(y == 0, lim0, val)

    brk = _graded_breaks(1.0 / np.max(a), Y)
    val, err = gk15(f, 0.0, Y, quad.abs_tol, quad.rel_tol, quad.max_depth, breakpoints=brk)
    return AngleResult(0.5 ** d + val, err, Branch.LIMIT_RECTANGULAR_BETA)
