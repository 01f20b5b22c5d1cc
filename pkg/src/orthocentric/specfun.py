"""Standard normal CDF on the real line, the imaginary axis and in the plane.

The complex continuation of the normal CDF is

    Phi(z) = 1/2 + (1/sqrt(2 pi)) * sum_n (-1)^n z^(2n+1) / ((2n+1) 2^n n!)

and on the imaginary axis ``Phi(i a) = 1/2 + i D(a)`` with

    D(a) = (1/sqrt(2 pi)) * int_0^a exp(t^2 / 2) dt.

``D`` grows like ``exp(a^2/2)``, so production code works with the scaled
function ``d_scaled(a) = exp(-a^2/2) D(a)`` which is bounded by ``0.3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainTooLarge, NonPositiveArgument

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
INV_SQRT2PI = 1.0 / SQRT2PI

#: Constant of the modulus bound |Phi(z)| <= C max(1, exp(-Re(z^2)/2)).
#: A grid search over |Re z|, |Im z| <= 12 gives a supremum of about 1.171.
PHI_BOUND_C = 2.0

#: Switch point between the series and the asymptotic expansion of d_scaled.
_D_SWITCH = 9.0
_PHI_SERIES_RADIUS = 8.0


@dataclass(frozen=True)
class ScaledValue:
    """Overflow-safe real number ``mantissa * exp(log_scale)``."""

    mantissa: float
    log_scale: float

    def __post_init__(self):
        if not math.isfinite(self.mantissa) or math.isnan(self.log_scale):
            raise ValueError("ScaledValue components must be finite")

    @property
    def value(self) -> float:
        """Unscaled value (may overflow to ``inf``)."""
        if self.mantissa == 0.0:
            return 0.0
        with np.errstate(over="ignore"):
            return float(self.mantissa * np.exp(self.log_scale))

    def normalized(self) -> "ScaledValue":
        """Equivalent value with ``|mantissa|`` in ``[1/2, 2)`` (or zero)."""
        if self.mantissa == 0.0:
            return ScaledValue(0.0, 0.0)
        m, e = math.frexp(self.mantissa)  # m in [1/2, 1)
        return ScaledValue(m, self.log_scale + e * math.log(2.0))

    def __neg__(self):
        return ScaledValue(-self.mantissa, self.log_scale)


@dataclass(frozen=True)
class ComplexValue:
    """A finite complex number as an explicit (re, im) pair."""

    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("ComplexValue components must be finite")

    def __complex__(self):
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, z) -> "ComplexValue":
        z = complex(z)
        return cls(z.real, z.imag)


def phi_real(x):
    """Standard normal CDF for real arguments (scalar or array).

    Backed by :func:`scipy.special.ndtr`, which is accurate in both tails.
    """
    out = special.ndtr(x)
    return float(out) if np.ndim(out) == 0 else out


def d_scaled(a):
    """Scaled imaginary part ``exp(-a^2/2) * D(a)``, vectorised.

    For ``|a| <= 9`` the all-positive Taylor series of ``D`` is summed and
    then rescaled (no cancellation, no overflow below ``|a| ~ 37``).  Beyond
    that the asymptotic expansion

        d_scaled(a) ~ 1/(sqrt(2 pi) a) * sum_k (2k-1)!! / a^(2k)

    is truncated once terms drop below machine precision; its smallest term
    at ``a = 9`` is below ``1e-17``.

    Parameters
    ----------
    a : float or array_like

    Returns
    -------
    float or ndarray
    """
    a = np.asarray(a, dtype=float)
    scalar = a.ndim == 0
    a = np.atleast_1d(a)
    s = np.sign(a)
    x = np.abs(a)
    out = np.zeros_like(x)

    small = x <= _D_SWITCH
    if np.any(small):
        xs = x[small]
        x2 = xs * xs
        term = xs.copy()
        total = xs.copy()
        n = 0
        while True:
            term = term * x2 / (2.0 * (n + 1)) * (2 * n + 1) / (2 * n + 3)
            total += term
            n += 1
            if np.all(term <= 1e-17 * total) or n > 400:
                break
        out[small] = total * np.exp(-0.5 * x2) * INV_SQRT2PI

    big = ~small
    if np.any(big):
        xb = x[big]
        inv2 = 1.0 / (xb * xb)
        term = np.ones_like(xb)
        total = np.ones_like(xb)
        for k in range(200):
            term = term * (2 * k + 1) * inv2
            total += term
            if np.all(term <= 1e-17 * total):
                break
        out[big] = total / (SQRT2PI * xb)

    out *= s
    return float(out[0]) if scalar else out


def imag_part_D(a: float) -> ScaledValue:
    """``D(a) = (1/sqrt(2 pi)) int_0^a exp(t^2/2) dt`` in scaled form.

    The result carries ``log_scale = a^2/2`` so that
    ``D(a) = mantissa * exp(a^2/2)`` never overflows.
    """
    a = float(a)
    if not math.isfinite(a):
        raise ValueError("a must be finite")
    return ScaledValue(d_scaled(a), 0.5 * a * a)


def phi_complex(z, n_terms: int = 300) -> complex:
    """Partial sum of the Taylor series of ``Phi`` at complex ``z``.

    Intended as a reference implementation for tests: away from the real
    axis the alternating terms grow like ``exp(|z|^2/2)`` before
    converging, so the series is only accepted for ``|z| <= 8``.

    Raises
    ------
    DomainTooLarge
        If ``|z| > 8``.
    """
    z = complex(z)
    if abs(z) > _PHI_SERIES_RADIUS:
        raise DomainTooLarge(f"|z| = {abs(z):.3g} exceeds series radius {_PHI_SERIES_RADIUS}")
    z2 = z * z
    # term_n = (-1)^n z^(2n+1) / (2^n n!); summand = term_n / (2n+1)
    term = z
    total = 0j
    for n in range(n_terms):
        total += term / (2 * n + 1)
        term = -term * z2 / (2.0 * (n + 1))
    return 0.5 + INV_SQRT2PI * total


def phi_modulus_bound(z) -> float:
    """Majorant ``C * max(1, exp(-Re(z^2)/2))`` of ``|Phi(z)|`` with ``C = 2``."""
    z = complex(z)
    e = -0.5 * (z * z).real
    return PHI_BOUND_C * math.exp(max(0.0, e)) if e < 700 else math.inf


def mills_upper(x: float) -> float:
    """Mills-ratio upper bound ``exp(-x^2/2) / (sqrt(2 pi) x)`` for ``Phi(-x)``."""
    x = float(x)
    if not x > 0:
        raise NonPositiveArgument("mills_upper requires x > 0")
    return math.exp(-0.5 * x * x) / (SQRT2PI * x)


def mills_scaled(x):
    """``exp(x^2/2) * Phi(-x)`` for real ``x`` (bounded, vectorised)."""
    return 0.5 * special.erfcx(np.asarray(x, dtype=float) / SQRT2)


def phi_scaled_complex(z):
    """``Phi`` at arbitrary complex arguments in scaled form.

    Returns ``(m, L)`` with ``Phi(z) = m * exp(L)`` and
    ``L = max(0, -Re(z^2)/2)``, so that ``|m|`` stays bounded.  Uses the
    Faddeeva function ``w`` in the upper half plane only, via

        Phi(z) = exp(-z^2/2) w(-i z/sqrt(2)) / 2          (Re z <= 0)
        Phi(z) = 1 - exp(-z^2/2) w(i z/sqrt(2)) / 2       (Re z > 0)
    """
    z = np.asarray(z, dtype=complex)
    L = np.maximum(0.0, -0.5 * (z * z).real)
    neg = z.real <= 0
    zz = np.where(neg, z, -z)
    half = 0.5 * special.wofz(-1j * zz / SQRT2) * np.exp(-0.5 * zz * zz - L)
    m = np.where(neg, half, np.exp(-L) - half)
    return m, L
