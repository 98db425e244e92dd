"""Special functions and Gauss-Legendre quadrature.

Everything here is scalar, pure and deterministic. The power series for
the Airy and Bessel functions are summed in :mod:`decimal` arithmetic so
that the cancellation between large alternating terms does not eat into
double precision; the final values are rounded back to ``float``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureRule",
    "gauss_legendre",
    "erf",
    "gaussian_det_closed_form",
    "gaussian_det_asymptotic",
    "optimal_nterms",
    "airy",
    "bessel_j",
    "bessel_j_prime",
    "ln_gamma",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a quadrature rule on ``[a, b]``."""

    a: float
    b: float
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return np.sum(self.weights * np.asarray(f(self.nodes)), axis=-1)


@lru_cache(maxsize=64)
def _reference_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped affinely onto ``[a, b]``."""
    if int(n) != n or n < 1:
        raise ValueError(f"number of nodes must be a positive integer, got {n!r}")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("interval endpoints must be finite")
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    x, w = _reference_rule(int(n))
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    weights = half * w
    return QuadratureRule(float(a), float(b), nodes, weights)


# --------------------------------------------------------------------------
# error function


def _erf_series(x: float) -> float:
    # all-positive series: erf x = 2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1}/(2n+1)!!
    term = x
    total = x
    x2 = 2.0 * x * x
    n = 0
    while term > 1e-17 * total:
        term *= x2 / (2 * n + 3)
        total += term
        n += 1
    return 2.0 / _SQRT_PI * math.exp(-x * x) * total


def _erfc_cf(x: float, depth: int = 80) -> float:
    # erfc x = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    frac = x
    for k in range(depth, 0, -1):
        frac = x + (k / 2.0) / frac
    return math.exp(-x * x) / _SQRT_PI / frac


def erf(x: float) -> float:
    """Error function, absolute error below 1e-14 on the real line."""
    x = float(x)
    if math.isnan(x):
        return x
    ax = abs(x)
    if ax < 3.0:
        v = _erf_series(ax)
    elif ax < 27.0:
        v = 1.0 - _erfc_cf(ax)
    else:
        v = 1.0
    return math.copysign(v, x)


def gaussian_det_closed_form(zeta: float) -> float:
    """``1 - (sqrt(pi)/2) (1 - erf zeta)``: determinant of the Gaussian operator."""
    return 1.0 - 0.5 * _SQRT_PI * (1.0 - erf(zeta))


def gaussian_det_asymptotic(zeta: float, nterms: int) -> float:
    """Partial sum of the large-zeta expansion of the Gaussian determinant.

    Returns ``1 - exp(-zeta^2)/(2 zeta) * sum_{n=0}^{nterms} (-1)^n (2n-1)!!/(2 zeta^2)^n``
    with ``(-1)!! = 1``.  The series diverges; only its partial sums are
    returned, and they are meaningful only when zeta is large.
    """
    if not zeta > 0:
        raise ValueError("zeta must be positive")
    if nterms < 0:
        raise ValueError("nterms must be non-negative")
    z2 = zeta * zeta
    term = 1.0
    total = 1.0
    for n in range(1, nterms + 1):
        term *= -(2 * n - 1) / (2.0 * z2)
        total += term
    return 1.0 - math.exp(-z2) / (2.0 * zeta) * total


def optimal_nterms(zeta: float) -> int:
    """Index of the smallest term of the asymptotic series (optimal truncation)."""
    if not zeta > 0:
        raise ValueError("zeta must be positive")
    # |t_{n+1}/t_n| = (2n+1)/(2 zeta^2) first exceeds 1 at n ~ zeta^2 - 1/2
    return max(0, int(math.floor(zeta * zeta - 0.5)))


# --------------------------------------------------------------------------
# Airy function

_AI0 = Decimal("0.355028053887817239260063186004183176397979174")
_AIP0 = Decimal("0.258819403792806798405183560189203963479091138")  # -Ai'(0)
_AIRY_SWITCH = 8.0


def _airy_maclaurin(x: float) -> tuple[float, float]:
    with localcontext() as ctx:
        ctx.prec = 50
        X = Decimal(x)
        X3 = X * X * X
        tiny = Decimal(10) ** -45
        # f = sum t_k, g = sum u_k ; derivatives fp, gp
        t = Decimal(1)
        u = X
        fp_t = X * X / 2
        gp_t = Decimal(1)
        f, g, fp, gp = t, u, fp_t, gp_t
        k = 0
        while True:
            t = t * X3 / ((3 * k + 2) * (3 * k + 3))
            u = u * X3 / ((3 * k + 3) * (3 * k + 4))
            gp_t = gp_t * X3 / ((3 * k + 1) * (3 * k + 3))
            if k >= 1:
                fp_t = fp_t * X3 / ((3 * k) * (3 * k + 2))
                fp += fp_t
            f += t
            g += u
            gp += gp_t
            k += 1
            if k > 2 and max(abs(t), abs(u), abs(fp_t), abs(gp_t)) < tiny:
                break
        ai = _AI0 * f - _AIP0 * g
        aip = _AI0 * fp - _AIP0 * gp
        return float(ai), float(aip)


def _airy_asymptotic_coeffs(zeta: float) -> tuple[list[float], list[float]]:
    """Terms u_k/zeta^k and v_k/zeta^k up to the smallest one."""
    us, vs = [1.0], [1.0]
    u = 1.0
    k = 1
    while k < 200:
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        tu, tv = u / zeta**k, v / zeta**k
        if abs(tu) > abs(us[-1]) or abs(tu) < 1e-18:
            break
        us.append(tu)
        vs.append(tv)
        k += 1
    return us, vs


def _airy_asymptotic(x: float) -> tuple[float, float]:
    ax = abs(x)
    zeta = 2.0 / 3.0 * ax**1.5
    us, vs = _airy_asymptotic_coeffs(zeta)
    q = ax**0.25
    if x > 0:
        su = sum((-1) ** k * c for k, c in enumerate(us))
        sv = sum((-1) ** k * c for k, c in enumerate(vs))
        e = math.exp(-zeta) / (2.0 * _SQRT_PI)
        return e / q * su, -e * q * sv
    theta = zeta + math.pi / 4.0
    s, c = math.sin(theta), math.cos(theta)
    ue = sum((-1) ** (k // 2) * t for k, t in enumerate(us) if k % 2 == 0)
    uo = sum((-1) ** (k // 2) * t for k, t in enumerate(us) if k % 2 == 1)
    ve = sum((-1) ** (k // 2) * t for k, t in enumerate(vs) if k % 2 == 0)
    vo = sum((-1) ** (k // 2) * t for k, t in enumerate(vs) if k % 2 == 1)
    ai = (s * ue - c * uo) / (_SQRT_PI * q)
    aip = -q * (c * ve + s * vo) / _SQRT_PI
    return ai, aip


def airy(x: float) -> tuple[float, float]:
    """Return ``(Ai(x), Ai'(x))``.

    Maclaurin series for ``|x| <= 8``, asymptotic expansions beyond.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("airy: argument must be finite")
    if abs(x) <= _AIRY_SWITCH:
        return _airy_maclaurin(x)
    if x > 150.0:
        return 0.0, 0.0
    return _airy_asymptotic(x)


# --------------------------------------------------------------------------
# Bessel function of the first kind


def _bessel_series(nu: float, x: float) -> float:
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    with localcontext() as ctx:
        ctx.prec = 30 + int(x / 2.3)
        q = -Decimal(x) * Decimal(x) / 4
        nu_d = Decimal(nu)
        term = Decimal(1)
        total = Decimal(1)
        eps = Decimal(10) ** -(ctx.prec - 2)
        k = 0
        while True:
            k += 1
            term = term * q / (k * (k + nu_d))
            total += term
            if abs(term) < eps * abs(total) and k > x:
                break
        s = float(total)
    return s * math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0))


def _bessel_hankel(nu: float, x: float) -> float | None:
    mu = 4.0 * nu * nu
    p, q = 1.0, 0.0
    a = 1.0
    last = math.inf
    for k in range(1, 400):
        a *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(a) > last and abs(a) > 1e-17:
            return None
        last = abs(a)
        if k % 2 == 1:
            q += (-1) ** ((k - 1) // 2) * a
        else:
            p += (-1) ** (k // 2) * a
        if abs(a) < 1e-17:
            break
    else:
        return None
    w = x - (0.5 * nu + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(w) - q * math.sin(w))


def bessel_j(nu: float, x: float) -> float:
    """Bessel function J_nu(x) for ``nu > -1/2`` and ``x >= 0``."""
    if not nu > -0.5:
        raise ValueError(f"bessel_j: order must exceed -1/2, got {nu}")
    if x < 0:
        raise ValueError(f"bessel_j: argument must be non-negative, got {x}")
    if not math.isfinite(x):
        raise ValueError("bessel_j: argument must be finite")
    if x > max(25.0, 2.0 * nu):
        v = _bessel_hankel(nu, x)
        if v is not None:
            return v
    return _bessel_series(nu, x)


def bessel_j_prime(nu: float, x: float) -> float:
    """Derivative ``J_nu'(x) = (nu/x) J_nu(x) - J_{nu+1}(x)``, for x > 0."""
    if x <= 0:
        if nu == 0:
            return 0.0
        if nu == 1:
            return 0.5
        raise ValueError("bessel_j_prime: derivative at 0 is unbounded or zero; pass x > 0")
    return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x)


# --------------------------------------------------------------------------
# log-gamma

_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def ln_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z) via recurrence shifts and Stirling's series."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("ln_gamma: argument must be finite")
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise ValueError(f"ln_gamma: pole at {z.real:g}")
    shift = 0.0 + 0.0j
    while z.real < 15.0:
        shift += cmath.log(z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0.0 + 0.0j
    p = inv
    for c in _STIRLING:
        series += c * p
        p *= inv2
    return (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + series - shift
