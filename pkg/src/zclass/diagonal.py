"""Fractional integration of imaginary order and the triangular model it diagonalises.

On ``L^2(0, ell)`` the Volterra operator

    (A f)(x) = x f(x) + i alpha int_0^x f(t) dt

is similar to multiplication by ``x``: with ``B = I^{i alpha}`` (Riemann-Liouville
integral of order ``i alpha``) one has ``B A = Q B`` where ``(Q f)(x) = x f(x)``.

Polynomials are handled exactly.  ``B`` maps a power ``x^beta`` to a multiple
of ``x^{beta + i alpha}``, so images are kept as sums of generalized
monomials ``c x^beta`` with complex ``beta``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .specfun import ln_gamma

__all__ = [
    "PolySample",
    "GenPoly",
    "volterra_A",
    "apply_A",
    "frac_power",
    "frac_power_terms",
    "frac_power_quad",
    "similarity_residual",
    "composition_residual",
    "monomial_norm",
]

MAX_DEGREE = 12


@dataclass(frozen=True)
class PolySample:
    """Polynomial ``sum_n coeffs[n] x^n`` on ``[0, ell]`` with similarity exponent ``alpha``."""

    coeffs: tuple
    ell: float = 1.0
    alpha: float = 0.5

    def __post_init__(self):
        c = tuple(complex(v) for v in self.coeffs)
        if len(c) == 0:
            c = (0j,)
        if len(c) - 1 > MAX_DEGREE:
            raise ValueError(f"degree {len(c) - 1} exceeds {MAX_DEGREE}")
        if not self.ell > 0:
            raise ValueError("ell must be positive")
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, n: int, ell: float = 1.0, alpha: float = 0.5) -> "PolySample":
        return cls((0,) * n + (1,), ell, alpha)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, np.array(self.coeffs))

    def terms(self) -> "GenPoly":
        return GenPoly(tuple((c, complex(n)) for n, c in enumerate(self.coeffs) if c != 0))

    def _check(self, x: float, closed: bool) -> None:
        ok = 0 < x <= self.ell if closed else 0 < x < self.ell
        if not ok:
            raise ValueError(f"x = {x} outside the interval (0, {self.ell})")


@dataclass(frozen=True)
class GenPoly:
    """Finite sum ``sum_k c_k x^{beta_k}`` (x > 0, principal powers)."""

    terms: tuple

    def __call__(self, x: float) -> complex:
        lx = math.log(x)
        return sum((c * cmath.exp(beta * lx) for c, beta in self.terms), 0j)


def volterra_A(p: PolySample, x: float) -> complex:
    """``x p(x) + i alpha int_0^x p(t) dt`` from monomial antiderivatives."""
    p._check(x, closed=False)
    anti = sum(c * x ** (n + 1) / (n + 1) for n, c in enumerate(p.coeffs))
    return complex(x * p(x) + 1j * p.alpha * anti)


def apply_A(p: PolySample) -> PolySample:
    """Coefficients of ``A p``: ``t^n -> (1 + i alpha/(n+1)) t^{n+1}``."""
    if p.degree + 1 > MAX_DEGREE:
        raise ValueError("A p would exceed the degree budget")
    c = [0j] + [cn * (1 + 1j * p.alpha / (n + 1)) for n, cn in enumerate(p.coeffs)]
    return PolySample(tuple(c), p.ell, p.alpha)


def _power_image(beta: complex, s: complex) -> complex:
    """Coefficient of ``x^{beta + s}`` in ``I^s x^beta`` via integration by parts.

    ``beta = 0``: the boundary term ``x^s / Gamma(1 + s)``.  Otherwise
    ``beta B(beta, 1 + s) / Gamma(1 + s)`` from ``int_0^x beta t^{beta-1} (x-t)^s dt``,
    with each Gamma factor evaluated separately.
    """
    lg1s = ln_gamma(1 + s)
    if beta == 0:
        return cmath.exp(-lg1s)
    log_beta_fn = ln_gamma(beta) + lg1s - ln_gamma(beta + 1 + s)
    # the factor beta goes into the exponent so tiny |beta| cannot overflow Gamma(beta)
    return cmath.exp(cmath.log(beta) + log_beta_fn - lg1s)


def frac_power_terms(g: GenPoly, sign: int, alpha: float) -> GenPoly:
    """``B g`` (sign +1) or ``B^{-1} g`` (sign -1) on generalized monomials."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if alpha == 0:
        return g
    s = sign * 1j * alpha
    return GenPoly(tuple((c * _power_image(beta, s), beta + s) for c, beta in g.terms))


def frac_power(p: PolySample, sign: int, x: float) -> complex:
    """``(B p)(x)`` or ``(B^{-1} p)(x)`` for a polynomial ``p``."""
    p._check(x, closed=True)
    if p.alpha == 0:
        return complex(p(x))
    return frac_power_terms(p.terms(), sign, p.alpha)(x)


def frac_power_quad(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    sign: int,
    alpha: float,
    x: float,
    depth: float = 40.0,
) -> complex:
    """``B f`` at ``x`` for a general smooth ``f`` by quadrature (no accuracy contract).

    Uses ``[f(0) x^s + int_0^x f'(t) (x - t)^s dt] / Gamma(1 + s)`` with
    ``s = sign i alpha``.  The substitution ``x - t = e^u`` turns the infinitely
    oscillating factor into ``e^{s u}``; the range is cut at ``u = log x - depth``.
    """
    if not x > 0:
        raise ValueError("x must be positive")
    s = sign * 1j * alpha
    lx = math.log(x)

    def g(u: float) -> complex:
        return fprime(x - math.exp(u)) * cmath.exp((s + 1) * u)

    lo = lx - depth
    re = integrate.quad(lambda u: g(u).real, lo, lx, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    im = integrate.quad(lambda u: g(u).imag, lo, lx, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    total = f(0.0) * cmath.exp(s * lx) + re + 1j * im
    return total * cmath.exp(-ln_gamma(1 + s))


def similarity_residual(p: PolySample, grid: Sequence[float]) -> float:
    """``max_x |(B A p)(x) - x (B p)(x)|``."""
    Ap = apply_A(p)
    res = 0.0
    for x in grid:
        p._check(x, closed=False)
        res = max(res, abs(frac_power(Ap, 1, x) - x * frac_power(p, 1, x)))
    return res


def composition_residual(p: PolySample, grid: Sequence[float]) -> float:
    """``max_x |(B^{-1} B p)(x) - p(x)|``."""
    Bp = frac_power_terms(p.terms(), 1, p.alpha)
    back = frac_power_terms(Bp, -1, p.alpha)
    return max(abs(back(x) - p(x)) for x in grid)


def monomial_norm(n: int, alpha: float, sign: int = 1) -> float:
    """``sup |B t^n| / sup |t^n|`` on ``(0, ell]``, i.e. ``|Gamma(n+1) / Gamma(n+1+s)|``."""
    return abs(_power_image(complex(n), sign * 1j * alpha))
