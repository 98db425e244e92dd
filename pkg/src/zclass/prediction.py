"""Scalar maximal (outer) factor with a prescribed boundary modulus.

For a modulus ``R(x) >= 1`` on ``[a, b]`` (and ``R = 1`` outside) the factor

    W(z) = exp(-i int_a^b sigma'(t) / (t - z) dt),   sigma' = log R / pi,

is analytic and zero-free off ``[a, b]``, tends to 1 at infinity and has
``|W(x + i0)| = R(x)``: the imaginary part of the Cauchy integral jumps by
``pi sigma'(x)`` across the interval.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import specfun

__all__ = [
    "ModulusProfile",
    "outer_transfer",
    "maximality_margin",
    "boundary_modulus_residual",
]


@dataclass(frozen=True)
class ModulusProfile:
    a: float
    b: float
    logR: Callable[[np.ndarray], np.ndarray]
    bound: float = math.inf
    name: str = "modulus"

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.b > self.a):
            raise ValueError("modulus profile needs a finite interval a < b")
        scan = np.asarray(self.logR(np.linspace(self.a, self.b, 1000)), dtype=float)
        if not np.all(np.isfinite(scan)):
            raise ValueError("log R is not finite on [a, b]")
        if np.min(scan) < 0:
            raise ValueError("R must be >= 1 on [a, b]")
        if np.max(scan) > math.log(self.bound):
            raise ValueError(f"R exceeds the declared bound {self.bound}")

    def sigma_prime(self, t) -> np.ndarray:
        return np.asarray(self.logR(t), dtype=float) / math.pi

    def R(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, np.exp(self.logR(np.clip(x, self.a, self.b))), 1.0)

    @classmethod
    def constant(cls, R: float, a: float = 0.0, b: float = 1.0) -> "ModulusProfile":
        if R < 1:
            raise ValueError("R must be >= 1")
        lr = math.log(R)
        return cls(a, b, lambda t: np.full(np.shape(t), lr), bound=max(R, 1.0) * (1 + 1e-12), name=f"const{R:g}")

    @classmethod
    def from_samples(cls, x, R, name: str = "samples") -> "ModulusProfile":
        x = np.asarray(x, dtype=float)
        lr = np.log(np.asarray(R, dtype=float))
        return cls(float(x[0]), float(x[-1]), lambda t: np.interp(t, x, lr), name=name)

    @classmethod
    def from_csv(cls, path: str | Path) -> "ModulusProfile":
        """Read samples with header ``x,R`` (ascending x, R >= 1)."""
        path = Path(path)
        xs, rs = [], []
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader, [])]
            if header != ["x", "R"]:
                raise ValueError(f"{path}: expected header 'x,R', got {','.join(header)!r}")
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 2:
                    raise ValueError(f"{path}: row {lineno}: expected 2 columns")
                try:
                    x, r = float(row[0]), float(row[1])
                except ValueError:
                    raise ValueError(f"{path}: row {lineno}: not a number") from None
                if not (math.isfinite(x) and math.isfinite(r)):
                    raise ValueError(f"{path}: row {lineno}: non-finite value")
                if r < 1:
                    raise ValueError(f"{path}: row {lineno}: R = {r} < 1")
                if xs and x <= xs[-1]:
                    raise ValueError(f"{path}: row {lineno}: x not ascending")
                xs.append(x)
                rs.append(r)
        if len(xs) < 2:
            raise ValueError(f"{path}: need at least two samples")
        return cls.from_samples(xs, rs, name=path.stem)


def _panels(a: float, b: float, x0: float, d: float) -> list[float]:
    # geometric grading toward the point of the cut closest to z
    pts = {a, b}
    if a < x0 < b:
        pts.add(x0)
    step = d
    while step < (b - a):
        for p in (x0 - step, x0 + step):
            if a < p < b:
                pts.add(p)
        step *= 4.0
    return sorted(pts)


def _cauchy_integral(profile: ModulusProfile, z: complex, n: int) -> complex:
    a, b = profile.a, profile.b
    x0 = min(max(z.real, a), b)
    d = abs(z - x0)
    s0 = float(profile.sigma_prime(np.array([x0]))[0])
    # subtract the value at x0 so the remaining integrand is bounded near z
    total = s0 * cmath.log((b - z) / (a - z))
    if d >= (b - a):
        brk = [a, b]
    else:
        brk = _panels(a, b, x0, d)
    per = n if len(brk) == 2 else max(16, n // 4)
    for lo, hi in zip(brk[:-1], brk[1:]):
        rule = specfun.gauss_legendre(per, lo, hi)
        t = rule.nodes
        total += np.sum(rule.weights * (profile.sigma_prime(t) - s0) / (t - z))
    return complex(total)


def outer_transfer(profile: ModulusProfile, z: complex, n: int = 128) -> complex:
    """Value of the outer factor W at ``z`` (off the interval)."""
    z = complex(z)
    if z.imag == 0 and profile.a <= z.real <= profile.b:
        raise ValueError(f"z = {z.real} lies on the interval [{profile.a}, {profile.b}]")
    return cmath.exp(-1j * _cauchy_integral(profile, z, n))


def maximality_margin(profile: ModulusProfile, z: complex, w: complex, n: int = 128) -> float:
    """``|W(z)| - |W(z) (z - w)/(z - conj w)|`` for ``z, w`` in the upper half-plane."""
    z, w = complex(z), complex(w)
    if z.imag <= 0 or w.imag <= 0:
        raise ValueError("z and w must lie in the upper half-plane")
    Wz = abs(outer_transfer(profile, z, n))
    return Wz - Wz * abs((z - w) / (z - w.conjugate()))


def boundary_modulus_residual(profile: ModulusProfile, xs, eps: float, n: int = 128) -> float:
    """``max_x | |W(x + i eps)| - R(x) |`` over interior points ``xs``."""
    xs = np.asarray(xs, dtype=float)
    vals = np.array([abs(outer_transfer(profile, x + 1j * eps, n)) for x in xs])
    return float(np.max(np.abs(vals - profile.R(xs))))
