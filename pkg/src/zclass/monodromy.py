"""Transfer (monodromy) matrix of the canonical system driven by sigma_1'.

The matrix ``W(x, z)`` solves ``dW/dx = -i J sigma_1'(x) W / (x - z)`` with
``W(a, z) = I`` and is computed as an ordered product integral over
midpoint cells.  Each density value ``C`` satisfies ``(J C)^2 = 0``, so
every cell factor ``exp(-i J C h / (m - z))`` equals ``I - i J C h / (m - z)``
exactly and has determinant one.  Later cells multiply from the left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernels import J

__all__ = [
    "TransferMatrix2",
    "transfer",
    "boundary_pair",
    "jump_residual",
    "split_residual",
    "asymptotic_residual",
    "j_unitarity_residual",
    "constant_density_transfer",
]

DensityFn = Callable[[np.ndarray], np.ndarray]

MIN_CUT_DISTANCE = 1e-6


@dataclass(frozen=True)
class TransferMatrix2:
    z: complex
    W: np.ndarray
    steps: int
    provenance: tuple


def _cut_distance(z: complex, a: float, b: float) -> float:
    x = min(max(z.real, a), b)
    return abs(z - x)


def _ordered_product(E: np.ndarray) -> np.ndarray:
    # pairwise reduction keeps the rounding error growth logarithmic
    eye = np.eye(2, dtype=complex)[None]
    while len(E) > 1:
        if len(E) % 2:
            E = np.concatenate([E, eye])
        E = E[1::2] @ E[0::2]
    return E[0]


def _cells(a: float, b: float, steps: int, focus: float | None, width: float) -> np.ndarray:
    t = np.linspace(a, b, steps + 1)
    if focus is None or width <= 0:
        return t
    lo, hi = max(focus - width, a), min(focus + width, b)
    if hi <= lo:
        return t
    nfine = int(math.ceil(10 * steps * (hi - lo) / (b - a))) + 2
    fine = np.linspace(lo, hi, nfine)
    return np.unique(np.concatenate([t[(t < lo) | (t > hi)], fine]))


def transfer(
    density: DensityFn,
    a: float,
    b: float,
    z: complex,
    steps: int = 2000,
    focus: float | None = None,
    width: float = 0.0,
    label: str = "",
) -> TransferMatrix2:
    """W(b, z) for the density ``density`` on ``[a, b]``.

    ``focus``/``width`` refine the cells tenfold on ``|t - focus| <= width``,
    which is how evaluations close to the cut resolve the ``1/(t - z)`` peak.
    """
    z = complex(z)
    if not b > a:
        raise ValueError("transfer needs a < b")
    if int(steps) != steps or steps < 1:
        raise ValueError("steps must be a positive integer")
    if _cut_distance(z, a, b) < MIN_CUT_DISTANCE:
        raise ValueError(f"z = {z} lies on the cut [{a}, {b}]")
    t = _cells(a, b, int(steps), focus, width)
    m = 0.5 * (t[1:] + t[:-1])
    h = np.diff(t)
    C = np.asarray(density(m), dtype=complex)
    if C.shape != (len(m), 2, 2):
        raise ValueError("density must return one 2x2 matrix per point")
    E = np.eye(2)[None] - 1j * (J[None] @ C) * (h / (m - z))[:, None, None]
    return TransferMatrix2(z, _ordered_product(E), int(steps), (a, b, label))


def constant_density_transfer(C, a: float, b: float, z: complex) -> np.ndarray:
    """Closed form for a constant nilpotent density: ``I - i J C log((b - z)/(a - z))``."""
    z = complex(z)
    return np.eye(2) - 1j * J @ np.asarray(C, dtype=complex) * np.log((b - z) / (a - z))


def boundary_pair(density: DensityFn, a: float, b: float, x: float, eps: float, steps: int | None = None, C: float = 200.0):
    """``(W(x + i eps), W(x - i eps))`` with cells refined around ``x``."""
    if not a < x < b:
        raise ValueError(f"x = {x} is not inside ({a}, {b})")
    if not 1e-4 <= eps <= 1e-1:
        raise ValueError("eps must lie in [1e-4, 1e-1]")
    if steps is None:
        steps = max(2000, int(math.ceil(C / eps)))
    Wp = transfer(density, a, b, x + 1j * eps, steps, focus=x, width=10 * eps).W
    Wm = transfer(density, a, b, x - 1j * eps, steps, focus=x, width=10 * eps).W
    return Wp, Wm


def jump_residual(Wplus, Wminus, Rsq) -> float:
    """``max |W+ - W- R^2|`` entrywise."""
    Wm = np.asarray(Wminus, dtype=complex)
    if abs(np.linalg.det(Wm)) < 1e-12:
        raise np.linalg.LinAlgError("W- is singular")
    return float(np.max(np.abs(np.asarray(Wplus) - Wm @ np.asarray(Rsq))))


def j_unitarity_residual(density: DensityFn, a: float, b: float, z: complex, steps: int = 2000) -> float:
    """``max |W(conj z)^* J W(z) - J|``."""
    W = transfer(density, a, b, z, steps).W
    Wc = transfer(density, a, b, np.conj(z), steps).W
    return float(np.max(np.abs(Wc.conj().T @ J @ W - J)))


def split_residual(density: DensityFn, a: float, c: float, b: float, z: complex, steps: int = 2000) -> float:
    """``max |W_[a,b] - W_[c,b] W_[a,c]|`` with cell counts proportional to length."""
    if not a < c < b:
        raise ValueError("need a < c < b")
    n1 = max(1, int(round(steps * (c - a) / (b - a))))
    n2 = max(1, steps - n1)
    whole = transfer(density, a, b, z, n1 + n2).W
    left = transfer(density, a, c, z, n1).W
    right = transfer(density, c, b, z, n2).W
    return float(np.max(np.abs(whole - right @ left)))


def asymptotic_residual(density: DensityFn, a: float, b: float, sigma1_total, radii, steps: int = 2000) -> list[float]:
    """``max |z (W(z) - I) - M|`` at ``z = i rho`` with ``M = i J sigma1_total``."""
    M = 1j * J @ np.asarray(sigma1_total, dtype=complex)
    out = []
    for rho in radii:
        if rho < 10 * (b - a):
            raise ValueError("radius too small for the 1/z expansion")
        z = 1j * float(rho)
        W = transfer(density, a, b, z, steps).W
        out.append(float(np.max(np.abs(z * (W - np.eye(2)) - M))))
    return out
