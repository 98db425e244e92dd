"""Spectral function sigma_1 of a Z-class profile and its density.

``sigma1_at`` solves one resolvent equation per interval ``[a, zeta]``;
``sigma1_density`` instead factors the operator on the whole interval once
and reads the density off the triangular factor.  The two routes share no
linear algebra, which is what makes comparing them worthwhile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from .fredholm import discretize, log_det, q_function, resolve
from .kernels import J, KernelProfile, builtin_profile

__all__ = [
    "Density",
    "SpectralData",
    "sigma1_at",
    "sigma1_density",
    "density_fd",
    "density_matrices",
    "m_matrix",
    "spectral_data",
    "DizRecord",
    "diz_residual",
]


def density_matrices(q: np.ndarray) -> np.ndarray:
    """``(1/2pi) [[|q|^2, -q^2], [-conj(q)^2, |q|^2]]`` for each q, shape (k, 2, 2)."""
    q = np.asarray(q, dtype=complex)
    a = np.abs(q) ** 2
    out = np.empty(q.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = -(q**2)
    out[..., 1, 0] = -np.conj(q) ** 2
    out[..., 1, 1] = a
    return out / (2.0 * math.pi)


class Density:
    """Samples of sigma_1'(x) that can be evaluated between the nodes.

    When built from ``q`` the density is rebuilt from an interpolant of q,
    so every interpolated value stays rank one with ``(J D)^2 = 0``.
    Otherwise the matrix entries are interpolated linearly.
    """

    def __init__(self, nodes, matrices=None, q=None):
        self.nodes = np.asarray(nodes, dtype=float)
        if q is not None:
            self.q = np.asarray(q, dtype=complex)
            self.matrices = density_matrices(self.q)
            self._interp = BarycentricInterpolator(self.nodes, self.q) if len(self.nodes) > 1 else None
        else:
            if matrices is None:
                raise ValueError("need either matrices or q")
            self.q = None
            self.matrices = np.asarray(matrices, dtype=complex)
            self._interp = None
        if len(self.nodes) == 0 or self.matrices.shape != (len(self.nodes), 2, 2):
            raise ValueError("empty or malformed density")

    @classmethod
    def constant(cls, C, a: float, b: float) -> "Density":
        C = np.asarray(C, dtype=complex)
        return cls([a, b], np.array([C, C]))

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.q is not None:
            if self._interp is None:
                return np.broadcast_to(self.matrices[0], x.shape + (2, 2)).copy()
            return density_matrices(self._interp(x))
        out = np.empty(x.shape + (2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                col = self.matrices[:, i, j]
                out[..., i, j] = np.interp(x, self.nodes, col.real) + 1j * np.interp(x, self.nodes, col.imag)
        return out


def _phi1(profile: KernelProfile, a: float, zeta: float, n: int):
    op = discretize(profile, a, zeta, n)
    phi = profile.phi(op.nodes)
    return op, phi, resolve(op, phi)


def sigma1_at(profile: KernelProfile, a: float, zeta: float, n: int = 64) -> np.ndarray:
    """sigma_1(zeta) = (1/2pi) int_a^zeta F_1(x) Phi(zeta, x)^* dx with Phi = S_zeta^{-1} F_1."""
    if not zeta > a:
        raise ValueError("sigma1_at needs zeta > a")
    op, phi, f = _phi1(profile, a, zeta, n)
    w = op.weights
    s11 = np.sum(w * phi * np.conj(f))
    s12 = -np.sum(w * phi * f)
    s22 = np.sum(w * np.conj(phi) * f)
    return np.array([[s11, s12], [np.conj(s12), s22]]) / (2.0 * math.pi)


def sigma1_density(profile: KernelProfile, a: float, b: float, n: int = 64) -> Density:
    """Density sigma_1'(x) at the Gauss nodes of [a, b] from the triangular factor."""
    op = discretize(profile, a, b, n)
    q = q_function(op, profile)
    return Density(op.nodes, q=q)


def density_fd(profile: KernelProfile, a: float, b: float, zeta_grid, n: int = 64) -> np.ndarray:
    """Second-order finite differences of zeta -> sigma1_at(zeta) on ``zeta_grid``."""
    grid = np.asarray(zeta_grid, dtype=float)
    if grid.size < 3:
        raise ValueError("finite-difference grid needs at least 3 points")
    if grid[0] <= a or grid[-1] > b or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be ascending inside (a, b]")
    sig = np.array([sigma1_at(profile, a, z, n) for z in grid])
    return np.gradient(sig, grid, axis=0, edge_order=2)


def m_matrix(sigma1) -> np.ndarray:
    """M = i J sigma_1."""
    return 1j * J @ np.asarray(sigma1, dtype=complex)


@dataclass(frozen=True)
class SpectralData:
    zeta_grid: np.ndarray
    sigma1: np.ndarray
    density_chol: np.ndarray
    density_fd: np.ndarray
    M: np.ndarray

    @property
    def sigma(self) -> np.ndarray:
        return self.M


def spectral_data(profile: KernelProfile, a: float, b: float, zeta_grid, n: int = 64) -> SpectralData:
    grid = np.asarray(zeta_grid, dtype=float)
    sig = np.array([sigma1_at(profile, a, z, n) for z in grid])
    fd = np.gradient(sig, grid, axis=0, edge_order=2)
    chol = sigma1_density(profile, a, b, n)(grid)
    M = np.array([m_matrix(s) for s in sig])
    return SpectralData(grid, sig, chol, fd, M)


@dataclass(frozen=True)
class DizRecord:
    zeta: float
    lhs: float
    rhs: float
    residual: float


def diz_residual(gamma: float, zeta_grid, n: int = 96) -> list[DizRecord]:
    """Compare d/dzeta log det S_zeta with its expression through the resolvent.

    Sine profile on ``(0, zeta)``.  ``lhs`` is the central difference of the
    log-determinant with the grid step; ``rhs`` is
    ``-(1/(2 pi zeta)) sum_i w_i 2 Re(conj(phi) Phi_1)(x_i)``, i.e. minus the
    trace of sigma_1(zeta) divided by zeta.
    """
    grid = np.asarray(zeta_grid, dtype=float)
    if grid.size < 5:
        raise ValueError("need at least 5 grid points")
    steps = np.diff(grid)
    h = float(steps[0])
    if np.any(steps <= 0) or not np.allclose(steps, h, rtol=1e-6, atol=0.0):
        raise ValueError("grid must be uniform and ascending")
    if grid[0] - h <= 0:
        raise ValueError("grid must stay a full step away from zeta = 0")
    prof = builtin_profile("sine", gamma=gamma, a=0.0, b=float(grid[-1] + 2 * h))
    out = []
    for z in grid:
        if gamma == 0:
            out.append(DizRecord(float(z), 0.0, 0.0, 0.0))
            continue
        lp = log_det(discretize(prof, 0.0, z + h, n))
        lm = log_det(discretize(prof, 0.0, z - h, n))
        lhs = (lp - lm) / (2 * h)
        op, phi, f = _phi1(prof, 0.0, z, n)
        rhs = -np.sum(op.weights * 2.0 * np.real(np.conj(phi) * f)) / (2.0 * math.pi * z)
        out.append(DizRecord(float(z), float(lhs), float(rhs), float(abs(lhs - rhs))))
    return out
