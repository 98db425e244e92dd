"""Nystrom discretisation of the operators ``S = I +/- K`` and what is done with them.

With Gauss-Legendre nodes ``x_i`` and weights ``w_i`` the operator is
represented twice:

* ``matrix[i, j] = delta_ij + w_j K(x_i, x_j)`` acts on nodal values and is
  what resolvent solves use;
* ``symmetrized = I + W^{1/2} K W^{1/2}`` is similar to ``matrix``, symmetric,
  and is what determinants, norms and triangular factors are computed from.

``K`` here already carries the sign of the profile (``S = I - K_airy``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import specfun
from .kernels import KernelProfile, airy_truncation, kernel_matrix

__all__ = [
    "DiscretizedOperator",
    "NumericalContractError",
    "OperatorNotPositive",
    "SingularOperator",
    "discretize",
    "default_interval",
    "log_det",
    "converged_log_det",
    "resolve",
    "operator_norm",
    "lower_factor",
    "cholesky_factor",
    "q_function",
]

GAUSSIAN_TRUNCATION = 8.0


class NumericalContractError(RuntimeError):
    """A numerical precondition of the pipeline does not hold."""


class OperatorNotPositive(NumericalContractError):
    def __init__(self, pivot: int | None = None):
        self.pivot = pivot
        msg = "operator not positive - determinant sign undefined"
        if pivot is not None:
            msg += f" (factorization breaks down at pivot {pivot})"
        super().__init__(msg)


class SingularOperator(NumericalContractError):
    pass


@dataclass(frozen=True)
class DiscretizedOperator:
    rule: specfun.QuadratureRule
    kernel: np.ndarray
    matrix: np.ndarray
    symmetrized: np.ndarray
    profile: str
    truncation: float | None = None

    @property
    def nodes(self) -> np.ndarray:
        return self.rule.nodes

    @property
    def weights(self) -> np.ndarray:
        return self.rule.weights

    def __len__(self) -> int:
        return len(self.rule)


def default_interval(profile: KernelProfile, zeta: float, a: float | None = None) -> tuple[float, float, float | None]:
    """Integration interval for the family indexed by ``zeta``.

    Z-class profiles live on ``[a, zeta]``; Airy and Gaussian ones on
    ``[zeta, zeta + L]``, the truncation length ``L`` is returned third.
    """
    if profile.kind == "zclass":
        lo = profile.domain[0] if a is None else a
        return lo, zeta, None
    if profile.kind == "airy":
        L = airy_truncation(zeta)
    else:
        L = GAUSSIAN_TRUNCATION
    return zeta, zeta + L, L


def discretize(profile: KernelProfile, left: float, right: float, n: int, truncation: float | None = None) -> DiscretizedOperator:
    if int(n) != n or n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    if not (math.isfinite(left) and math.isfinite(right)):
        raise ValueError("discretisation interval must be finite")
    profile.check_domain(left, right)
    rule = specfun.gauss_legendre(int(n), left, right)
    x, w = rule.nodes, rule.weights
    K = profile.sign * kernel_matrix(profile, x, x)
    K = 0.5 * (K + K.T)
    sw = np.sqrt(w)
    eye = np.eye(len(x))
    matrix = eye + K * w[None, :]
    sym = eye + sw[:, None] * K * sw[None, :]
    for arr in (K, matrix, sym):
        arr.setflags(write=False)
    return DiscretizedOperator(rule, K, matrix, sym, profile.describe(), truncation)


def _cholesky(a: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.cholesky(a, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        # LAPACK reports the order of the failing leading minor in the message
        digits = "".join(ch if ch.isdigit() else " " for ch in str(exc)).split()
        raise OperatorNotPositive(int(digits[0]) - 1 if digits else None) from None


def log_det(op: DiscretizedOperator) -> float:
    """Logarithm of the (positive) Fredholm determinant."""
    L = _cholesky(op.symmetrized)
    return float(2.0 * np.sum(np.log(np.diag(L))))


def converged_log_det(profile: KernelProfile, left: float, right: float, n: int = 64, tol: float = 1e-10, cap: int = 512):
    """Double n until consecutive log-determinants agree to ``tol``; returns (value, n)."""
    prev = log_det(discretize(profile, left, right, n))
    while n < cap:
        n *= 2
        cur = log_det(discretize(profile, left, right, n))
        if abs(cur - prev) <= tol:
            return cur, n
        prev = cur
    return prev, n


def resolve(op: DiscretizedOperator, rhs: np.ndarray) -> np.ndarray:
    """Solve ``h(x_i) + sum_j w_j K(x_i, x_j) h(x_j) = rhs(x_i)`` (columnwise)."""
    rhs = np.asarray(rhs)
    if rhs.shape[0] != len(op):
        raise ValueError("right-hand side does not match the grid")
    try:
        lu = scipy.linalg.lu_factor(op.matrix, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularOperator(str(exc)) from None
    if np.min(np.abs(np.diag(lu[0]))) == 0.0:
        raise SingularOperator("zero pivot in resolvent solve")
    return scipy.linalg.lu_solve(lu, rhs)


def operator_norm(op: DiscretizedOperator) -> float:
    """Largest |eigenvalue| of the kernel part ``S~ - I``."""
    ev = np.linalg.eigvalsh(op.symmetrized - np.eye(len(op)))
    return float(np.max(np.abs(ev)))


def lower_factor(op: DiscretizedOperator) -> np.ndarray:
    """Lower-triangular ``G`` with ``S~ = G^T G``.

    Obtained from the Cholesky factor of the index-reversed matrix.  The
    trailing ``k x k`` block of ``G`` only sees the trailing block of ``S~``.
    """
    rev = op.symmetrized[::-1, ::-1]
    L = _cholesky(rev)
    return np.ascontiguousarray(L.T[::-1, ::-1])


def cholesky_factor(op: DiscretizedOperator) -> np.ndarray:
    """Lower-triangular ``L`` with ``S~ = L L^T``.

    The leading ``k x k`` block of ``L`` depends only on the leading block
    of ``S~``, i.e. on the kernel restricted to ``[a, x_k]``; this is the
    factor that is consistent with the growing-interval family ``S_zeta``.
    """
    return _cholesky(op.symmetrized)


def q_function(op: DiscretizedOperator, profile: KernelProfile) -> np.ndarray:
    """Nodal values of ``q = L^{-1} phi`` (Volterra-triangular inverse applied to the symbol)."""
    L = cholesky_factor(op)
    sw = np.sqrt(op.weights)
    ph = profile.phi(op.nodes) * sw
    # the factor is real: solve real and imaginary parts separately
    re = scipy.linalg.solve_triangular(L, ph.real, lower=True)
    im = scipy.linalg.solve_triangular(L, ph.imag, lower=True)
    return (re + 1j * im) / sw
