"""Z-class symbols, the 2x2 J-module algebra, and integrable kernels.

A Z-class profile is described by the real and imaginary parts of its
symbol, ``phi = A + iB``.  The associated integral operator is
``S f = f + int kappa(x, t) f(t) dt`` with

    kappa(x, t) = (A(x) B(t) - B(x) A(t)) / (pi (x - t)),

and on the diagonal ``kappa(x, x) = (A'(x) B(x) - A(x) B'(x)) / pi``.  The
Airy and Gaussian profiles are given by their kernels directly and enter
as ``S = I - K``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from . import specfun

__all__ = [
    "J",
    "JModule2",
    "KernelProfile",
    "zclass_jmodule",
    "f1_vector",
    "kernel_eval",
    "kernel_matrix",
    "builtin_profile",
    "profile_from_csv",
    "airy_truncation",
    "cd_representation",
    "TruncationError",
]

J = np.diag([-1.0, 1.0])

Evaluator = Callable[[np.ndarray], np.ndarray]


class TruncationError(RuntimeError):
    """A semi-infinite integral did not decay before its truncation point."""


@dataclass(frozen=True)
class JModule2:
    psi: complex
    R: np.ndarray
    Rsq: np.ndarray
    Rinv: np.ndarray
    D: np.ndarray


def zclass_jmodule(psi: complex) -> JModule2:
    """Matrices R, R^2, R^-1 and D = J(R - R^-1) of the Z-class module with parameter psi."""
    psi = complex(psi)
    if not (math.isfinite(psi.real) and math.isfinite(psi.imag)):
        raise ValueError("psi must be finite")
    a = abs(psi)
    c = psi.conjugate()
    R = np.array([[1 - a, psi], [-c, 1 + a]], dtype=complex)
    Rsq = np.array([[1 - 2 * a, 2 * psi], [-2 * c, 1 + 2 * a]], dtype=complex)
    Rinv = np.array([[1 + a, -psi], [c, 1 - a]], dtype=complex)
    D = 2.0 * np.array([[a, -psi], [-c, a]], dtype=complex)
    return JModule2(psi, R, Rsq, Rinv, D)


@dataclass(frozen=True)
class KernelProfile:
    """A kernel together with the interval on which it lives.

    For ``kind == "zclass"`` the four evaluators ``A, B, Ap, Bp`` are
    required (vectorised over numpy arrays).  ``airy`` and ``gaussian``
    profiles carry no symbol; their kernel is built in.
    """

    kind: str
    name: str
    domain: tuple[float, float]
    params: Mapping[str, float] = field(default_factory=dict)
    A: Evaluator | None = None
    B: Evaluator | None = None
    Ap: Evaluator | None = None
    Bp: Evaluator | None = None

    def __post_init__(self):
        if self.kind not in ("zclass", "airy", "gaussian"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == "zclass" and None in (self.A, self.B, self.Ap, self.Bp):
            raise ValueError("zclass profiles need A, B, A' and B' evaluators")
        lo, hi = self.domain
        if not hi > lo:
            raise ValueError(f"empty domain {self.domain}")

    @property
    def sign(self) -> float:
        """+1 if ``S = I + K``, -1 if ``S = I - K``."""
        return 1.0 if self.kind == "zclass" else -1.0

    def check_domain(self, *xs: float) -> None:
        lo, hi = self.domain
        for x in xs:
            x = np.asarray(x)
            if np.any(x < lo) or np.any(x > hi) or np.any(~np.isfinite(x)):
                raise ValueError(f"argument outside the domain [{lo}, {hi}] of profile {self.name!r}")

    def phi(self, x):
        self._need_zclass()
        x = np.asarray(x, dtype=float)
        return self.A(x) + 1j * self.B(x)

    def psi(self, x):
        return 0.5 * self.phi(x) ** 2

    def _need_zclass(self):
        if self.kind != "zclass":
            raise TypeError(f"profile {self.name!r} has no Z-class symbol")

    def describe(self) -> str:
        extra = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}({extra})" if extra else self.name


def f1_vector(profile: KernelProfile, x: float) -> np.ndarray:
    """Column ``[phi(x), -conj(phi(x))]``."""
    profile._need_zclass()
    profile.check_domain(x)
    p = complex(profile.phi(np.array([x]))[0])
    return np.array([p, -p.conjugate()])


def _airy_values(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals = np.array([specfun.airy(float(v)) for v in np.ravel(x)])
    if vals.size == 0:
        return np.zeros(0), np.zeros(0)
    return vals[:, 0].reshape(np.shape(x)), vals[:, 1].reshape(np.shape(x))


def kernel_matrix(profile: KernelProfile, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Kernel values on the grid ``x[:, None] x t[None, :]`` (no sign applied).

    Coinciding arguments get the analytic diagonal limit.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    d = x[:, None] - t[None, :]
    same = d == 0.0
    safe = np.where(same, 1.0, d)
    if profile.kind == "gaussian":
        return np.exp(-0.5 * (x[:, None] ** 2 + t[None, :] ** 2))
    if profile.kind == "airy":
        ax, apx = _airy_values(x)
        at, apt = (ax, apx) if t is x else _airy_values(t)
        k = (ax[:, None] * apt[None, :] - apx[:, None] * at[None, :]) / safe
        if same.any():
            diag = apx**2 - x * ax**2
            k = np.where(same, np.broadcast_to(diag[:, None], k.shape), k)
        return k
    Ax, Bx = profile.A(x), profile.B(x)
    At, Bt = (Ax, Bx) if t is x else (profile.A(t), profile.B(t))
    k = (Ax[:, None] * Bt[None, :] - Bx[:, None] * At[None, :]) / (math.pi * safe)
    if same.any():
        diag = (profile.Ap(x) * Bx - Ax * profile.Bp(x)) / math.pi
        k = np.where(same, np.broadcast_to(diag[:, None], k.shape), k)
    return k


def kernel_eval(profile: KernelProfile, x: float, t: float) -> float:
    """Kernel value at a single pair of points.

    Z-class: ``kappa(x, t)`` as in the module docstring (enters ``S = I + K``).
    Airy: ``(Ai(x) Ai'(t) - Ai'(x) Ai(t)) / (x - t)``; Gaussian:
    ``exp(-(x^2 + t^2)/2)`` (both enter ``S = I - K``).
    """
    profile.check_domain(x, t)
    return float(kernel_matrix(profile, np.array([x], float), np.array([t], float))[0, 0])


# --------------------------------------------------------------------------
# built-in profiles


def _vectorize(f: Callable[[float], float]) -> Evaluator:
    def g(x):
        x = np.asarray(x, dtype=float)
        out = np.array([f(float(v)) for v in np.ravel(x)], dtype=float)
        return out.reshape(x.shape)

    return g


def _sine(gamma: float, a: float, b: float) -> KernelProfile:
    if not 0 <= gamma <= 1:
        raise ValueError("sine profile needs 0 <= gamma <= 1")
    s = math.sqrt(gamma)
    return KernelProfile(
        "zclass",
        "sine",
        (a, b),
        {"gamma": gamma},
        A=lambda x: -s * np.sin(x),
        B=lambda x: s * np.cos(x),
        Ap=lambda x: -s * np.cos(x),
        Bp=lambda x: -s * np.sin(x),
    )


def _check_bessel(alpha: float, gamma: float) -> None:
    if not alpha > -0.5:
        raise ValueError("Bessel order alpha must exceed -1/2")
    if not 0 <= gamma <= 1:
        raise ValueError("Bessel profile needs 0 <= gamma <= 1")


def _bessel_plain(alpha: float, gamma: float, b: float) -> KernelProfile:
    # A = c J_a(x), B = x A'(x)
    _check_bessel(alpha, gamma)
    c = math.sqrt(gamma * math.pi)

    def jpp(x: float) -> float:
        # Bessel's equation: J'' = -J'/x - (1 - a^2/x^2) J
        j, jp = specfun.bessel_j(alpha, x), specfun.bessel_j_prime(alpha, x)
        return -jp / x - (1.0 - alpha * alpha / (x * x)) * j

    return KernelProfile(
        "zclass",
        "bessel",
        (0.0, b),
        {"alpha": alpha, "gamma": gamma},
        A=_vectorize(lambda x: c * specfun.bessel_j(alpha, x)),
        B=_vectorize(lambda x: c * x * specfun.bessel_j_prime(alpha, x)),
        Ap=_vectorize(lambda x: c * specfun.bessel_j_prime(alpha, x)),
        Bp=_vectorize(lambda x: c * (specfun.bessel_j_prime(alpha, x) + x * jpp(x))),
    )


def _bessel_sqrtarg(alpha: float, gamma: float, b: float) -> KernelProfile:
    # A = c J_a(sqrt x), B = x A'(x) = c sqrt(x) J_a'(sqrt x) / 2
    _check_bessel(alpha, gamma)
    c = math.sqrt(gamma * math.pi)

    def parts(x: float) -> tuple[float, float, float]:
        u = math.sqrt(x)
        j = specfun.bessel_j(alpha, u)
        jp = specfun.bessel_j_prime(alpha, u)
        jpp = -jp / u - (1.0 - alpha * alpha / (u * u)) * j
        return u, jp, jpp

    def Ap(x: float) -> float:
        u, jp, _ = parts(x)
        return c * jp / (2.0 * u)

    def Bp(x: float) -> float:
        # d/dx [sqrt(x) J'(sqrt x) / 2] = J'(u)/(4u) + J''(u)/4
        u, jp, jpp = parts(x)
        return c * (jp / (4.0 * u) + 0.25 * jpp)

    return KernelProfile(
        "zclass",
        "bessel_sqrtarg",
        (0.0, b),
        {"alpha": alpha, "gamma": gamma},
        A=_vectorize(lambda x: c * specfun.bessel_j(alpha, math.sqrt(x))),
        B=_vectorize(lambda x: 0.5 * c * math.sqrt(x) * specfun.bessel_j_prime(alpha, math.sqrt(x))),
        Ap=_vectorize(Ap),
        Bp=_vectorize(Bp),
    )


def builtin_profile(kind: str, **params) -> KernelProfile:
    """Construct one of the shipped profiles.

    ``sine(gamma, a=-50, b=50)``, ``bessel(alpha, gamma, b=50)``,
    ``bessel_sqrtarg(alpha, gamma, b=50)``, ``gaussian()``, ``airy()``, and
    ``custom(A, B, Ap, Bp, a, b)`` with caller-supplied vectorised evaluators.
    """
    if kind == "sine":
        return _sine(float(params.get("gamma", 1.0)), float(params.get("a", -50.0)), float(params.get("b", 50.0)))
    if kind == "bessel":
        return _bessel_plain(float(params.get("alpha", 0.0)), float(params.get("gamma", 1.0)), float(params.get("b", 50.0)))
    if kind == "bessel_sqrtarg":
        return _bessel_sqrtarg(
            float(params.get("alpha", 0.0)), float(params.get("gamma", 1.0)), float(params.get("b", 50.0))
        )
    if kind == "gaussian":
        return KernelProfile("gaussian", "gaussian", (-math.inf, math.inf))
    if kind == "airy":
        return KernelProfile("airy", "airy", (-math.inf, math.inf))
    if kind == "custom":
        try:
            A, B, Ap, Bp = (params[k] for k in ("A", "B", "Ap", "Bp"))
            a, b = float(params["a"]), float(params["b"])
        except KeyError as exc:
            raise ValueError(f"custom profile is missing {exc.args[0]!r}") from None
        return KernelProfile("zclass", params.get("name", "custom"), (a, b), {}, A=A, B=B, Ap=Ap, Bp=Bp)
    raise ValueError(f"unknown profile kind {kind!r}")


def profile_from_csv(path: str | Path, name: str | None = None) -> KernelProfile:
    """Custom Z-class profile from samples with header ``x,A,B,Aprime,Bprime``.

    Each column is interpolated by a cubic spline; the interpolation error
    is the caller's responsibility.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        cols = ("x", "A", "B", "Aprime", "Bprime")
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in cols):
            raise ValueError(f"{path}: header must contain {','.join(cols)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append([float(row[c]) for c in cols])
            except (TypeError, ValueError):
                raise ValueError(f"{path}: row {lineno} is not numeric") from None
    data = np.array(rows)
    if len(data) < 4:
        raise ValueError(f"{path}: need at least 4 samples")
    bad = np.nonzero(np.diff(data[:, 0]) <= 0)[0]
    if bad.size:
        raise ValueError(f"{path}: x must be strictly increasing (row {bad[0] + 3})")
    x = data[:, 0]
    splines = [CubicSpline(x, data[:, k]) for k in range(1, 5)]
    return KernelProfile(
        "zclass",
        name or path.stem,
        (float(x[0]), float(x[-1])),
        {},
        A=splines[0],
        B=splines[1],
        Ap=splines[2],
        Bp=splines[3],
    )


def airy_truncation(zeta: float, level: float = 1e-18) -> float:
    """Smallest L >= 1 with ``Ai(zeta + L)^2 <= level``."""
    target = math.sqrt(level)
    lo, hi = max(zeta, 0.0), max(zeta, 0.0) + 1.0
    while specfun.airy(hi)[0] > target:
        lo, hi = hi, hi + 1.0
    if specfun.airy(lo)[0] <= target:
        return 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if specfun.airy(mid)[0] > target:
            lo = mid
        else:
            hi = mid
    return max(hi - zeta, 1.0)


# --------------------------------------------------------------------------
# Christoffel-Darboux representations


def _bessel_cd(x: float, t: float, alpha: float, gamma: float) -> float:
    if x < 0 or t < 0:
        raise ValueError("bessel_cd needs x, t >= 0")
    sx, st = math.sqrt(x), math.sqrt(t)

    # s = u^2 removes the square-root behaviour of the integrand at s = 0
    def f(u: float) -> float:
        return 2.0 * u * specfun.bessel_j(alpha, sx * u) * specfun.bessel_j(alpha, st * u)

    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    return 0.25 * gamma * val


def _decay_point(f: Callable[[float], float], start: float, level: float) -> float:
    s = start
    while abs(f(s)) > level:
        s += 0.5
        if s > start + 400:
            raise TruncationError("integrand does not decay")
    return s


def _airy_cd(x: float, t: float) -> float:
    def f(s: float) -> float:
        return specfun.airy(x + s)[0] * specfun.airy(t + s)[0]

    # both factors are monotone once x + s, t + s > 0
    s_end = _decay_point(f, max(0.0, -min(x, t)), 1e-16)
    brk = [0.0] + [p for p in (-x, -t) if 0.0 < p < s_end] + [s_end]
    brk = sorted(set(brk))
    total = 0.0
    for lo, hi in zip(brk[:-1], brk[1:]):
        total += integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
    return total


def _general_cd(x: float, t: float, A, v, T: float, vprime=None) -> float:
    if x == t:
        if vprime is None:
            h = 1e-5
            vprime = lambda s: (v(s + h) - v(s - h)) / (2 * h)  # noqa: E731

        def f(u: float) -> float:
            return A(u + x) ** 2 * vprime(u + x) / math.pi

    else:

        def f(u: float) -> float:
            return A(u + x) * (v(u + x) - v(u + t)) * A(u + t) / (math.pi * (x - t))

    scale = max(abs(f(u)) for u in np.linspace(0.0, T, 9)) or 1.0
    if abs(f(T)) > 1e-12 * scale + 1e-300:
        raise TruncationError(f"integrand still {abs(f(T)):.3e} at truncation point u = {T}")
    return integrate.quad(f, 0.0, T, epsabs=1e-14, epsrel=1e-13, limit=400)[0]


def cd_representation(kind: str, x: float, t: float, extra=None) -> float:
    """Kernel value through its Christoffel-Darboux integral.

    ``bessel_cd``: ``(gamma/4) int_0^1 J_a(sqrt(xs)) J_a(sqrt(ts)) ds`` with
    ``extra = (alpha, gamma)``.  ``airy_cd``: ``int_0^inf Ai(x+s) Ai(t+s) ds``.
    ``general``: ``int_0^T A(u+x) (v(u+x) - v(u+t)) A(u+t) du / (pi (x-t))``
    with ``extra = (A, v, T)`` or ``(A, v, T, v')``; raises
    :class:`TruncationError` if the integrand has not decayed at ``T``.
    """
    if kind == "bessel_cd":
        alpha, gamma = extra
        return _bessel_cd(float(x), float(t), float(alpha), float(gamma))
    if kind == "airy_cd":
        return _airy_cd(float(x), float(t))
    if kind == "general":
        A, v, T, *rest = extra
        return _general_cd(float(x), float(t), A, v, float(T), rest[0] if rest else None)
    raise ValueError(f"unknown CD representation {kind!r}")
