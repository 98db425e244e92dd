import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zclass import specfun
from zclass.fredholm import discretize, operator_norm
from zclass.kernels import J, builtin_profile
from zclass.spectral import (
    Density,
    density_fd,
    density_matrices,
    diz_residual,
    m_matrix,
    sigma1_at,
    sigma1_density,
    spectral_data,
)


def smooth_profile(scale: float):
    # A = c e^{-x/3} cos(1.3 x), B = c e^{-x/3} sin(0.7 x + 0.2)
    def A(x):
        return scale * np.exp(-x / 3) * np.cos(1.3 * x)

    def B(x):
        return scale * np.exp(-x / 3) * np.sin(0.7 * x + 0.2)

    def Ap(x):
        return scale * np.exp(-x / 3) * (-np.cos(1.3 * x) / 3 - 1.3 * np.sin(1.3 * x))

    def Bp(x):
        return scale * np.exp(-x / 3) * (-np.sin(0.7 * x + 0.2) / 3 + 0.7 * np.cos(0.7 * x + 0.2))

    return builtin_profile("custom", A=A, B=B, Ap=Ap, Bp=Bp, a=0.0, b=3.0, name="smooth")


@pytest.fixture(scope="module")
def smooth():
    raw = operator_norm(discretize(smooth_profile(1.0), 0.0, 3.0, 64))
    return smooth_profile(math.sqrt(0.45 / raw))


def test_zero_gamma_gives_zero():
    prof = builtin_profile("sine", gamma=0.0)
    assert np.array_equal(sigma1_at(prof, 0.0, 1.0, 16), np.zeros((2, 2)))
    assert np.array_equal(sigma1_density(prof, 0.0, 1.0, 16).matrices, np.zeros((16, 2, 2)))


def test_small_gamma_first_order():
    g = 1e-4
    s = sigma1_at(builtin_profile("sine", gamma=g), 0.0, 1.0, 32)
    off = (cmath.exp(2j) - 1) / 2j
    ref = g / (2 * math.pi) * np.array([[1, off], [off.conjugate(), 1]])
    assert np.max(np.abs(s - ref)) <= 10 * g**2


def test_sigma1_hermitian():
    s = sigma1_at(builtin_profile("sine", gamma=1.0), 0.0, 2.0, 64)
    assert np.max(np.abs(s - s.conj().T)) <= 1e-11


def test_sigma1_monotone():
    prof = builtin_profile("sine", gamma=0.8)
    zs = np.linspace(0.1, 3.0, 15)
    sig = [sigma1_at(prof, 0.0, z, 64) for z in zs]
    for s1, s2 in zip(sig[:-1], sig[1:]):
        d = s2 - s1
        assert np.linalg.eigvalsh(0.5 * (d + d.conj().T)).min() >= -1e-9


def test_sigma1_requires_positive_length():
    with pytest.raises(ValueError):
        sigma1_at(builtin_profile("sine", gamma=1.0), 1.0, 1.0, 16)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.5, 3.0))
def test_density_structure(gamma, b):
    dens = sigma1_density(builtin_profile("sine", gamma=gamma), 0.0, b, 32)
    D = dens.matrices
    JD = J[None] @ D
    assert np.max(np.abs(JD @ JD)) <= 1e-10
    for m, q in zip(D, dens.q):
        assert np.linalg.eigvalsh(m).min() >= -1e-11
        assert abs(np.linalg.det(m)) <= 1e-10 * np.trace(m).real ** 2 + 1e-300
        assert np.trace(m).real == pytest.approx(abs(q) ** 2 / math.pi, rel=1e-13)
        beta = np.array([[np.conj(q), -q]]) / math.sqrt(2 * math.pi)
        assert np.allclose(beta.conj().T @ beta, m, atol=1e-12)


def test_interpolated_density_stays_nilpotent():
    dens = sigma1_density(builtin_profile("sine", gamma=0.5), 0.0, 2.0, 32)
    D = dens(np.linspace(0.0, 2.0, 101))
    JD = J[None] @ D
    assert np.max(np.abs(JD @ JD)) <= 1e-12


def _integrated_density(prof, a, b, zeta, n):
    # one factorization on the full [a, b]; integrate its interpolant over [a, zeta]
    dens = sigma1_density(prof, a, b, n)
    rule = specfun.gauss_legendre(n, a, zeta)
    return np.einsum("k,kij->ij", rule.weights, dens(rule.nodes))


@pytest.mark.parametrize("zeta", [0.7, 1.3, 1.9])
def test_cross_route_integral_sine(zeta):
    prof = builtin_profile("sine", gamma=0.5)
    lhs = _integrated_density(prof, 0.0, 2.0, zeta, 64)
    assert np.max(np.abs(lhs - sigma1_at(prof, 0.0, zeta, 64))) <= 1e-4


@pytest.mark.parametrize("zeta", [1.0, 2.5])
def test_cross_route_integral_custom(smooth, zeta):
    assert operator_norm(discretize(smooth, 0.0, 3.0, 64)) <= 0.5
    lhs = _integrated_density(smooth, 0.0, 3.0, zeta, 64)
    assert np.max(np.abs(lhs - sigma1_at(smooth, 0.0, zeta, 64))) <= 1e-4


def test_cross_route_full_interval_is_algebraic():
    # at zeta = b both routes reduce to phi^* S~^{-1} phi, so they agree to rounding
    prof = builtin_profile("sine", gamma=0.5)
    lhs = _integrated_density(prof, 0.0, 2.0, 2.0, 64)
    assert np.max(np.abs(lhs - sigma1_at(prof, 0.0, 2.0, 64))) <= 1e-14


def test_density_cross_route_sine():
    prof = builtin_profile("sine", gamma=0.5)
    grid = np.round(np.arange(1, 101) * 0.02, 12)
    fd = density_fd(prof, 0.0, 2.0, grid, 64)
    chol = sigma1_density(prof, 0.0, 2.0, 64)(grid)
    assert np.max(np.abs(fd - chol)) <= 1e-4


def test_density_fd_second_order():
    prof = builtin_profile("sine", gamma=0.5)
    ref = sigma1_density(prof, 0.0, 2.0, 256)
    errs = []
    for h in (0.08, 0.04):
        g = np.round(np.arange(1, int(round(2 / h)) + 1) * h, 12)
        errs.append(np.max(np.abs(density_fd(prof, 0.0, 2.0, g, 64) - ref(g))[1:-1]))
    assert 3.0 <= errs[0] / errs[1] <= 5.0


def test_density_fd_validation():
    prof = builtin_profile("sine", gamma=0.5)
    with pytest.raises(ValueError):
        density_fd(prof, 0.0, 2.0, [0.5, 1.0], 16)
    with pytest.raises(ValueError):
        density_fd(prof, 0.0, 2.0, [0.0, 0.5, 1.0], 16)


def test_m_matrix_examples():
    assert np.array_equal(m_matrix(np.zeros((2, 2))), np.zeros((2, 2)))
    M = m_matrix(np.diag([1.0, 2.0]))
    assert np.array_equal(M, np.array([[-1j, 0], [0, 2j]]))
    s = sigma1_at(builtin_profile("sine", gamma=0.7), 0.0, 1.5, 32)
    M = m_matrix(s)
    val = 1j * (M[1, 1] - M[0, 0])
    assert abs(val.imag) <= 1e-15
    assert val.real == pytest.approx(-np.trace(s).real, rel=1e-14)


def test_spectral_data_shapes_and_order_independence():
    prof = builtin_profile("sine", gamma=0.5)
    grid = np.linspace(0.2, 2.0, 10)
    sd = spectral_data(prof, 0.0, 2.0, grid, 32)
    assert sd.sigma1.shape == sd.density_chol.shape == sd.density_fd.shape == sd.M.shape == (10, 2, 2)
    assert np.array_equal(sd.sigma, sd.M)
    rev = [sigma1_at(prof, 0.0, z, 32) for z in grid[::-1]][::-1]
    assert np.array_equal(np.array(rev), sd.sigma1)


def test_density_constant_and_linear():
    C = np.array([[1, -1], [-1, 1]]) / (2 * math.pi)
    d = Density.constant(C, 0.0, 1.0)
    assert np.allclose(d([0.0, 0.3, 1.0]), C)
    mats = density_matrices(np.array([1.0, 2.0]))
    lin = Density([0.0, 1.0], mats)
    assert np.allclose(lin(0.5)[0], 0.5 * (mats[0] + mats[1]))
    with pytest.raises(ValueError):
        Density([0.0, 1.0])


def test_diz_identity():
    recs = diz_residual(1.0, np.round(0.2 + 0.02 * np.arange(91), 12), 96)
    assert max(r.residual for r in recs) <= 1e-4


def test_diz_small_gamma_limit():
    g = 1e-5
    recs = diz_residual(g, np.linspace(0.2, 0.6, 5), 32)
    for r in recs:
        assert r.rhs == pytest.approx(-g / math.pi, rel=1e-3)
        assert r.lhs == pytest.approx(-g / math.pi, rel=1e-3)


def test_diz_zero_gamma_exact():
    assert all(r.residual == 0.0 for r in diz_residual(0.0, np.linspace(0.3, 1.1, 5), 16))


def test_diz_grid_validation():
    with pytest.raises(ValueError):
        diz_residual(1.0, [0.2, 0.4, 0.6], 16)
    with pytest.raises(ValueError):
        diz_residual(1.0, [0.2, 0.3, 0.5, 0.6, 0.7], 16)
    with pytest.raises(ValueError):
        diz_residual(1.0, np.linspace(0.1, 0.5, 5), 16)
