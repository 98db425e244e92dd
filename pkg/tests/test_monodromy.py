import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zclass.kernels import J, builtin_profile, zclass_jmodule
from zclass.monodromy import (
    asymptotic_residual,
    boundary_pair,
    constant_density_transfer,
    j_unitarity_residual,
    jump_residual,
    split_residual,
    transfer,
)
from zclass.spectral import Density, sigma1_at, sigma1_density

C_NIL = np.array([[1.0, -1.0], [-1.0, 1.0]]) / (2 * math.pi)


@pytest.fixture(scope="module")
def sine_half():
    prof = builtin_profile("sine", gamma=0.5)
    return prof, sigma1_density(prof, 0.0, 2.0, 64)


def zero_density(x):
    return np.zeros(np.shape(x) + (2, 2), dtype=complex)


def test_zero_density_identity():
    assert np.array_equal(transfer(zero_density, 0.0, 1.0, 2j, 100).W, np.eye(2))
    Wp, Wm = boundary_pair(zero_density, 0.0, 1.0, 0.5, 1e-2)
    assert np.array_equal(Wp, np.eye(2)) and np.array_equal(Wm, np.eye(2))
    assert jump_residual(Wp, Wm, np.eye(2)) == 0.0


@pytest.mark.parametrize("z", [1 + 1j, 2j, -1 + 0.5j, 3 - 0.2j])
def test_constant_density_closed_form(z):
    assert np.allclose(J @ C_NIL @ J @ C_NIL, 0, atol=1e-16)
    W = transfer(Density.constant(C_NIL, 0.0, 2.0), 0.0, 2.0, z, 4000).W
    assert np.max(np.abs(W - constant_density_transfer(C_NIL, 0.0, 2.0, z))) <= 1e-8


def test_closed_form_continuous_around_interval():
    # principal branch: no jumps on a circle enclosing the cut
    th = np.linspace(0.0, 2 * math.pi, 2001)
    vals = np.array([constant_density_transfer(C_NIL, 0.0, 2.0, 1 + 1.5 * np.exp(1j * t)) for t in th])
    steps = np.max(np.abs(np.diff(vals, axis=0)), axis=(1, 2))
    assert steps.max() < 0.01


@pytest.mark.parametrize("z", [2j, 1 + 1j, -1 + 0.5j])
def test_j_unitarity_and_det(sine_half, z):
    _, dens = sine_half
    assert j_unitarity_residual(dens, 0.0, 2.0, z) <= 1e-8
    assert abs(np.linalg.det(transfer(dens, 0.0, 2.0, z).W) - 1) <= 1e-9


def test_j_unitarity_custom_profile():
    prof = builtin_profile("bessel_sqrtarg", alpha=0.5, gamma=0.5, b=4.0)
    dens = sigma1_density(prof, 0.0, 4.0, 48)
    for z in (2j, 1 + 1j, -1 + 0.5j):
        assert j_unitarity_residual(dens, 0.0, 4.0, z) <= 1e-8


def test_step_halving(sine_half):
    _, dens = sine_half
    W1 = transfer(dens, 0.0, 2.0, 1 + 2j, 2000).W
    W2 = transfer(dens, 0.0, 2.0, 1 + 2j, 4000).W
    assert np.max(np.abs(W1 - W2)) <= 1e-8


def test_density_refinement_stability():
    prof = builtin_profile("sine", gamma=0.5)
    W1 = transfer(sigma1_density(prof, 0.0, 2.0, 64), 0.0, 2.0, 1 + 2j).W
    W2 = transfer(sigma1_density(prof, 0.0, 2.0, 128), 0.0, 2.0, 1 + 2j).W
    assert np.max(np.abs(W1 - W2)) <= 1e-6


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 1.95))
def test_split_random_c(c):
    prof = builtin_profile("sine", gamma=0.5)
    dens = sigma1_density(prof, 0.0, 2.0, 32)
    assert split_residual(dens, 0.0, c, 2.0, 2j, 2000) <= 1e-8


def test_split_exact_at_grid_point(sine_half):
    _, dens = sine_half
    assert split_residual(dens, 0.0, 0.7, 2.0, 2j, 2000) <= 1e-13


def test_split_second_order(sine_half):
    _, dens = sine_half
    r = [split_residual(dens, 0.0, 0.7003, 2.0, 2j, s) for s in (500, 1000)]
    assert 3.0 <= r[0] / r[1] <= 5.0


def test_wrong_order_fails_loudly(sine_half):
    _, dens = sine_half
    whole = transfer(dens, 0.0, 2.0, 2j, 2000).W
    left = transfer(dens, 0.0, 0.7, 2j, 700).W
    right = transfer(dens, 0.7, 2.0, 2j, 1300).W
    assert np.max(np.abs(whole - left @ right)) > 1e-4


def test_asymptotics(sine_half):
    prof, dens = sine_half
    s1 = sigma1_at(prof, 0.0, 2.0, 64)
    r = asymptotic_residual(dens, 0.0, 2.0, s1, [1e2, 1e3])
    assert 7 <= r[0] / r[1] <= 13
    M = 1j * J @ s1
    assert abs(np.trace(M).real) <= 1e-15
    assert np.trace(M).imag == pytest.approx((s1[1, 1] - s1[0, 0]).real, abs=1e-15)


def test_asymptotic_zero_density():
    assert asymptotic_residual(zero_density, 0.0, 1.0, np.zeros((2, 2)), [100.0]) == [0.0]


def test_jump_refinement():
    prof = builtin_profile("sine", gamma=0.25)
    dens = sigma1_density(prof, 0.0, 2.0, 64)
    for x in (0.5, 1.0, 1.5):
        Rsq = zclass_jmodule(complex(prof.psi(np.array([x]))[0])).Rsq
        res, traces = [], []
        for eps in (1e-1, 1e-2, 1e-3):
            Wp, Wm = boundary_pair(dens, 0.0, 2.0, x, eps)
            res.append(jump_residual(Wp, Wm, Rsq))
            G = Wp @ np.linalg.inv(Wm)
            assert abs(np.linalg.det(G) - 1) <= 1e-9
            traces.append(abs(np.trace(G) - 2))
        assert res[2] < res[1] < res[0]
        assert res[1] <= 0.5 * res[0] and res[2] <= 0.6 * res[1]
        assert traces[2] < traces[0]


def test_error_cases(sine_half):
    _, dens = sine_half
    with pytest.raises(ValueError):
        transfer(dens, 0.0, 2.0, 1.0 + 0j)
    with pytest.raises(ValueError):
        boundary_pair(dens, 0.0, 2.0, 2.5, 1e-2)
    with pytest.raises(ValueError):
        boundary_pair(dens, 0.0, 2.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        split_residual(dens, 0.0, 3.0, 2.0, 2j)
    with pytest.raises(np.linalg.LinAlgError):
        jump_residual(np.eye(2), np.zeros((2, 2)), np.eye(2))
    with pytest.raises(ValueError):
        asymptotic_residual(dens, 0.0, 2.0, np.zeros((2, 2)), [5.0])
