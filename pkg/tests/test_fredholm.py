import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from zclass import specfun
from zclass.fredholm import (
    OperatorNotPositive,
    cholesky_factor,
    converged_log_det,
    default_interval,
    discretize,
    log_det,
    lower_factor,
    operator_norm,
    q_function,
    resolve,
)
from zclass.kernels import builtin_profile

# log det from an independent 30-digit mpmath Nystrom solver
SINE_LOGDET = [(1.0, 2.0, -0.91608905441415388403), (0.5, 1.0, -0.17255437075947917098), (0.25, 3.0, -0.26068888762693197273)]
# log F_2(s), Airy determinant on [s, infinity)
AIRY_LOGDET = [(0.0, -0.031105985306312353666), (-1.0, -0.2141661663926313747)]


@pytest.mark.parametrize("gamma,zeta,ref", SINE_LOGDET)
def test_sine_log_det_reference(gamma, zeta, ref):
    op = discretize(builtin_profile("sine", gamma=gamma), 0.0, zeta, 64)
    assert log_det(op) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("zeta,ref", AIRY_LOGDET)
def test_airy_log_det_reference(zeta, ref):
    prof = builtin_profile("airy")
    a, b, L = default_interval(prof, zeta)
    assert log_det(discretize(prof, a, b, 64, L)) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("zeta", [0.0, 0.5, 1.0, 2.0, 3.0])
def test_gaussian_det_closed_form(zeta):
    prof = builtin_profile("gaussian")
    a, b, _ = default_interval(prof, zeta)
    det = math.exp(log_det(discretize(prof, a, b, 64)))
    assert det == pytest.approx(specfun.gaussian_det_closed_form(zeta), abs=1e-12)


def test_zero_kernel_gives_unit_determinant():
    op = discretize(builtin_profile("sine", gamma=0.0), 0.0, 2.0, 16)
    assert log_det(op) == 0.0
    assert np.array_equal(op.matrix, np.eye(16))


def test_small_gamma_linear_term():
    g = 1e-3
    ld = log_det(discretize(builtin_profile("sine", gamma=g), 0.0, 1.0, 64))
    assert abs(ld + g / math.pi) <= 10 * g**2


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.1, 4.0))
def test_sine_spectrum_in_unit_interval(gamma, zeta):
    op = discretize(builtin_profile("sine", gamma=gamma), 0.0, zeta, 32)
    ev = np.linalg.eigvalsh(op.symmetrized)
    assert ev.min() > 0
    assert ev.max() <= 1 + 1e-13
    assert operator_norm(op) <= gamma + 1e-13


def test_matrix_and_symmetrized_are_similar():
    op = discretize(builtin_profile("sine", gamma=0.8), 0.0, 2.0, 24)
    sw = np.sqrt(op.weights)
    assert np.allclose(op.symmetrized, sw[:, None] * op.matrix / sw[None, :], atol=1e-14)


def test_not_positive_reports_pivot():
    prof = builtin_profile("gaussian")
    op = discretize(prof, -4.0, 4.0, 64)
    with pytest.raises(OperatorNotPositive) as info:
        log_det(op)
    assert "not positive" in str(info.value)
    assert info.value.pivot is not None


def test_resolve_solves_nodal_system():
    op = discretize(builtin_profile("sine", gamma=1.0), 0.0, 2.0, 32)
    rhs = np.cos(op.nodes) + 1j * op.nodes
    h = resolve(op, rhs)
    assert np.allclose(op.matrix @ h, rhs, atol=1e-13)


def test_resolve_shape_mismatch():
    op = discretize(builtin_profile("sine", gamma=1.0), 0.0, 2.0, 8)
    with pytest.raises(ValueError):
        resolve(op, np.ones(5))


def test_discretize_validation():
    prof = builtin_profile("sine", gamma=1.0)
    with pytest.raises(ValueError):
        discretize(prof, 0.0, 1.0, 1)
    with pytest.raises(ValueError):
        discretize(prof, 0.0, math.inf, 8)


def test_converged_log_det():
    val, n = converged_log_det(builtin_profile("sine", gamma=1.0), 0.0, 2.0, n=8)
    assert val == pytest.approx(SINE_LOGDET[0][2], abs=1e-10)
    assert n <= 64


def test_lower_factor_contract():
    op = discretize(builtin_profile("sine", gamma=0.9), 0.0, 2.0, 20)
    G = lower_factor(op)
    assert np.allclose(G, np.tril(G))
    assert np.allclose(G.T @ G, op.symmetrized, atol=1e-13)
    # trailing blocks of G only see trailing blocks of S~
    k = 7
    sub = op.symmetrized[-k:, -k:]
    Gk = lower_factor_of(sub)
    assert np.allclose(G[-k:, -k:], Gk, atol=1e-13)


def lower_factor_of(s):
    L = scipy.linalg.cholesky(s[::-1, ::-1], lower=True)
    return L.T[::-1, ::-1]


def test_cholesky_factor_is_causal():
    prof = builtin_profile("sine", gamma=0.9)
    op = discretize(prof, 0.0, 2.0, 20)
    L = cholesky_factor(op)
    assert np.allclose(L @ L.T, op.symmetrized, atol=1e-13)
    k = 9
    Lk = scipy.linalg.cholesky(op.symmetrized[:k, :k], lower=True)
    assert np.allclose(L[:k, :k], Lk, atol=1e-14)


def test_q_function_small_gamma():
    # to first order q = phi, so |q|^2 = gamma
    g = 1e-6
    prof = builtin_profile("sine", gamma=g)
    q = q_function(discretize(prof, 0.0, 2.0, 32), prof)
    assert np.allclose(np.abs(q) ** 2, g, rtol=1e-5)
    assert np.allclose(q, prof.phi(discretize(prof, 0.0, 2.0, 32).nodes), rtol=1e-5)


def test_operator_arrays_read_only():
    op = discretize(builtin_profile("sine", gamma=1.0), 0.0, 1.0, 8)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 5.0


def test_airy_trace_matches_quadrature():
    import mpmath

    prof = builtin_profile("airy")
    a, b, L = default_interval(prof, 0.0)
    op = discretize(prof, a, b, 64, L)
    trace = float(np.sum(op.weights * np.diag(op.kernel))) * -1.0
    ref = float(mpmath.quad(lambda x: mpmath.airyai(x, 1) ** 2 - x * mpmath.airyai(x) ** 2, [a, b]))
    assert abs(trace - ref) <= 1e-8


def test_factor_condition_numbers():
    for prof, (a, b) in [
        (builtin_profile("sine", gamma=1.0), (0.0, 4.0)),
        (builtin_profile("bessel_sqrtarg", alpha=0.5, gamma=0.5), (0.0, 4.0)),
    ]:
        op = discretize(prof, a, b, 48)
        G = lower_factor(op)
        cond_g = np.linalg.norm(G, 2) * np.linalg.norm(np.linalg.inv(G), 2)
        assert cond_g <= math.sqrt(np.linalg.cond(op.symmetrized)) * (1 + 1e-8)
