import numpy as np
import pytest

from gyrobundle.liegroup import exp_so3, hat
from gyrobundle.model import (I2, InertiaParams, SystemState, body_momentum,
                              gimbal_rotation, gimbal_rotor_inertia,
                              inertia_commutator, kinetic_energy,
                              locked_body_inertia, locked_inertia_dbeta,
                              locked_inertia_tensor, metric_matrix,
                              metric_matrix_dbeta, momentum_map,
                              reflected_inertia, spin_axis, velocity_vector)
from gyrobundle.verify import random_inertia, random_state


# --- parameter validation -----------------------------------------------------

def test_params_reject_nonpositive_scalar():
    with pytest.raises(ValueError, match="Jz"):
        InertiaParams(Jx=1, Jz=0.0, It=1, Ig=1, Is_g=1)


def test_params_reject_non_spd():
    with pytest.raises(ValueError, match="positive definite"):
        InertiaParams(Jx=1, Jz=1, It=1, Ig=1, Is_g=1, I_sc=np.diag([1, -1, 1]))


def test_params_reject_asymmetric():
    bad = np.eye(3)
    bad[0, 1] = 0.5
    with pytest.raises(ValueError, match="symmetric"):
        InertiaParams(Jx=1, Jz=1, It=1, Ig=1, Is_g=1, I_sc=bad)


# --- gimbal-rotor inertia ------------------------------------------------------

def test_gimbal_rotor_inertia_values(params):
    assert np.array_equal(gimbal_rotor_inertia(params), np.diag([3.0, 4.0, 9.0]))


def test_gimbal_rotor_inertia_half():
    p = InertiaParams(Jx=0.5, Jz=0.5, It=0.5, Ig=0.5, Is_g=0.5)
    assert np.array_equal(gimbal_rotor_inertia(p), np.eye(3))


def test_spin_entry_independent_of_transverse_moments():
    a = InertiaParams(Jx=1, Jz=4, It=2, Ig=3, Is_g=5)
    b = InertiaParams(Jx=1, Jz=4, It=7, Ig=9, Is_g=5)
    assert gimbal_rotor_inertia(a)[2, 2] == gimbal_rotor_inertia(b)[2, 2]


# --- gimbal rotation -----------------------------------------------------------

def test_gimbal_rotation_zero():
    assert np.array_equal(gimbal_rotation(0.0), np.eye(3))


def test_gimbal_rotation_quarter_turn():
    R = gimbal_rotation(np.pi / 2)
    assert np.allclose(R @ [0, 0, 1], [1, 0, 0], atol=1e-15)
    assert np.allclose(R @ [1, 0, 0], [0, 0, -1], atol=1e-15)
    assert np.allclose(R @ [0, 1, 0], [0, 1, 0])


def test_gimbal_rotation_matches_exp():
    for beta in np.linspace(-3.0, 3.0, 13):
        assert np.abs(gimbal_rotation(beta) - exp_so3(beta * I2)).max() < 1e-15


def test_gimbal_rotation_derivative():
    h = 1e-6
    for beta in (0.0, 0.7, -2.1):
        fd = (gimbal_rotation(beta + h) - gimbal_rotation(beta)) / h
        assert np.abs(fd - gimbal_rotation(beta) @ hat(I2)).max() < 1e-5


# --- reflected / locked inertia --------------------------------------------------

def test_reflected_inertia_at_zero(params):
    assert np.allclose(reflected_inertia(0.0, params), gimbal_rotor_inertia(params))


def test_reflected_inertia_trace_invariant(params):
    for beta in np.linspace(0, 2 * np.pi, 17):
        assert abs(np.trace(reflected_inertia(beta, params)) - 16.0) < 1e-12


def test_reflected_inertia_quarter_turn(params):
    assert np.allclose(reflected_inertia(np.pi / 2, params), np.diag([9.0, 4.0, 3.0]),
                       atol=1e-14)


def test_reflected_inertia_eigenvalues_constant(params):
    ref = np.sort(np.linalg.eigvalsh(reflected_inertia(0.0, params)))
    for beta in np.linspace(-np.pi, np.pi, 31):
        eigs = np.sort(np.linalg.eigvalsh(reflected_inertia(beta, params)))
        assert np.abs(eigs - ref).max() < 1e-10


def test_locked_inertia_at_zero(params):
    p = InertiaParams(Jx=1, Jz=4, It=2, Ig=3, Is_g=5, I_sc=10 * np.eye(3))
    assert np.allclose(locked_body_inertia(0.0, p), np.diag([13.0, 14.0, 19.0]))


def test_locked_inertia_axis2_entry_constant(params):
    base = locked_body_inertia(0.0, params)
    for beta in np.linspace(-np.pi, np.pi, 11):
        diff = locked_body_inertia(beta, params) - base
        assert abs(diff[1, 1]) < 1e-14


def test_locked_inertia_positive_definite(dense_params):
    rng = np.random.default_rng(5)
    for beta in rng.uniform(-np.pi, np.pi, 50):
        assert np.linalg.eigvalsh(locked_body_inertia(beta, dense_params)).min() > 0


def test_locked_inertia_dbeta_matches_fd(dense_params):
    h = 1e-6
    for beta in (0.0, 0.8, -1.9):
        fd = (locked_body_inertia(beta + h, dense_params)
              - locked_body_inertia(beta - h, dense_params)) / (2 * h)
        assert np.abs(fd - locked_inertia_dbeta(beta, dense_params)).max() < 1e-6


def test_inertia_commutator_structure(params):
    U = inertia_commutator(params)
    d = gimbal_rotor_inertia(params)
    direct = hat(I2) @ d - d @ hat(I2)
    assert np.abs(U - direct).max() == 0.0
    assert np.abs(U - U.T).max() == 0.0
    u = params.spin_inertia - params.gimbal_inertia
    expected = np.zeros((3, 3))
    expected[0, 2] = expected[2, 0] = u
    assert np.array_equal(U, expected)


# --- metric matrix ----------------------------------------------------------------

def test_metric_matrix_at_zero(params):
    M = metric_matrix(0.0, params)
    assert np.allclose(M[:3, 3], params.gimbal_axis_inertia * np.array([0, 1, 0]))
    assert np.allclose(M[:3, 4], params.spin_inertia * np.array([0, 0, 1]))
    assert M[3, 4] == 0.0


def test_metric_matrix_symmetric(dense_params):
    rng = np.random.default_rng(6)
    for beta in rng.uniform(-np.pi, np.pi, 1000):
        M = metric_matrix(beta, dense_params)
        assert np.abs(M - M.T).max() < 1e-15


def test_metric_matrix_spd(dense_params):
    rng = np.random.default_rng(7)
    for beta in rng.uniform(-np.pi, np.pi, 100):
        assert np.linalg.eigvalsh(metric_matrix(beta, dense_params)).min() > 0


def test_metric_quadratic_form_is_twice_ke(dense_params):
    rng = np.random.default_rng(8)
    for _ in range(200):
        s = random_state(rng)
        v = velocity_vector(s)
        M = metric_matrix(s.shape.beta, dense_params)
        assert abs(v @ M @ v - 2 * kinetic_energy(s, dense_params)) < 1e-12


def test_metric_matrix_dbeta_matches_fd(dense_params):
    h = 1e-6
    for beta in (0.3, -1.2, 2.5):
        fd = (metric_matrix(beta + h, dense_params)
              - metric_matrix(beta - h, dense_params)) / (2 * h)
        assert np.abs(fd - metric_matrix_dbeta(beta, dense_params)).max() < 1e-6


# --- kinetic energy -----------------------------------------------------------------

def test_ke_zero_at_rest(params):
    s = SystemState.make(beta=0.4, gamma=1.0)
    assert kinetic_energy(s, params) == 0.0


def test_ke_pure_gimbal_rate(params):
    s = SystemState.make(beta_dot=1.0)
    assert abs(kinetic_energy(s, params) - 0.5 * params.gimbal_axis_inertia) < 1e-15


def test_ke_left_invariant(dense_params):
    rng = np.random.default_rng(9)
    s = random_state(rng)
    ke = kinetic_energy(s, dense_params)
    for _ in range(1000):
        M = exp_so3(rng.uniform(-np.pi, np.pi) * _unit(rng))
        moved = SystemState(M @ s.R_s, s.shape, s.Omega_s)
        assert abs(kinetic_energy(moved, dense_params) - ke) < 1e-12


def _unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


# --- momentum map --------------------------------------------------------------------

def test_momentum_zero_at_rest(dense_params):
    s = SystemState.make(beta=0.7, gamma=-0.2)
    assert np.array_equal(momentum_map(s, dense_params), np.zeros(3))


def test_momentum_identity_attitude(params):
    omega = np.array([0.1, -0.2, 0.3])
    s = SystemState.make(Omega_s=omega)
    assert np.allclose(momentum_map(s, params),
                       locked_body_inertia(0.0, params) @ omega)


def test_momentum_two_body_decomposition(dense_params):
    rng = np.random.default_rng(10)
    d = np.diag(gimbal_rotor_inertia(dense_params))
    for _ in range(200):
        s = random_state(rng)
        R_beta = gimbal_rotation(s.shape.beta)
        spacecraft = s.R_s @ dense_params.I_sc @ s.Omega_s
        unit = s.R_s @ R_beta @ (d * (R_beta.T @ s.Omega_s + s.gimbal_velocity))
        assert np.abs(momentum_map(s, dense_params) - spacecraft - unit).max() < 1e-13


def test_momentum_equivariance(dense_params):
    rng = np.random.default_rng(11)
    for _ in range(100):
        s = random_state(rng)
        M = exp_so3(rng.uniform(-np.pi, np.pi) * _unit(rng))
        moved = SystemState(M @ s.R_s, s.shape, s.Omega_s)
        assert np.abs(momentum_map(moved, dense_params)
                      - M @ momentum_map(s, dense_params)).max() < 1e-13


def test_body_momentum(dense_params):
    rng = np.random.default_rng(12)
    s = random_state(rng)
    assert np.abs(body_momentum(s, dense_params)
                  - s.R_s.T @ momentum_map(s, dense_params)).max() < 1e-13
    # invariant under the left action
    M = exp_so3([0.2, 0.5, -0.7])
    moved = SystemState(M @ s.R_s, s.shape, s.Omega_s)
    assert np.abs(body_momentum(moved, dense_params)
                  - body_momentum(s, dense_params)).max() < 1e-12


def test_identity_attitude_body_momentum_equals_mu(dense_params):
    s = SystemState.make(beta=0.3, Omega_s=(0.4, -0.1, 0.9), beta_dot=0.5, gamma_dot=2.0)
    assert np.array_equal(body_momentum(s, dense_params), momentum_map(s, dense_params))


# --- locked inertia tensor --------------------------------------------------------------

def test_locked_tensor_identity_attitude(dense_params):
    s = SystemState.make(beta=1.1, Omega_s=(0, 0, 0))
    assert np.allclose(locked_inertia_tensor(s, dense_params),
                       locked_body_inertia(1.1, dense_params))


def test_locked_tensor_quadratic_form(dense_params):
    rng = np.random.default_rng(13)
    s = random_state(rng)
    for _ in range(100):
        eta = rng.standard_normal(3)
        carrier = SystemState(s.R_s, type(s.shape)(s.shape.beta, s.shape.gamma),
                              s.R_s.T @ eta)
        ke = kinetic_energy(carrier, dense_params)
        assert abs(eta @ locked_inertia_tensor(s, dense_params) @ eta - 2 * ke) < 1e-12


def test_locked_tensor_eigenvalues_attitude_independent(dense_params):
    rng = np.random.default_rng(14)
    s = random_state(rng)
    ref = np.sort(np.linalg.eigvalsh(locked_inertia_tensor(s, dense_params)))
    moved = SystemState(exp_so3([1.0, -0.3, 0.4]) @ s.R_s, s.shape, s.Omega_s)
    eigs = np.sort(np.linalg.eigvalsh(locked_inertia_tensor(moved, dense_params)))
    assert np.abs(eigs - ref).max() < 1e-10


def test_spin_axis(params):
    for beta in np.linspace(-np.pi, np.pi, 9):
        assert np.allclose(spin_axis(beta), gimbal_rotation(beta) @ [0, 0, 1])
