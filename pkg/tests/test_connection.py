import numpy as np
import pytest

from gyrobundle.connection import (TangentVector, holonomy, horizontal_lift,
                                   local_connection_form, mechanical_connection,
                                   reconstruct, reconstruction_velocity, split)
from gyrobundle.liegroup import exp_so3, log_so3
from gyrobundle.model import (ShapeState, SystemState, locked_body_inertia,
                              locked_inertia_dbeta, metric_matrix, momentum_map,
                              spin_axis)
from gyrobundle.verify import random_inertia, random_state
from helpers import smoothstep, smoothstep_d, square_loop


def _unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


# --- mechanical connection -----------------------------------------------------

def test_connection_returns_generator(dense_params):
    rng = np.random.default_rng(0)
    for _ in range(200):
        s = random_state(rng)
        xi = rng.standard_normal(3)
        gen = TangentVector(s.R_s.T @ xi)  # generator of xi at (R_s, x)
        alpha = mechanical_connection(s, gen, dense_params)
        assert np.abs(alpha - xi).max() < 1e-12


def test_connection_kills_horizontal(dense_params):
    rng = np.random.default_rng(1)
    for _ in range(100):
        s = random_state(rng)
        lift = horizontal_lift(s.shape.beta, rng.standard_normal(2), dense_params)
        assert np.abs(mechanical_connection(s, lift, dense_params)).max() < 1e-12


def test_connection_definition_oracle(dense_params):
    rng = np.random.default_rng(2)
    from gyrobundle.model import locked_inertia_tensor
    for _ in range(100):
        s = random_state(rng)
        v = TangentVector(rng.standard_normal(3), *rng.standard_normal(2))
        alpha = mechanical_connection(s, v, dense_params)
        carrier = SystemState(s.R_s, ShapeState(s.shape.beta, s.shape.gamma,
                                                v.beta_dot, v.gamma_dot),
                              v.omega_local)
        mu = momentum_map(carrier, dense_params)
        assert np.abs(locked_inertia_tensor(s, dense_params) @ alpha - mu).max() < 1e-12


def test_connection_equivariance(dense_params):
    """Under the left action the connection value rotates as a spatial vector."""
    rng = np.random.default_rng(3)
    for _ in range(100):
        s = random_state(rng)
        v = TangentVector(rng.standard_normal(3), *rng.standard_normal(2))
        M = exp_so3(rng.uniform(-np.pi, np.pi) * _unit(rng))
        moved = SystemState(M @ s.R_s, s.shape, s.Omega_s)
        lhs = mechanical_connection(moved, v, dense_params)
        rhs = M @ mechanical_connection(s, v, dense_params)
        assert np.abs(lhs - rhs).max() < 1e-12


# --- local form ----------------------------------------------------------------

def test_local_form_identity_block(dense_params):
    A = local_connection_form(0.7, dense_params)
    assert np.array_equal(A[:, :3], np.eye(3))
    v = np.array([1.0, -2.0, 0.5, 0.0, 0.0])
    assert np.allclose(A @ v, v[:3])


def test_local_form_annihilates_lift(dense_params):
    rng = np.random.default_rng(4)
    for _ in range(100):
        beta = rng.uniform(-np.pi, np.pi)
        lift = horizontal_lift(beta, rng.standard_normal(2), dense_params)
        A = local_connection_form(beta, dense_params)
        assert np.abs(A @ lift.coords).max() < 1e-13


def test_local_form_matches_mechanical_at_identity(dense_params):
    rng = np.random.default_rng(5)
    for _ in range(100):
        beta, gamma = rng.uniform(-np.pi, np.pi, 2)
        v = TangentVector(rng.standard_normal(3), *rng.standard_normal(2))
        s = SystemState.make(beta=beta, gamma=gamma)
        A = local_connection_form(beta, dense_params)
        assert np.abs(A @ v.coords
                      - mechanical_connection(s, v, dense_params)).max() < 1e-12


def test_local_form_smooth_in_beta(dense_params):
    """Finite-difference dA/dbeta matches the analytic derivative built from
    d(I_locked^-1)/dbeta = -I^-1 I' I^-1."""
    h = 1e-6
    J_g = dense_params.gimbal_axis_inertia
    J_s = dense_params.spin_inertia
    for beta in (0.2, -1.4, 2.8):
        fd = (local_connection_form(beta + h, dense_params)
              - local_connection_form(beta - h, dense_params)) / (2 * h)
        Il = locked_body_inertia(beta, dense_params)
        dIl = locked_inertia_dbeta(beta, dense_params)
        C = np.column_stack([J_g * np.array([0, 1, 0]), J_s * spin_axis(beta)])
        dC = np.column_stack([np.zeros(3),
                              J_s * np.array([np.cos(beta), 0, -np.sin(beta)])])
        Il_inv = np.linalg.inv(Il)
        dA = np.zeros((3, 5))
        dA[:, 3:] = -Il_inv @ dIl @ Il_inv @ C + Il_inv @ dC
        assert np.abs(fd - dA).max() < 1e-5


# --- split / lift ----------------------------------------------------------------

def test_split_vertical_input(dense_params):
    rng = np.random.default_rng(6)
    s = random_state(rng)
    v = TangentVector(rng.standard_normal(3))
    vert, horiz = split(s, v, dense_params)
    assert np.abs(vert.omega_local - v.omega_local).max() == 0.0
    assert np.abs(horiz.coords).max() == 0.0


def test_split_horizontal_input(dense_params):
    rng = np.random.default_rng(7)
    s = random_state(rng)
    v = horizontal_lift(s.shape.beta, rng.standard_normal(2), dense_params)
    vert, horiz = split(s, v, dense_params)
    assert np.abs(vert.coords).max() < 1e-15
    assert np.abs(horiz.coords - v.coords).max() == 0.0


def test_split_orthogonal_and_sums(dense_params):
    rng = np.random.default_rng(8)
    for _ in range(200):
        s = random_state(rng)
        v = TangentVector(rng.standard_normal(3), *rng.standard_normal(2))
        vert, horiz = split(s, v, dense_params)
        assert np.abs(vert.coords + horiz.coords - v.coords).max() < 1e-14
        M = metric_matrix(s.shape.beta, dense_params)
        assert abs(vert.coords @ M @ horiz.coords) < 1e-12


def test_split_idempotent(dense_params):
    rng = np.random.default_rng(9)
    s = random_state(rng)
    v = TangentVector(rng.standard_normal(3), *rng.standard_normal(2))
    vert, _ = split(s, v, dense_params)
    vert2, horiz2 = split(s, vert, dense_params)
    assert np.abs(vert2.coords - vert.coords).max() == 0.0
    assert np.abs(horiz2.coords).max() == 0.0


def test_lift_zero_rates(dense_params):
    lift = horizontal_lift(0.3, (0.0, 0.0), dense_params)
    assert np.abs(lift.coords).max() == 0.0


def test_lift_zero_momentum(dense_params):
    rng = np.random.default_rng(10)
    for _ in range(1000):
        beta = rng.uniform(-np.pi, np.pi)
        rates = rng.standard_normal(2)
        lift = horizontal_lift(beta, rates, dense_params)
        carrier = SystemState.make(beta=beta, Omega_s=lift.omega_local,
                                   beta_dot=rates[0], gamma_dot=rates[1])
        assert np.abs(momentum_map(carrier, dense_params)).max() < 1e-12


def test_lifts_linearly_independent(dense_params):
    a = horizontal_lift(0.5, (1.0, 0.0), dense_params)
    b = horizontal_lift(0.5, (0.0, 1.0), dense_params)
    stacked = np.array([a.coords, b.coords])
    assert np.linalg.matrix_rank(stacked) == 2


# --- reconstruction ----------------------------------------------------------------

def _constant_path(beta, gamma, t_end, n):
    t = np.linspace(0.0, t_end, n)
    ones = np.ones_like(t)
    return (t, beta * ones, gamma * ones, 0.0 * ones, 0.0 * ones)


def test_reconstruct_constant_shape_zero_momentum(dense_params, kernels_ready):
    R0 = exp_so3([0.2, -0.1, 0.4])
    Rs = reconstruct(_constant_path(0.7, 1.0, 1.0, 101), np.zeros(3), R0,
                     dense_params)
    assert np.abs(Rs - R0).max() < 1e-14


def test_reconstruct_constant_shape_axis_momentum(params, kernels_ready):
    # diagonal locked inertia at beta=0; mu along the first axis spins the
    # body uniformly about that spatial axis at rate |mu| / I_axis
    I_axis = locked_body_inertia(0.0, params)[0, 0]
    mu = np.array([2.0, 0.0, 0.0])
    t_end = 1.5
    Rs = reconstruct(_constant_path(0.0, 0.0, t_end, 301), mu, np.eye(3), params)
    expected = exp_so3([mu[0] / I_axis * t_end, 0.0, 0.0])
    assert np.abs(Rs[-1] - expected).max() < 1e-10


def test_reconstruct_rejects_nonuniform(dense_params):
    t = np.array([0.0, 0.1, 0.3])
    z = np.zeros(3)
    with pytest.raises(ValueError, match="uniform"):
        reconstruct((t, z, z, z, z), np.zeros(3), np.eye(3), dense_params)


def test_reconstruct_rejects_short_path(dense_params):
    one = np.zeros(1)
    with pytest.raises(ValueError, match="two samples"):
        reconstruct((one, one, one, one, one), np.zeros(3), np.eye(3), dense_params)


def test_reconstruction_velocity_matches_kinematic(dense_params):
    from gyrobundle.dynamics import ControlRates, kinematic_rhs
    rng = np.random.default_rng(11)
    s = random_state(rng)
    mu = rng.standard_normal(3)
    rates = rng.standard_normal(2)
    omega = reconstruction_velocity(s.R_s, s.shape.beta, rates, mu, dense_params)
    d = kinematic_rhs(s, ControlRates(*rates), mu, dense_params)
    assert np.abs(omega - d.Omega_s).max() < 1e-14


# --- holonomy -------------------------------------------------------------------------

def test_holonomy_zero_area_loop(dense_params, kernels_ready):
    # back-and-forth in beta only: no enclosed shape-space area
    t = np.linspace(0.0, 2.0, 2001)
    u = np.where(t <= 1.0, t, 2.0 - t)
    du = np.where(t <= 1.0, 1.0, -1.0)
    beta = 0.4 * smoothstep(np.clip(u, 0, 1))
    beta_dot = 0.4 * smoothstep_d(np.clip(u, 0, 1)) * du
    zeros = np.zeros_like(t)
    h = holonomy((t, beta, zeros, beta_dot, zeros), dense_params)
    assert np.linalg.norm(h) < 1e-9


def test_holonomy_double_loop_composes(dense_params, kernels_ready):
    loop1 = square_loop(0.4, 2.0, 200)
    t1, b, g, bd, gd = loop1
    t2 = np.concatenate([t1, t1[1:] + 4.0])
    loop2 = (t2, np.concatenate([b, b[1:]]), np.concatenate([g, g[1:]]),
             np.concatenate([bd, bd[1:]]), np.concatenate([gd, gd[1:]]))
    h1 = holonomy(loop1, dense_params)
    h2 = holonomy(loop2, dense_params)
    R1 = exp_so3(h1)
    assert np.abs(exp_so3(h2) - R1 @ R1).max() < 1e-9


def test_holonomy_reversed_loop_inverts(dense_params, kernels_ready):
    loop = square_loop(0.4, 2.0, 200)
    t, b, g, bd, gd = loop
    rev = (t, b[::-1].copy(), g[::-1].copy(), -bd[::-1], -gd[::-1])
    h = holonomy(loop, dense_params)
    h_rev = holonomy(rev, dense_params)
    assert np.abs(exp_so3(h_rev) - exp_so3(h).T).max() < 1e-9


def test_holonomy_rejects_open_path(dense_params):
    t = np.linspace(0.0, 1.0, 11)
    with pytest.raises(ValueError, match="closed"):
        holonomy((t, t, 0 * t, np.ones_like(t), 0 * t), dense_params)
