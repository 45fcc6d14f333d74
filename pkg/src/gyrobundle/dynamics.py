"""Equations of motion: momentum-conserving kinematic model, torque-driven
dynamic model, gyroscope reaction-torque bookkeeping, and the cross-check
against the classical Schaub-Rao-Junkins (SRJ) wheel/gimbal equations.

The dynamic model is a 5x5 linear solve M(beta) a = b where M is the
kinetic-energy mass matrix of `model.metric_matrix` and a stacks
(Omega_dot, beta_ddot, gamma_ddot). Rows 1-3 express conservation of total
angular momentum; rows 4-5 equate the gimbal-frame axis-2 and axis-3
components of the reaction torque to the motor torques.
"""

from dataclasses import dataclass

import numpy as np

from .liegroup import hat
from .model import (
    I2,
    I3,
    InertiaParams,
    SystemState,
    gimbal_rotation,
    inertia_commutator,
    locked_body_inertia,
    metric_matrix,
)


@dataclass(frozen=True)
class ControlRates:
    """Kinematic-level inputs: commanded gimbal rate and wheel rate."""

    u_beta: float = 0.0
    u_gamma: float = 0.0


@dataclass(frozen=True)
class MotorTorques:
    """Internal motor torques on the gimbal axis and the wheel axis."""

    tau_gimbal: float = 0.0
    tau_wheel: float = 0.0


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of a SystemState.

    Omega_s here is the attitude velocity entering Rdot_s = R_s hat(Omega_s);
    the kinematic model sets it directly while the dynamic model propagates
    it through Omega_dot.
    """

    R_s: np.ndarray
    Omega_s: np.ndarray
    beta_dot: float = 0.0
    gamma_dot: float = 0.0
    Omega_dot: np.ndarray = None
    beta_ddot: float = 0.0
    gamma_ddot: float = 0.0

    def __post_init__(self):
        if self.Omega_dot is None:
            object.__setattr__(self, "Omega_dot", np.zeros(3))

    @property
    def Rdot_s(self):
        return self.R_s @ hat(self.Omega_s)


def _inertia_diag(p):
    return np.array([p.gimbal_inertia, p.gimbal_axis_inertia, p.spin_inertia])


def drift_field(s: SystemState, mu, p: InertiaParams) -> StateDerivative:
    """Momentum-level drift: attitude velocity carrying all of mu, zero shape motion."""
    I_locked = locked_body_inertia(s.shape.beta, p)
    Omega = np.linalg.solve(I_locked, s.R_s.T @ np.asarray(mu, dtype=float))
    return StateDerivative(R_s=s.R_s, Omega_s=Omega)


def control_fields(s: SystemState, p: InertiaParams):
    """Control vector fields (g_beta, g_gamma) of the kinematic model.

    Each pairs a unit shape rate with the attitude velocity that keeps the
    total momentum at zero, so their span is the horizontal distribution.
    """
    beta = s.shape.beta
    I_locked = locked_body_inertia(beta, p)
    R_beta = gimbal_rotation(beta)
    d = _inertia_diag(p)
    omega_beta = -np.linalg.solve(I_locked, R_beta @ (d * I2))
    omega_gamma = -np.linalg.solve(I_locked, R_beta @ (d * I3))
    g_beta = StateDerivative(R_s=s.R_s, Omega_s=omega_beta, beta_dot=1.0)
    g_gamma = StateDerivative(R_s=s.R_s, Omega_s=omega_gamma, gamma_dot=1.0)
    return g_beta, g_gamma


def kinematic_rhs(s: SystemState, u: ControlRates, mu, p: InertiaParams) -> StateDerivative:
    """Affine model drift + g_beta u_beta + g_gamma u_gamma.

    The attitude velocity is the unique Omega_s putting the state with shape
    rates u on the momentum level set mu.
    """
    beta = s.shape.beta
    I_locked = locked_body_inertia(beta, p)
    R_beta = gimbal_rotation(beta)
    d = _inertia_diag(p)
    rel = np.array([0.0, u.u_beta, u.u_gamma])
    Omega = np.linalg.solve(I_locked, s.R_s.T @ np.asarray(mu, dtype=float) - R_beta @ (d * rel))
    return StateDerivative(R_s=s.R_s, Omega_s=Omega,
                           beta_dot=u.u_beta, gamma_dot=u.u_gamma)


def cmg_external_torque(s: SystemState, accel, p: InertiaParams):
    """Torque on the gimbal-rotor unit from outside it, in body coordinates.

    accel = (Omega_dot, beta_ddot, gamma_ddot). Returns (u1, u2, tau_B) with
    u1, u2 in the gimbal frame and tau_B = hat(Omega_s) R_beta u1 + R_beta u2.
    u2 includes the I_gr R_beta^T Omega_dot term of the full momentum-rate
    expansion.
    """
    Omega_dot, beta_ddot, gamma_ddot = accel
    Omega_dot = np.asarray(Omega_dot, dtype=float)
    beta = s.shape.beta
    beta_dot = s.shape.beta_dot
    R_beta = gimbal_rotation(beta)
    d = _inertia_diag(p)
    rel = s.gimbal_velocity
    rel_dd = np.array([0.0, beta_ddot, gamma_ddot])

    u1 = d * (R_beta.T @ s.Omega_s + rel)
    U = inertia_commutator(p)
    u2 = (U @ (R_beta.T @ s.Omega_s)) * beta_dot \
        + np.cross(I2, d * rel) * beta_dot \
        + d * (rel_dd + R_beta.T @ Omega_dot)
    tau_B = np.cross(s.Omega_s, R_beta @ u1) + R_beta @ u2
    return u1, u2, tau_B


def _velocity_rhs(s: SystemState, p: InertiaParams):
    """Velocity-dependent part of the 5x5 dynamic system right-hand side.

    Rows 1-3: minus the momentum-rate terms not involving accelerations.
    Row 4: minus the velocity part of the gimbal-axis torque balance
    d/dt(dKE/dbeta_dot) - dKE/dbeta = tau_gimbal (equivalently the axis-2
    gimbal-frame component of the unit's reaction torque).
    Row 5: minus the velocity part of the wheel torque balance
    J_spin (s . Omega_dot + gamma_ddot + beta_dot omega_t) = tau_wheel, the
    spin component of the rotor momentum rate. The axis-3 component of the
    full unit's reaction torque additionally carries gyroscopic torque
    through the gimbal bearing and is NOT the wheel motor torque; using it
    would break the power balance.
    """
    beta = s.shape.beta
    beta_dot = s.shape.beta_dot
    R_beta = gimbal_rotation(beta)
    d = _inertia_diag(p)
    rel = s.gimbal_velocity
    U = inertia_commutator(p)

    I_locked = locked_body_inertia(beta, p)
    p_body = I_locked @ s.Omega_s + R_beta @ (d * rel)

    b = np.zeros(5)
    b[:3] = -np.cross(s.Omega_s, p_body) \
        - beta_dot * (R_beta @ (U @ (R_beta.T @ s.Omega_s))) \
        - beta_dot * (R_beta @ np.cross(I2, d * rel))

    u1 = d * (R_beta.T @ s.Omega_s + rel)
    omega_gimbal = R_beta.T @ s.Omega_s
    b[3] = -u1 @ np.cross(I2, omega_gimbal)
    b[4] = -d[2] * beta_dot * omega_gimbal[0]
    return b


def dynamic_mass_matrix(beta: float, p: InertiaParams):
    """System matrix of the dynamic model, assembled from the momentum and
    reaction-torque expressions (not from metric_matrix; their equality is a
    verified identity)."""
    R_beta = gimbal_rotation(beta)
    d = _inertia_diag(p)
    M = np.zeros((5, 5))
    # rows 1-3: I_locked Omega_dot + R_beta I_gr (0, bdd, gdd)
    M[:3, :3] = locked_body_inertia(beta, p)
    M[:3, 3] = R_beta @ (d * I2)
    M[:3, 4] = R_beta @ (d * I3)
    # rows 4-5: components 2,3 of I_gr (R_beta^T Omega_dot + (0, bdd, gdd))
    M[3, :3] = d[1] * R_beta.T[1]
    M[4, :3] = d[2] * R_beta.T[2]
    M[3, 3] = d[1]
    M[4, 4] = d[2]
    return M


def dynamic_rhs(s: SystemState, tau: MotorTorques, p: InertiaParams) -> StateDerivative:
    """Accelerations under motor torques: solves M(beta) a = b for
    (Omega_dot, beta_ddot, gamma_ddot)."""
    M = dynamic_mass_matrix(s.shape.beta, p)
    if np.linalg.eigvalsh(0.5 * (M + M.T)).min() <= 0.0:
        raise ValueError("dynamic system matrix not positive definite")
    b = _velocity_rhs(s, p)
    b[3] += tau.tau_gimbal
    b[4] += tau.tau_wheel
    a = np.linalg.solve(M, b)
    return StateDerivative(R_s=s.R_s, Omega_s=s.Omega_s,
                           beta_dot=s.shape.beta_dot, gamma_dot=s.shape.gamma_dot,
                           Omega_dot=a[:3], beta_ddot=a[3], gamma_ddot=a[4])


def required_motor_torques(s: SystemState, xddot, p: InertiaParams):
    """Motor torques realizing prescribed shape accelerations (beta_ddot, gamma_ddot).

    Inverse of dynamic_rhs in the actuation channel: rows 1-3 determine
    Omega_dot, rows 4-5 then read off the torques. Returns (MotorTorques, Omega_dot).
    """
    beta_ddot, gamma_ddot = xddot
    M = dynamic_mass_matrix(s.shape.beta, p)
    b = _velocity_rhs(s, p)
    Omega_dot = np.linalg.solve(M[:3, :3], b[:3] - M[:3, 3] * beta_ddot - M[:3, 4] * gamma_ddot)
    a = np.concatenate([Omega_dot, [beta_ddot, gamma_ddot]])
    tau_gimbal = M[3] @ a - b[3]
    tau_wheel = M[4] @ a - b[4]
    return MotorTorques(tau_gimbal, tau_wheel), Omega_dot


def momentum_rate(s: SystemState, deriv: StateDerivative, p: InertiaParams):
    """Analytic d(mu)/dt along a state derivative; zero for any motor torques."""
    beta = s.shape.beta
    R_beta = gimbal_rotation(beta)
    d = _inertia_diag(p)
    rel = s.gimbal_velocity
    rel_dd = np.array([0.0, deriv.beta_ddot, deriv.gamma_ddot])
    U = inertia_commutator(p)
    I_locked = locked_body_inertia(beta, p)
    p_body = I_locked @ s.Omega_s + R_beta @ (d * rel)
    pdot_body = s.shape.beta_dot * (R_beta @ (U @ (R_beta.T @ s.Omega_s))) \
        + I_locked @ deriv.Omega_dot \
        + s.shape.beta_dot * (R_beta @ np.cross(I2, d * rel)) \
        + R_beta @ (d * rel_dd)
    return s.R_s @ (np.cross(deriv.Omega_s, p_body) + pdot_body)


def energy_rate(s: SystemState, deriv: StateDerivative, p: InertiaParams):
    """Analytic d(KE)/dt along a state derivative (chain rule through beta)."""
    from .model import metric_matrix_dbeta, velocity_vector

    v = velocity_vector(s)
    a = np.concatenate([deriv.Omega_dot, [deriv.beta_ddot, deriv.gamma_ddot]])
    M = metric_matrix(s.shape.beta, p)
    dM = metric_matrix_dbeta(s.shape.beta, p)
    return v @ M @ a + 0.5 * s.shape.beta_dot * (v @ dM @ v)


# --- Schaub-Rao-Junkins comparison -----------------------------------------

@dataclass(frozen=True)
class SRJState:
    """Gimbal-frame quantities in SRJ notation.

    Frame convention: R_beta columns are (g_t, g_g, g_s), so the gimbal-frame
    components of Omega_s are (omega_t, omega_g, omega_s). SRJ's gimbal angle
    is our beta and SRJ's wheel speed is our gamma_dot.
    """

    omega_s: float
    omega_t: float
    omega_g: float
    gamma_srj: float
    Omega_srj: float

    @classmethod
    def from_state(cls, s: SystemState):
        w = gimbal_rotation(s.shape.beta).T @ s.Omega_s
        return cls(omega_s=w[2], omega_t=w[0], omega_g=w[1],
                   gamma_srj=s.shape.beta, Omega_srj=s.shape.gamma_dot)


def geometric_rhs(s: SystemState, xddot, p: InertiaParams):
    """RHS of I_locked Omega_dot + Omega x (I_locked Omega) = ... in the
    body-frame matrix form of the geometric model."""
    beta_ddot, gamma_ddot = xddot
    beta = s.shape.beta
    beta_dot = s.shape.beta_dot
    R_beta = gimbal_rotation(beta)
    d = _inertia_diag(p)
    rel = s.gimbal_velocity
    rel_dd = np.array([0.0, beta_ddot, gamma_ddot])
    U = inertia_commutator(p)
    return -np.cross(s.Omega_s, R_beta @ (d * rel)) \
        - beta_dot * (R_beta @ (U @ (R_beta.T @ s.Omega_s))) \
        - beta_dot * (R_beta @ np.cross(I2, d * rel)) \
        - R_beta @ (d * rel_dd)


def srj_rhs(s: SystemState, xddot, p: InertiaParams):
    """SRJ equation-of-motion RHS evaluated literally in the spin/transverse/
    gimbal axis basis; equals geometric_rhs for all states."""
    beta_ddot, gamma_ddot = xddot
    beta_dot = s.shape.beta_dot
    gamma_dot = s.shape.gamma_dot
    R_beta = gimbal_rotation(s.shape.beta)
    g_t, g_g, g_s = R_beta[:, 0], R_beta[:, 1], R_beta[:, 2]
    w = SRJState.from_state(s)
    J_s, J_t, J_g = p.spin_inertia, p.gimbal_inertia, p.gimbal_axis_inertia
    return (
        -g_s * (J_s * (gamma_ddot + beta_dot * w.omega_t) - (J_t - J_g) * w.omega_t * beta_dot)
        - g_t * (J_s * (gamma_dot + w.omega_s) * beta_dot - (J_t + J_g) * w.omega_s * beta_dot
                 + J_s * gamma_dot * w.omega_g)
        - g_g * (J_g * beta_ddot - J_s * gamma_dot * w.omega_t)
    )


def expand_terms(s: SystemState, p: InertiaParams, xddot=(0.0, 0.0)):
    """The five term-by-term expansion identities relating the body-frame
    matrix model to the spin/transverse/gimbal basis form.

    Returns a list of (label, matrix_form, basis_form, residual) rows.
    """
    beta_ddot, gamma_ddot = xddot
    beta_dot = s.shape.beta_dot
    gamma_dot = s.shape.gamma_dot
    R_beta = gimbal_rotation(s.shape.beta)
    g_t, g_g, g_s = R_beta[:, 0], R_beta[:, 1], R_beta[:, 2]
    d = _inertia_diag(p)
    J_s, J_t, J_g = p.spin_inertia, p.gimbal_inertia, p.gimbal_axis_inertia
    w = SRJState.from_state(s)
    rel = s.gimbal_velocity
    rel_dd = np.array([0.0, beta_ddot, gamma_ddot])
    U = inertia_commutator(p)

    rows = []

    def add(label, lhs, rhs):
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        rows.append((label, lhs, rhs, float(np.abs(lhs - rhs).max())))

    add("R_b I_gr xddot",
        R_beta @ (d * rel_dd),
        g_g * J_g * beta_ddot + g_s * J_s * gamma_ddot)
    add("R_b hat(i2) bdot I_gr xdot",
        beta_dot * (R_beta @ np.cross(I2, d * rel)),
        g_t * J_s * gamma_dot * beta_dot)
    add("hat(Omega) R_b I_gr xdot",
        np.cross(s.Omega_s, R_beta @ (d * rel)),
        g_s * (J_g * beta_dot * w.omega_t) + g_g * (-J_s * gamma_dot * w.omega_t)
        + g_t * (-J_g * beta_dot * w.omega_s + J_s * gamma_dot * w.omega_g))
    add("commutator hat(i2) I_gr - I_gr hat(i2)",
        U,
        np.array([[0.0, 0.0, J_s - J_t],
                  [0.0, 0.0, 0.0],
                  [J_s - J_t, 0.0, 0.0]]))
    add("R_b U R_b^T Omega bdot",
        beta_dot * (R_beta @ (U @ (R_beta.T @ s.Omega_s))),
        (g_t * w.omega_s + g_s * w.omega_t) * (J_s - J_t) * beta_dot)
    return rows
