"""Mechanical connection of the attitude bundle: vertical/horizontal splitting,
the explicit 3x5 local connection form, horizontal lifts, and reconstruction
of the attitude trajectory from a shape trajectory.

Connection values are spatial angular-velocity vectors (compatible with the
left action M . (R_s, x) = (M R_s, x)); the local form acts on left-trivialized
(body-frame) velocities and is extended by equivariance:
alpha(q, v) = R_s @ A(beta) @ (omega_local, beta_dot, gamma_dot).
"""

from dataclasses import dataclass

import numpy as np

from .liegroup import log_so3
from .model import (
    I2,
    InertiaParams,
    ShapeState,
    SystemState,
    gimbal_rotation,
    locked_body_inertia,
    metric_matrix,
    momentum_map,
    spin_axis,
)


@dataclass(frozen=True)
class TangentVector:
    """Left-trivialized tangent vector: body attitude velocity plus shape rates."""

    omega_local: np.ndarray
    beta_dot: float = 0.0
    gamma_dot: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "omega_local",
                           np.array(self.omega_local, dtype=float))

    @property
    def coords(self):
        return np.concatenate([self.omega_local, [self.beta_dot, self.gamma_dot]])


def _coupling(beta, p):
    """3x2 matrix [(Jx+Ig) g, (Jz+Is_g) s_beta] coupling shape rates to momentum."""
    return np.column_stack([p.gimbal_axis_inertia * I2,
                            p.spin_inertia * spin_axis(beta)])


def _carrying_state(s: SystemState, v: TangentVector):
    return SystemState(s.R_s,
                       ShapeState(s.shape.beta, s.shape.gamma, v.beta_dot, v.gamma_dot),
                       v.omega_local)


def mechanical_connection(s: SystemState, v: TangentVector, p: InertiaParams):
    """alpha(q, v) = locked_inertia(q)^{-1} momentum(q, v), a spatial vector.

    Returns xi exactly when v is the infinitesimal generator of xi, and zero
    exactly when v is horizontal (zero momentum).
    """
    mu = momentum_map(_carrying_state(s, v), p)
    I_locked = locked_body_inertia(s.shape.beta, p)
    # spatial locked inertia is R I_locked R^T; solve without forming it
    return s.R_s @ np.linalg.solve(I_locked, s.R_s.T @ mu)


def local_connection_form(beta: float, p: InertiaParams):
    """3x5 local connection form A(beta) = [Id3 | I_locked^{-1} C(beta)].

    A annihilates horizontal vectors and restores omega_local on vertical ones.
    """
    I_locked = locked_body_inertia(beta, p)
    A = np.zeros((3, 5))
    A[:, :3] = np.eye(3)
    A[:, 3:] = np.linalg.solve(I_locked, _coupling(beta, p))
    return A


def horizontal_lift(beta: float, rates, p: InertiaParams) -> TangentVector:
    """The unique zero-momentum attitude velocity accompanying given shape rates."""
    beta_dot, gamma_dot = rates
    I_locked = locked_body_inertia(beta, p)
    omega = -np.linalg.solve(I_locked, _coupling(beta, p) @ np.array([beta_dot, gamma_dot]))
    return TangentVector(omega, float(beta_dot), float(gamma_dot))


def split(s: SystemState, v: TangentVector, p: InertiaParams):
    """Metric-orthogonal decomposition v = vertical + horizontal.

    The vertical part carries all the momentum with zero shape motion; the
    horizontal part carries the shape rates at zero momentum.
    """
    horizontal = horizontal_lift(s.shape.beta, (v.beta_dot, v.gamma_dot), p)
    vertical = TangentVector(v.omega_local - horizontal.omega_local)
    return vertical, horizontal


def reconstruction_velocity(R, beta, rates, mu, p: InertiaParams):
    """Body attitude velocity along the momentum-mu lift of a shape motion:
    I_locked^{-1} (R^T mu) plus the horizontal-lift velocity."""
    I_locked = locked_body_inertia(beta, p)
    rhs = np.asarray(R).T @ np.asarray(mu, dtype=float) \
        - _coupling(beta, p) @ np.asarray(rates, dtype=float)
    return np.linalg.solve(I_locked, rhs)


def reconstruct(shape_path, mu, R0, p: InertiaParams):
    """Integrate the attitude along a sampled shape path at fixed momentum.

    shape_path: (times, beta, gamma, beta_dot, gamma_dot) arrays with uniform
    spacing. Returns the (N, 3, 3) attitude trajectory; uses the same
    Lie-group RK4 as the simulator, with cubic interpolation of the samples.
    """
    from .integrators import (IntegratorConfig, ReconstructDriver,
                              interpolate_schedule, simulate)

    times, beta, gamma, beta_dot, gamma_dot = (np.asarray(a, dtype=float)
                                               for a in shape_path)
    if len(times) < 2:
        raise ValueError("shape path needs at least two samples")
    dts = np.diff(times)
    if np.abs(dts - dts[0]).max() > 1e-9 * max(dts[0], 1.0):
        raise ValueError("shape path must be uniformly sampled")

    sched = interpolate_schedule(times, np.column_stack([beta, gamma, beta_dot, gamma_dot]))
    driver = ReconstructDriver(shape=lambda t: tuple(sched(t)),
                               mu=np.asarray(mu, dtype=float))
    initial = SystemState.make(R_s=R0, beta=beta[0], gamma=gamma[0],
                               beta_dot=beta_dot[0], gamma_dot=gamma_dot[0])
    cfg = IntegratorConfig(dt=float(dts[0]), steps=len(times) - 1)
    traj = simulate(initial, driver, cfg, p)
    return np.array([s.R_s for s in traj.states])


def holonomy(loop, p: InertiaParams):
    """Net rotation vector log(R0^T R_end) of the zero-momentum lift of a
    closed shape loop (the geometric phase)."""
    times, beta, gamma, beta_dot, gamma_dot = (np.asarray(a, dtype=float)
                                               for a in loop)
    if abs(beta[-1] - beta[0]) > 1e-12 or abs(gamma[-1] - gamma[0]) > 1e-12:
        raise ValueError("shape loop is not closed")
    Rs = reconstruct(loop, np.zeros(3), np.eye(3), p)
    return log_so3(Rs[0].T @ Rs[-1])
