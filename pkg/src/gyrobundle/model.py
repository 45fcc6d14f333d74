"""Inertia assembly, kinetic-energy metric and momentum map for a spacecraft
carrying a single gimballed variable-speed flywheel.

Conventions (fixed throughout the package):
  * the gimbal axis is the second body axis i2 = (0, 1, 0);
  * the rotor spin axis is the third gimbal-frame axis i3 = (0, 0, 1);
  * R_beta = exp(beta * hat(i2)) maps gimbal-frame to body-frame components;
  * mu is the spatial (inertial-frame) angular momentum, body momentum is
    R_s^T mu.
"""

from dataclasses import dataclass, field

import numpy as np

from .liegroup import exp_so3, hat

I2 = np.array([0.0, 1.0, 0.0])
I3 = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class InertiaParams:
    """Inertia of the three bodies.

    Jx, Jz: rotor transverse and spin moments (homogeneous symmetric rotor).
    It, Ig, Is_g: gimbal-structure principal moments in the gimbal frame.
    I_sc: 3x3 spacecraft inertia, any symmetric positive-definite matrix.
    """

    Jx: float
    Jz: float
    It: float
    Ig: float
    Is_g: float
    I_sc: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        for name in ("Jx", "Jz", "It", "Ig", "Is_g"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        I_sc = np.array(self.I_sc, dtype=float)
        if I_sc.shape != (3, 3):
            raise ValueError("spacecraft inertia must be 3x3")
        if np.abs(I_sc - I_sc.T).max() > 1e-12 * max(1.0, np.abs(I_sc).max()):
            raise ValueError("spacecraft inertia not symmetric")
        if np.linalg.eigvalsh(I_sc).min() <= 0.0:
            raise ValueError("spacecraft inertia not positive definite")
        object.__setattr__(self, "I_sc", I_sc)

    @property
    def gimbal_inertia(self):
        """Transverse combined moment Jx + It (gimbal-frame axis 1)."""
        return self.Jx + self.It

    @property
    def gimbal_axis_inertia(self):
        """Gimbal-axis combined moment Jx + Ig (gimbal-frame axis 2)."""
        return self.Jx + self.Ig

    @property
    def spin_inertia(self):
        """Spin-axis combined moment Jz + Is_g (gimbal-frame axis 3)."""
        return self.Jz + self.Is_g


@dataclass(frozen=True)
class ShapeState:
    """Gimbal angle, rotor angle and their rates."""

    beta: float = 0.0
    gamma: float = 0.0
    beta_dot: float = 0.0
    gamma_dot: float = 0.0

    @property
    def rates(self):
        return np.array([self.beta_dot, self.gamma_dot])


@dataclass(frozen=True)
class SystemState:
    """Full phase of the bundle SO(3) x S1 x S1 with velocities.

    R_s: body-to-inertial attitude; Omega_s: body-frame angular velocity.
    """

    R_s: np.ndarray
    shape: ShapeState
    Omega_s: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R_s", np.array(self.R_s, dtype=float))
        object.__setattr__(self, "Omega_s", np.array(self.Omega_s, dtype=float))

    @classmethod
    def make(cls, R_s=None, beta=0.0, gamma=0.0, Omega_s=(0.0, 0.0, 0.0),
             beta_dot=0.0, gamma_dot=0.0):
        R_s = np.eye(3) if R_s is None else R_s
        return cls(R_s, ShapeState(beta, gamma, beta_dot, gamma_dot),
                   np.asarray(Omega_s, dtype=float))

    @property
    def gimbal_velocity(self):
        """The gimbal-frame relative velocity vector (0, beta_dot, gamma_dot)."""
        return np.array([0.0, self.shape.beta_dot, self.shape.gamma_dot])


def gimbal_rotor_inertia(p: InertiaParams):
    """Combined gimbal+rotor inertia in the gimbal frame, diag(Jx+It, Jx+Ig, Jz+Is_g)."""
    return np.diag([p.gimbal_inertia, p.gimbal_axis_inertia, p.spin_inertia])


def gimbal_rotation(beta: float):
    """R_beta = exp(beta * hat(i2)); gimbal frame to body frame."""
    c, s = np.cos(beta), np.sin(beta)
    return np.array([
        [c, 0.0, s],
        [0.0, 1.0, 0.0],
        [-s, 0.0, c],
    ])


def spin_axis(beta: float):
    """Rotor spin axis R_beta @ i3 in body-frame components."""
    return np.array([np.sin(beta), 0.0, np.cos(beta)])


def reflected_inertia(beta: float, p: InertiaParams):
    """Gimbal-rotor inertia reflected in the spacecraft frame: R_beta I_gr R_beta^T."""
    R_beta = gimbal_rotation(beta)
    d = np.array([p.gimbal_inertia, p.gimbal_axis_inertia, p.spin_inertia])
    return (R_beta * d) @ R_beta.T


def locked_body_inertia(beta: float, p: InertiaParams):
    """Body-frame inertia of the whole assembly locked rigid: I_sc + reflected."""
    return p.I_sc + reflected_inertia(beta, p)


def locked_inertia_dbeta(beta: float, p: InertiaParams):
    """d/dbeta of locked_body_inertia; equals R_beta U R_beta^T with the
    commutator U = hat(i2) I_gr - I_gr hat(i2)."""
    R_beta = gimbal_rotation(beta)
    return R_beta @ inertia_commutator(p) @ R_beta.T


def inertia_commutator(p: InertiaParams):
    """U = hat(i2) I_gr - I_gr hat(i2); symmetric, nonzero only at (1,3)/(3,1)."""
    u = p.spin_inertia - p.gimbal_inertia
    return np.array([
        [0.0, 0.0, u],
        [0.0, 0.0, 0.0],
        [u, 0.0, 0.0],
    ])


def metric_matrix(beta: float, p: InertiaParams):
    """5x5 kinetic-energy mass matrix over coordinates (Omega_s, beta_dot, gamma_dot).

    Blocks: locked inertia, gimbal-axis column (Jx+Ig) i2, spin column
    (Jz+Is_g) s_beta, and the diagonal shape inertias.
    """
    M = np.zeros((5, 5))
    M[:3, :3] = locked_body_inertia(beta, p)
    g_col = p.gimbal_axis_inertia * I2
    s_col = p.spin_inertia * spin_axis(beta)
    M[:3, 3] = g_col
    M[3, :3] = g_col
    M[:3, 4] = s_col
    M[4, :3] = s_col
    M[3, 3] = p.gimbal_axis_inertia
    M[4, 4] = p.spin_inertia
    return M


def metric_matrix_dbeta(beta: float, p: InertiaParams):
    """Analytic d/dbeta of metric_matrix (used for power-balance checks)."""
    dM = np.zeros((5, 5))
    dM[:3, :3] = locked_inertia_dbeta(beta, p)
    # gimbal-axis column is beta-independent; spin column rotates with beta
    ds = p.spin_inertia * np.array([np.cos(beta), 0.0, -np.sin(beta)])
    dM[:3, 4] = ds
    dM[4, :3] = ds
    return dM


def velocity_vector(s: SystemState):
    """Stacked (Omega_s, beta_dot, gamma_dot) matching metric_matrix coordinates."""
    return np.concatenate([s.Omega_s, [s.shape.beta_dot, s.shape.gamma_dot]])


def kinetic_energy(s: SystemState, p: InertiaParams):
    """Total kinetic energy of spacecraft + gimbal + rotor."""
    omega_gr = gimbal_rotation(s.shape.beta).T @ s.Omega_s + s.gimbal_velocity
    d = np.array([p.gimbal_inertia, p.gimbal_axis_inertia, p.spin_inertia])
    return 0.5 * (s.Omega_s @ p.I_sc @ s.Omega_s) + 0.5 * (omega_gr @ (d * omega_gr))


def body_momentum(s: SystemState, p: InertiaParams):
    """Body-frame total angular momentum R_s^T mu."""
    R_beta = gimbal_rotation(s.shape.beta)
    d = np.array([p.gimbal_inertia, p.gimbal_axis_inertia, p.spin_inertia])
    return locked_body_inertia(s.shape.beta, p) @ s.Omega_s + R_beta @ (d * s.gimbal_velocity)


def momentum_map(s: SystemState, p: InertiaParams):
    """Conserved spatial angular momentum mu of the torque-free system."""
    return s.R_s @ body_momentum(s, p)


def locked_inertia_tensor(s: SystemState, p: InertiaParams):
    """Spatial locked inertia R_s I_locked(beta) R_s^T."""
    return s.R_s @ locked_body_inertia(s.shape.beta, p) @ s.R_s.T
