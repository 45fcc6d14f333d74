"""Geometric simulation and verification library for a spacecraft carrying a
single variable-speed control moment gyroscope, built around the attitude
bundle SO(3) x S1 x S1 and its mechanical connection."""

from .connection import (TangentVector, holonomy, horizontal_lift,
                         local_connection_form, mechanical_connection,
                         reconstruct, split)
from .dynamics import (ControlRates, MotorTorques, SRJState, StateDerivative,
                       cmg_external_torque, control_fields, drift_field,
                       dynamic_rhs, expand_terms, kinematic_rhs,
                       required_motor_torques, srj_rhs)
from .integrators import (DynamicDriver, IntegratorConfig, KinematicDriver,
                          ReconstructDriver, TrackingDriver, Trajectory,
                          simulate, step_lie_rk4)
from .liegroup import (adjoint, exp_so3, geodesic_distance, hat, log_so3,
                       project_to_so3, vee)
from .model import (InertiaParams, ShapeState, SystemState, body_momentum,
                    gimbal_rotation, gimbal_rotor_inertia, kinetic_energy,
                    locked_body_inertia, locked_inertia_tensor, metric_matrix,
                    momentum_map, reflected_inertia)

__version__ = "0.1.0"
