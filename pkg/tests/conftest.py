import numpy as np
import pytest

from gyrobundle import DynamicDriver, IntegratorConfig, simulate
from gyrobundle.model import InertiaParams, SystemState
from gyrobundle.verify import random_inertia


@pytest.fixture(scope="session")
def params():
    """Simple diagonal parameter set with distinct, hand-checkable entries."""
    return InertiaParams(Jx=1.0, Jz=4.0, It=2.0, Ig=3.0, Is_g=5.0,
                         I_sc=np.diag([10.0, 12.0, 15.0]))


@pytest.fixture(scope="session")
def dense_params():
    """Seeded random parameters with a non-diagonal spacecraft inertia."""
    return random_inertia(np.random.default_rng(2024))


@pytest.fixture(scope="session")
def kernels_ready(dense_params):
    """Trigger JIT compilation of the integration loops once, so tests that
    measure wall-clock time see only the run itself."""
    initial = SystemState.make(Omega_s=(0.1, 0.0, 0.0))
    cfg = IntegratorConfig(dt=1e-3, steps=2)
    simulate(initial, DynamicDriver(tau=lambda t: np.zeros(np.shape(t) + (2,))),
             cfg, dense_params)
    from gyrobundle import (KinematicDriver, ReconstructDriver, TrackingDriver)
    from gyrobundle._kernels import run_free_rigid
    simulate(initial, TrackingDriver(
        shape_accel=lambda t: np.zeros(np.shape(t) + (2,))), cfg, dense_params)
    simulate(initial, KinematicDriver(
        u=lambda t: np.zeros(np.shape(t) + (2,)), mu=np.zeros(3)), cfg, dense_params)
    simulate(initial, ReconstructDriver(
        shape=lambda t: np.zeros(np.shape(t) + (4,)), mu=np.zeros(3)), cfg, dense_params)
    run_free_rigid(np.eye(3), np.array([0.1, 0.2, 0.3]), np.diag([1.0, 2.0, 3.0]),
                   1e-3, 2, True)
    return True
