"""Seeded property/oracle suite behind the `gyrobundle verify` and
`gyrobundle compare-srj` commands. Each check draws random states, evaluates
an analytic identity both ways and reports the worst residual."""

from dataclasses import dataclass

import numpy as np

from .connection import (TangentVector, horizontal_lift, local_connection_form,
                         mechanical_connection, split)
from .dynamics import (MotorTorques, dynamic_mass_matrix, dynamic_rhs,
                       energy_rate, expand_terms, geometric_rhs, momentum_rate,
                       srj_rhs)
from .liegroup import exp_so3
from .model import (InertiaParams, ShapeState, SystemState, metric_matrix,
                    momentum_map)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    threshold: float

    @property
    def passed(self):
        return self.residual < self.threshold


def random_inertia(rng) -> InertiaParams:
    """Random SPD spacecraft inertia (eigenvalues in [5, 20]) and scalar
    inertias in [0.1, 2]."""
    Q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    I_sc = Q @ np.diag(rng.uniform(5.0, 20.0, 3)) @ Q.T
    I_sc = 0.5 * (I_sc + I_sc.T)
    Jx, Jz, It, Ig, Is_g = rng.uniform(0.1, 2.0, 5)
    return InertiaParams(Jx=Jx, Jz=Jz, It=It, Ig=Ig, Is_g=Is_g, I_sc=I_sc)


def random_state(rng) -> SystemState:
    R = exp_so3(rng.uniform(-np.pi, np.pi) * _unit(rng))
    omega = rng.standard_normal(3)
    beta, gamma = rng.uniform(-np.pi, np.pi, 2)
    beta_dot, gamma_dot = rng.standard_normal(2)
    return SystemState(R, ShapeState(beta, gamma, beta_dot, gamma_dot), omega)


def _unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def srj_comparison(p: InertiaParams, seed=0, trials=10000, term_trials=1000):
    """Max residual between the geometric-model RHS and the SRJ-form RHS over
    `trials` seeded random states, plus per-term expansion residuals over the
    first `term_trials` of them."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    term_worst = {}
    for k in range(trials):
        s = random_state(rng)
        xddot = tuple(rng.standard_normal(2))
        res = np.abs(geometric_rhs(s, xddot, p) - srj_rhs(s, xddot, p)).max()
        worst = max(worst, float(res))
        if k < term_trials:
            for label, _, _, r in expand_terms(s, p, xddot):
                term_worst[label] = max(term_worst.get(label, 0.0), r)
    return {"srj_residual_max": worst, "term_residuals": term_worst}


def connection_checks(p: InertiaParams, seed=0, trials=1000):
    rng = np.random.default_rng(seed)
    axiom1 = horiz_mu = ortho = local_vs_mech = 0.0
    for _ in range(trials):
        s = random_state(rng)
        beta = s.shape.beta

        xi = rng.standard_normal(3)
        gen = TangentVector(s.R_s.T @ xi)
        axiom1 = max(axiom1, float(np.abs(mechanical_connection(s, gen, p) - xi).max()))

        lift = horizontal_lift(beta, rng.standard_normal(2), p)
        carrier = SystemState(s.R_s, ShapeState(beta, s.shape.gamma,
                                                lift.beta_dot, lift.gamma_dot),
                              lift.omega_local)
        horiz_mu = max(horiz_mu, float(np.abs(momentum_map(carrier, p)).max()))

        v = TangentVector(rng.standard_normal(3), *rng.standard_normal(2))
        vert, horiz = split(s, v, p)
        M = metric_matrix(beta, p)
        ortho = max(ortho, abs(float(vert.coords @ M @ horiz.coords)))

        A = local_connection_form(beta, p)
        at_identity = SystemState(np.eye(3), s.shape, s.Omega_s)
        local_vs_mech = max(local_vs_mech, float(np.abs(
            A @ v.coords - mechanical_connection(at_identity, v, p)).max()))
    return {
        "axiom1_residual": axiom1,
        "horizontal_momentum": horiz_mu,
        "split_orthogonality": ortho,
        "local_vs_mechanical": local_vs_mech,
    }


def conservation_checks(p: InertiaParams, seed=0, trials=200):
    """Pointwise analytic conservation/power residuals of the dynamic model."""
    rng = np.random.default_rng(seed)
    mu_rate = power = mass = 0.0
    for _ in range(trials):
        s = random_state(rng)
        tau = MotorTorques(*rng.standard_normal(2))
        d = dynamic_rhs(s, tau, p)
        mu_rate = max(mu_rate, float(np.abs(momentum_rate(s, d, p)).max()))
        supplied = tau.tau_gimbal * s.shape.beta_dot + tau.tau_wheel * s.shape.gamma_dot
        power = max(power, abs(energy_rate(s, d, p) - supplied))
        mass = max(mass, float(np.abs(dynamic_mass_matrix(s.shape.beta, p)
                                      - metric_matrix(s.shape.beta, p)).max()))
    return {"momentum_rate": mu_rate, "power_balance": power,
            "mass_matrix_identification": mass}


def run_all(p: InertiaParams, seed=0, trials=10000):
    """Full check table used by the verify mode."""
    checks = []
    srj = srj_comparison(p, seed=seed, trials=min(trials, 10000))
    checks.append(CheckResult("srj_residual_max", srj["srj_residual_max"], 1e-10))
    for label, res in srj["term_residuals"].items():
        checks.append(CheckResult(f"term[{label}]", res, 1e-13))
    conn = connection_checks(p, seed=seed, trials=min(trials, 1000))
    for name, res in conn.items():
        checks.append(CheckResult(name, res, 1e-12))
    cons = conservation_checks(p, seed=seed, trials=min(trials, 200))
    checks.append(CheckResult("momentum_rate", cons["momentum_rate"], 1e-12))
    checks.append(CheckResult("power_balance", cons["power_balance"], 1e-10))
    checks.append(CheckResult("mass_matrix_identification",
                              cons["mass_matrix_identification"], 1e-13))
    return checks
