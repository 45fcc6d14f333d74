"""Scenario files: parse/serialize the flat key-value config format, run a
scenario, and write the trajectory CSV plus a diagnostic report.

Config format: `[section]` headers with `key = value` lines; 3x3 matrices are
nine row-major comma-separated numbers; the [schedule] section holds bare
comma-separated sample rows whose columns depend on the mode. `#` starts a
comment.
"""

import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import verify as verify_mod
from .connection import holonomy
from .integrators import (DynamicDriver, IntegratorConfig, KinematicDriver,
                          ReconstructDriver, interpolate_schedule, simulate)
from .liegroup import project_to_so3, rotation_error
from .model import InertiaParams, SystemState, momentum_map

MODES = ("dynamic", "kinematic", "reconstruct", "compare_srj", "verify")

SCHEDULE_COLUMNS = {
    "dynamic": ("t", "tau_gimbal", "tau_wheel"),
    "kinematic": ("t", "u_beta", "u_gamma"),
    "reconstruct": ("t", "beta", "gamma", "beta_dot", "gamma_dot"),
}

DEFAULT_THRESHOLDS = {
    "mu_drift_rel": 1e-8,
    "ke_drift_rel": 1e-8,
    "ortho_err_max": 1e-10,
    "srj_residual_max": 1e-10,
    "connection_residual_max": 1e-12,
    "reconstruct_mismatch": 1e-6,
}

CSV_HEADER = ("t,R11,R12,R13,R21,R22,R23,R31,R32,R33,beta,gamma,"
              "Omega1,Omega2,Omega3,beta_dot,gamma_dot,mu1,mu2,mu3,ke,ortho_err")


class ScenarioError(ValueError):
    """Config-file validation failure; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class Scenario:
    mode: str
    params: InertiaParams
    initial: SystemState
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    schedule: Optional[np.ndarray] = None  # sample rows, columns per mode
    seed: int = 0
    trials: int = 10000
    thresholds: dict = field(default_factory=dict)

    def threshold(self, name):
        return self.thresholds.get(name, DEFAULT_THRESHOLDS[name])


@dataclass
class DiagnosticReport:
    mu_drift_rel: float = 0.0
    ke_drift_rel: float = 0.0
    ortho_err_max: float = 0.0
    srj_residual_max: Optional[float] = None
    connection_axiom_residuals: Optional[dict] = None
    holonomy_vector: Optional[np.ndarray] = None
    passed: bool = True

    def lines(self):
        out = [f"mu_drift_rel = {self.mu_drift_rel:.17g}",
               f"ke_drift_rel = {self.ke_drift_rel:.17g}",
               f"ortho_err_max = {self.ortho_err_max:.17g}"]
        if self.srj_residual_max is not None:
            out.append(f"srj_residual_max = {self.srj_residual_max:.17g}")
        if self.connection_axiom_residuals:
            for k, v in self.connection_axiom_residuals.items():
                out.append(f"connection_{k} = {v:.17g}")
        if self.holonomy_vector is not None:
            hv = ",".join(f"{x:.17g}" for x in self.holonomy_vector)
            out.append(f"holonomy_vector = {hv}")
        out.append(f"passed = {str(self.passed).lower()}")
        return out


# --- parsing -----------------------------------------------------------------

def _parse_floats(text, count, line):
    parts = [t.strip() for t in text.split(",")]
    if count is not None and len(parts) != count:
        raise ScenarioError(f"expected {count} comma-separated numbers, got {len(parts)}", line)
    try:
        vals = [float(t) for t in parts]
    except ValueError:
        raise ScenarioError(f"invalid number in {text!r}", line)
    if not all(math.isfinite(v) for v in vals):
        raise ScenarioError("non-finite value", line)
    return vals


def _read_sections(text):
    """Split config text into {section: ([(key, value, line)], [(row, line)])}."""
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise ScenarioError(f"duplicate section [{current}]", lineno)
            sections[current] = ([], [])
            continue
        if current is None:
            raise ScenarioError("content before any [section] header", lineno)
        if "=" in line:
            key, value = (t.strip() for t in line.split("=", 1))
            sections[current][0].append((key, value, lineno))
        else:
            sections[current][1].append((line, lineno))
    return sections


def _kv(section_entries, section_name):
    seen = {}
    for key, value, lineno in section_entries[0]:
        if key in seen:
            raise ScenarioError(f"duplicate key {key!r} in [{section_name}]", lineno)
        seen[key] = (value, lineno)
    return seen


def parse_scenario_text(text) -> Scenario:
    sections = _read_sections(text)

    def require(name):
        if name not in sections:
            raise ScenarioError(f"missing required section [{name}]")
        return sections[name]

    scen = _kv(require("scenario"), "scenario")
    if "mode" not in scen:
        raise ScenarioError("missing field 'mode' in [scenario]")
    mode, mode_line = scen["mode"]
    if mode not in MODES:
        raise ScenarioError(f"unknown mode {mode!r}", mode_line)
    seed = int(scen.get("seed", ("0", None))[0])
    trials = int(scen.get("trials", ("10000", None))[0])

    # [params]
    pk = _kv(require("params"), "params")
    scalars = {}
    for name in ("Jx", "Jz", "It", "Ig", "Is_g"):
        if name not in pk:
            raise ScenarioError(f"missing field {name!r} in [params]")
        scalars[name] = _parse_floats(pk[name][0], 1, pk[name][1])[0]
    if "I_sc" not in pk:
        raise ScenarioError("missing field 'I_sc' in [params]")
    isc_val, isc_line = pk["I_sc"]
    I_sc = np.array(_parse_floats(isc_val, 9, isc_line)).reshape(3, 3)
    try:
        params = InertiaParams(I_sc=I_sc, **scalars)
    except ValueError as exc:
        if "positive definite" in str(exc):
            raise ScenarioError("spacecraft inertia not positive definite", isc_line)
        raise ScenarioError(str(exc))

    # [initial]
    ik = _kv(require("initial"), "initial")

    def initial_float(name, default=0.0):
        if name not in ik:
            return default
        return _parse_floats(ik[name][0], 1, ik[name][1])[0]

    if "attitude" in ik:
        att_val, att_line = ik["attitude"]
        R = np.array(_parse_floats(att_val, 9, att_line)).reshape(3, 3)
        err = rotation_error(R)
        if err > 1e-6:
            raise ScenarioError(
                f"initial attitude not orthonormal (error {err:.3e})", att_line)
        if err > 0.0:
            R = project_to_so3(R)
    else:
        R = np.eye(3)
    omega = np.zeros(3)
    if "omega" in ik:
        omega = np.array(_parse_floats(ik["omega"][0], 3, ik["omega"][1]))
    initial = SystemState.make(R_s=R, beta=initial_float("beta"),
                               gamma=initial_float("gamma"), Omega_s=omega,
                               beta_dot=initial_float("beta_dot"),
                               gamma_dot=initial_float("gamma_dot"))

    # [integrator]
    cfg_kwargs = {}
    if "integrator" in sections:
        gk = _kv(sections["integrator"], "integrator")
        for name, conv in (("dt", float), ("steps", int),
                           ("reproject_every", int), ("scheme", str)):
            if name in gk:
                value, lineno = gk[name]
                try:
                    cfg_kwargs[name] = conv(value)
                except ValueError:
                    raise ScenarioError(f"invalid value for {name!r}", lineno)
    try:
        integrator = IntegratorConfig(**cfg_kwargs)
    except ValueError as exc:
        raise ScenarioError(str(exc))

    # [schedule]
    schedule = None
    if mode in SCHEDULE_COLUMNS:
        cols = SCHEDULE_COLUMNS[mode]
        if "schedule" not in sections:
            raise ScenarioError(f"mode {mode!r} requires a [schedule] section")
        rows = []
        for row_text, lineno in sections["schedule"][1]:
            rows.append(_parse_floats(row_text, len(cols), lineno))
        if not rows:
            raise ScenarioError("[schedule] section is empty")
        schedule = np.array(rows)
        t = schedule[:, 0]
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise ScenarioError("schedule times must be strictly increasing")
        horizon = integrator.dt * integrator.steps
        if t[0] > 0.0 or t[-1] < horizon - 1e-12:
            raise ScenarioError(
                f"schedule must cover [0, {horizon:g}] (inconsistent schedule length)")

    thresholds = {}
    if "thresholds" in sections:
        tk = _kv(sections["thresholds"], "thresholds")
        for key, (value, lineno) in tk.items():
            if key not in DEFAULT_THRESHOLDS:
                raise ScenarioError(f"unknown threshold {key!r}", lineno)
            thresholds[key] = _parse_floats(value, 1, lineno)[0]

    return Scenario(mode=mode, params=params, initial=initial,
                    integrator=integrator, schedule=schedule,
                    seed=seed, trials=trials, thresholds=thresholds)


def parse_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario_text(fh.read())


def serialize_scenario(s: Scenario) -> str:
    out = io.StringIO()
    out.write("[scenario]\n")
    out.write(f"mode = {s.mode}\nseed = {s.seed}\ntrials = {s.trials}\n")
    p = s.params
    out.write("\n[params]\n")
    for name in ("Jx", "Jz", "It", "Ig", "Is_g"):
        out.write(f"{name} = {getattr(p, name):.17g}\n")
    out.write("I_sc = " + ",".join(f"{x:.17g}" for x in p.I_sc.ravel()) + "\n")
    st = s.initial
    out.write("\n[initial]\n")
    out.write("attitude = " + ",".join(f"{x:.17g}" for x in st.R_s.ravel()) + "\n")
    out.write(f"beta = {st.shape.beta:.17g}\ngamma = {st.shape.gamma:.17g}\n")
    out.write("omega = " + ",".join(f"{x:.17g}" for x in st.Omega_s) + "\n")
    out.write(f"beta_dot = {st.shape.beta_dot:.17g}\n")
    out.write(f"gamma_dot = {st.shape.gamma_dot:.17g}\n")
    cfg = s.integrator
    out.write("\n[integrator]\n")
    out.write(f"dt = {cfg.dt:.17g}\nsteps = {cfg.steps}\n")
    out.write(f"scheme = {cfg.scheme}\nreproject_every = {cfg.reproject_every}\n")
    if s.schedule is not None:
        out.write("\n[schedule]\n")
        for row in s.schedule:
            out.write(",".join(f"{x:.17g}" for x in row) + "\n")
    if s.thresholds:
        out.write("\n[thresholds]\n")
        for key, value in s.thresholds.items():
            out.write(f"{key} = {value:.17g}\n")
    return out.getvalue()


# --- running -----------------------------------------------------------------

def write_trajectory_csv(path, traj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for i, state in enumerate(traj.states):
            row = np.concatenate([
                [traj.times[i]], state.R_s.ravel(),
                [state.shape.beta, state.shape.gamma],
                state.Omega_s,
                [state.shape.beta_dot, state.shape.gamma_dot],
                traj.mu[i], [traj.kinetic_energy[i], traj.orthonormality_error[i]],
            ])
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def run_scenario(scenario: Scenario, out_dir="."):
    """Execute one scenario. Returns (csv_path_or_None, DiagnosticReport)."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    p = scenario.params

    if scenario.mode == "compare_srj":
        result = verify_mod.srj_comparison(p, seed=scenario.seed, trials=scenario.trials)
        report = DiagnosticReport(srj_residual_max=result["srj_residual_max"])
        report.passed = result["srj_residual_max"] < scenario.threshold("srj_residual_max")
        return None, report

    if scenario.mode == "verify":
        checks = verify_mod.run_all(p, seed=scenario.seed, trials=scenario.trials)
        residuals = {c.name: c.residual for c in checks}
        report = DiagnosticReport(connection_axiom_residuals=residuals,
                                  passed=all(c.passed for c in checks))
        return None, report

    sched = scenario.schedule
    interp = interpolate_schedule(sched[:, 0], sched[:, 1:])
    if scenario.mode == "dynamic":
        driver = DynamicDriver(tau=interp)
    elif scenario.mode == "kinematic":
        mu0 = momentum_map(scenario.initial, p)
        driver = KinematicDriver(u=interp, mu=mu0)
    else:  # reconstruct
        mu0 = momentum_map(scenario.initial, p)
        driver = ReconstructDriver(shape=interp, mu=mu0)

    traj = simulate(scenario.initial, driver, scenario.integrator, p)

    mu_scale = max(float(np.abs(traj.mu[0]).max()), 1e-30)
    mu_drift = float(np.abs(traj.mu - traj.mu[0]).max() / mu_scale)
    ke_scale = max(abs(float(traj.kinetic_energy[0])), 1e-30)
    ke_drift = float(np.abs(traj.kinetic_energy - traj.kinetic_energy[0]).max() / ke_scale)
    ortho_max = float(traj.orthonormality_error.max())

    report = DiagnosticReport(mu_drift_rel=mu_drift, ke_drift_rel=ke_drift,
                              ortho_err_max=ortho_max)
    report.passed = ortho_max < scenario.threshold("ortho_err_max")
    if scenario.mode in ("dynamic", "kinematic"):
        # drift thresholds only bind on conservative runs (constant schedules)
        conservative = np.allclose(sched[:, 1:], sched[0, 1:])
        if scenario.mode == "kinematic" or (conservative and np.allclose(sched[0, 1:], 0.0)):
            report.passed = report.passed and mu_drift < scenario.threshold("mu_drift_rel")
        if scenario.mode == "dynamic" and conservative and np.allclose(sched[0, 1:], 0.0):
            report.passed = report.passed and ke_drift < scenario.threshold("ke_drift_rel")
    if scenario.mode == "reconstruct":
        beta, gamma = sched[:, 1], sched[:, 2]
        if abs(beta[-1] - beta[0]) < 1e-12 and abs(gamma[-1] - gamma[0]) < 1e-12:
            loop = (sched[:, 0], beta, gamma, sched[:, 3], sched[:, 4])
            report.holonomy_vector = holonomy(loop, p)

    csv_path = os.path.join(out_dir, "trajectory.csv")
    write_trajectory_csv(csv_path, traj)
    return csv_path, report


def write_report(path, report: DiagnosticReport):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(report.lines()) + "\n")
