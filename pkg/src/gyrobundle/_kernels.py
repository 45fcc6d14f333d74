"""Numba-compiled inner loops for trajectory integration.

Everything here mirrors the reference implementations in `dynamics`,
`connection` and `integrators` exactly (same formulas, same RK4 Munthe-Kaas
tableau); the test suite pins the two paths against each other. Inputs that
vary along the run (torques, rate commands, shape samples) are supplied on
the half-step grid t_0, t_0+dt/2, t_0+dt, ... so RK4 stages see exact values.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def exp_so3_k(v):
    t2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
    t = np.sqrt(t2)
    if t < 1e-5:
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
    else:
        a = np.sin(t) / t
        b = (1.0 - np.cos(t)) / t2
    R = np.empty((3, 3))
    x, y, z = v[0], v[1], v[2]
    R[0, 0] = 1.0 + b * (-z * z - y * y)
    R[0, 1] = -a * z + b * x * y
    R[0, 2] = a * y + b * x * z
    R[1, 0] = a * z + b * x * y
    R[1, 1] = 1.0 + b * (-z * z - x * x)
    R[1, 2] = -a * x + b * y * z
    R[2, 0] = -a * y + b * x * z
    R[2, 1] = a * x + b * y * z
    R[2, 2] = 1.0 + b * (-y * y - x * x)
    return R


@njit(cache=True)
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@njit(cache=True)
def dexpinv_k(sigma, omega):
    c1 = _cross(sigma, omega)
    return omega + 0.5 * c1 + _cross(sigma, c1) / 12.0


@njit(cache=True)
def ortho_err_k(R):
    s = 0.0
    for i in range(3):
        for j in range(3):
            g = R[0, i] * R[0, j] + R[1, i] * R[1, j] + R[2, i] * R[2, j]
            if i == j:
                g -= 1.0
            s += g * g
    return np.sqrt(s)


@njit(cache=True)
def project_k(R):
    U, s, Vt = np.linalg.svd(R)
    W = U @ Vt
    if np.linalg.det(W) < 0.0:
        U2 = U.copy()
        U2[:, 2] = -U2[:, 2]
        W = U2 @ Vt
    return W


@njit(cache=True)
def _gimbal_rot(beta):
    cb, sb = np.cos(beta), np.sin(beta)
    Rb = np.empty((3, 3))
    Rb[0, 0] = cb
    Rb[0, 1] = 0.0
    Rb[0, 2] = sb
    Rb[1, 0] = 0.0
    Rb[1, 1] = 1.0
    Rb[1, 2] = 0.0
    Rb[2, 0] = -sb
    Rb[2, 1] = 0.0
    Rb[2, 2] = cb
    return Rb


@njit(cache=True)
def _locked(beta, Isc, d3):
    Rb = _gimbal_rot(beta)
    return Rb, Isc + (Rb * d3) @ Rb.T


@njit(cache=True)
def dyn_accel_k(Omega, beta, bdot, gdot, taug, tauw, Isc, d3):
    """Accelerations (Omega_dot, beta_ddot, gamma_ddot) of the dynamic model."""
    Rb, Il = _locked(beta, Isc, d3)
    og = Rb.T @ Omega
    rel = np.array([0.0, bdot, gdot])
    drel = d3 * rel
    u1 = d3 * (og + rel)
    uc = d3[2] - d3[0]
    M = np.zeros((5, 5))
    M[:3, :3] = Il
    for i in range(3):
        M[i, 3] = d3[1] * Rb[i, 1]
        M[3, i] = M[i, 3]
        M[i, 4] = d3[2] * Rb[i, 2]
        M[4, i] = M[i, 4]
    M[3, 3] = d3[1]
    M[4, 4] = d3[2]
    pb = Il @ Omega + Rb @ drel
    v = np.empty(3)
    v[0] = uc * og[2] + drel[2]
    v[1] = 0.0
    v[2] = uc * og[0] - drel[0]
    rbv = Rb @ v
    cr = _cross(Omega, pb)
    b = np.empty(5)
    b[0] = -cr[0] - bdot * rbv[0]
    b[1] = -cr[1] - bdot * rbv[1]
    b[2] = -cr[2] - bdot * rbv[2]
    b[3] = taug - (u1[0] * og[2] - u1[2] * og[0])
    b[4] = tauw - d3[2] * bdot * og[0]
    return np.linalg.solve(M, b)


@njit(cache=True)
def required_tau_k(Omega, beta, bdot, gdot, bdd, gdd, Isc, d3):
    """Motor torques realizing shape accelerations (bdd, gdd); returns
    (taug, tauw, Omega_dot)."""
    Rb, Il = _locked(beta, Isc, d3)
    og = Rb.T @ Omega
    rel = np.array([0.0, bdot, gdot])
    drel = d3 * rel
    u1 = d3 * (og + rel)
    uc = d3[2] - d3[0]
    pb = Il @ Omega + Rb @ drel
    v = np.empty(3)
    v[0] = uc * og[2] + drel[2]
    v[1] = 0.0
    v[2] = uc * og[0] - drel[0]
    rbv = Rb @ v
    cr = _cross(Omega, pb)
    b3 = np.empty(3)
    for i in range(3):
        b3[i] = -cr[i] - bdot * rbv[i] - d3[1] * Rb[i, 1] * bdd - d3[2] * Rb[i, 2] * gdd
    Odot = np.linalg.solve(Il, b3)
    sOdot = Rb[0, 2] * Odot[0] + Rb[1, 2] * Odot[1] + Rb[2, 2] * Odot[2]
    gOdot = Rb[0, 1] * Odot[0] + Rb[1, 1] * Odot[1] + Rb[2, 1] * Odot[2]
    taug = d3[1] * (gOdot + bdd) + (u1[0] * og[2] - u1[2] * og[0])
    tauw = d3[2] * (sOdot + gdd) + d3[2] * bdot * og[0]
    return taug, tauw, Odot


@njit(cache=True)
def kin_omega_k(R, beta, ubeta, ugamma, mu, Isc, d3):
    """Body attitude velocity on the momentum level set mu with shape rates u."""
    Rb, Il = _locked(beta, Isc, d3)
    rhs = R.T @ mu
    for i in range(3):
        rhs[i] -= d3[1] * Rb[i, 1] * ubeta + d3[2] * Rb[i, 2] * ugamma
    return np.linalg.solve(Il, rhs)


@njit(cache=True)
def _dyn_stage(R, y, taug, tauw, Isc, d3):
    a = dyn_accel_k(y[:3], y[3], y[5], y[6], taug, tauw, Isc, d3)
    ydot = np.empty(7)
    ydot[0] = a[0]
    ydot[1] = a[1]
    ydot[2] = a[2]
    ydot[3] = y[5]
    ydot[4] = y[6]
    ydot[5] = a[3]
    ydot[6] = a[4]
    return y[:3].copy(), ydot


@njit(cache=True)
def _track_stage(R, y, bdd, gdd, Isc, d3):
    taug, tauw, _ = required_tau_k(y[:3], y[3], y[5], y[6], bdd, gdd, Isc, d3)
    return _dyn_stage(R, y, taug, tauw, Isc, d3)


@njit(cache=True)
def run_dynamic(R0, y0, dt, steps, inputs, tracking, Isc, d3,
                reproject_every, rk4):
    """Integrate the torque-driven model. inputs holds either (taug, tauw)
    or, when tracking, commanded (beta_ddot, gamma_ddot), sampled on the
    half-step grid (2*steps+1 rows). Returns (R_out, y_out, ortho, abort)."""
    n = steps
    R_out = np.empty((n + 1, 3, 3))
    y_out = np.empty((n + 1, 7))
    ortho = np.empty(n + 1)
    R = R0.copy()
    y = y0.copy()
    R_out[0] = R
    y_out[0] = y
    ortho[0] = ortho_err_k(R)
    for i in range(n):
        if tracking:
            o1, k1 = _track_stage(R, y, inputs[2 * i, 0], inputs[2 * i, 1], Isc, d3)
        else:
            o1, k1 = _dyn_stage(R, y, inputs[2 * i, 0], inputs[2 * i, 1], Isc, d3)
        if rk4:
            s2 = 0.5 * dt * o1
            R2 = R @ exp_so3_k(s2)
            y2 = y + 0.5 * dt * k1
            if tracking:
                o2, k2 = _track_stage(R2, y2, inputs[2 * i + 1, 0], inputs[2 * i + 1, 1], Isc, d3)
            else:
                o2, k2 = _dyn_stage(R2, y2, inputs[2 * i + 1, 0], inputs[2 * i + 1, 1], Isc, d3)
            d2 = dexpinv_k(s2, o2)
            s3 = 0.5 * dt * d2
            R3 = R @ exp_so3_k(s3)
            y3 = y + 0.5 * dt * k2
            if tracking:
                o3, k3 = _track_stage(R3, y3, inputs[2 * i + 1, 0], inputs[2 * i + 1, 1], Isc, d3)
            else:
                o3, k3 = _dyn_stage(R3, y3, inputs[2 * i + 1, 0], inputs[2 * i + 1, 1], Isc, d3)
            d3v = dexpinv_k(s3, o3)
            s4 = dt * d3v
            R4 = R @ exp_so3_k(s4)
            y4 = y + dt * k3
            if tracking:
                o4, k4 = _track_stage(R4, y4, inputs[2 * i + 2, 0], inputs[2 * i + 2, 1], Isc, d3)
            else:
                o4, k4 = _dyn_stage(R4, y4, inputs[2 * i + 2, 0], inputs[2 * i + 2, 1], Isc, d3)
            d4 = dexpinv_k(s4, o4)
            sigma = (dt / 6.0) * (o1 + 2.0 * d2 + 2.0 * d3v + d4)
            R = R @ exp_so3_k(sigma)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            R = R @ exp_so3_k(dt * o1)
            y = y + dt * k1
        if (i + 1) % reproject_every == 0:
            R = project_k(R)
        err = ortho_err_k(R)
        R_out[i + 1] = R
        y_out[i + 1] = y
        ortho[i + 1] = err
        if not (err <= 1e-6):
            return R_out, y_out, ortho, i + 1
    return R_out, y_out, ortho, -1


@njit(cache=True)
def run_kinematic(R0, x0, dt, steps, u_half, mu, Isc, d3, reproject_every, rk4):
    """Integrate the rate-commanded kinematic model. u_half holds
    (u_beta, u_gamma) on the half-step grid. Returns
    (R_out, shape_out, omega_out, ortho, abort)."""
    n = steps
    R_out = np.empty((n + 1, 3, 3))
    x_out = np.empty((n + 1, 2))
    omega_out = np.empty((n + 1, 3))
    ortho = np.empty(n + 1)
    R = R0.copy()
    x = x0.copy()
    R_out[0] = R
    x_out[0] = x
    omega_out[0] = kin_omega_k(R, x[0], u_half[0, 0], u_half[0, 1], mu, Isc, d3)
    ortho[0] = ortho_err_k(R)
    for i in range(n):
        u1b, u1g = u_half[2 * i, 0], u_half[2 * i, 1]
        umb, umg = u_half[2 * i + 1, 0], u_half[2 * i + 1, 1]
        u4b, u4g = u_half[2 * i + 2, 0], u_half[2 * i + 2, 1]
        o1 = kin_omega_k(R, x[0], u1b, u1g, mu, Isc, d3)
        if rk4:
            s2 = 0.5 * dt * o1
            o2 = kin_omega_k(R @ exp_so3_k(s2), x[0] + 0.5 * dt * u1b, umb, umg, mu, Isc, d3)
            d2 = dexpinv_k(s2, o2)
            s3 = 0.5 * dt * d2
            o3 = kin_omega_k(R @ exp_so3_k(s3), x[0] + 0.5 * dt * umb, umb, umg, mu, Isc, d3)
            d3v = dexpinv_k(s3, o3)
            s4 = dt * d3v
            o4 = kin_omega_k(R @ exp_so3_k(s4), x[0] + dt * umb, u4b, u4g, mu, Isc, d3)
            d4 = dexpinv_k(s4, o4)
            R = R @ exp_so3_k((dt / 6.0) * (o1 + 2.0 * d2 + 2.0 * d3v + d4))
            x = x + (dt / 6.0) * np.array([u1b + 2.0 * umb + 2.0 * umb + u4b,
                                           u1g + 2.0 * umg + 2.0 * umg + u4g])
        else:
            R = R @ exp_so3_k(dt * o1)
            x = x + dt * np.array([u1b, u1g])
        if (i + 1) % reproject_every == 0:
            R = project_k(R)
        err = ortho_err_k(R)
        R_out[i + 1] = R
        x_out[i + 1] = x
        omega_out[i + 1] = kin_omega_k(R, x[0], u4b, u4g, mu, Isc, d3)
        ortho[i + 1] = err
        if not (err <= 1e-6):
            return R_out, x_out, omega_out, ortho, i + 1
    return R_out, x_out, omega_out, ortho, -1


@njit(cache=True)
def run_reconstruct(R0, dt, steps, shape_half, mu, Isc, d3, reproject_every, rk4):
    """Integrate the attitude reconstruction along a prescribed shape motion.
    shape_half holds (beta, gamma, beta_dot, gamma_dot) on the half-step
    grid. Returns (R_out, omega_out, ortho, abort)."""
    n = steps
    R_out = np.empty((n + 1, 3, 3))
    omega_out = np.empty((n + 1, 3))
    ortho = np.empty(n + 1)
    R = R0.copy()
    R_out[0] = R
    omega_out[0] = kin_omega_k(R, shape_half[0, 0], shape_half[0, 2],
                               shape_half[0, 3], mu, Isc, d3)
    ortho[0] = ortho_err_k(R)
    for i in range(n):
        r1 = shape_half[2 * i]
        rm = shape_half[2 * i + 1]
        r4 = shape_half[2 * i + 2]
        o1 = kin_omega_k(R, r1[0], r1[2], r1[3], mu, Isc, d3)
        if rk4:
            s2 = 0.5 * dt * o1
            o2 = kin_omega_k(R @ exp_so3_k(s2), rm[0], rm[2], rm[3], mu, Isc, d3)
            d2 = dexpinv_k(s2, o2)
            s3 = 0.5 * dt * d2
            o3 = kin_omega_k(R @ exp_so3_k(s3), rm[0], rm[2], rm[3], mu, Isc, d3)
            d3v = dexpinv_k(s3, o3)
            s4 = dt * d3v
            o4 = kin_omega_k(R @ exp_so3_k(s4), r4[0], r4[2], r4[3], mu, Isc, d3)
            d4 = dexpinv_k(s4, o4)
            R = R @ exp_so3_k((dt / 6.0) * (o1 + 2.0 * d2 + 2.0 * d3v + d4))
        else:
            R = R @ exp_so3_k(dt * o1)
        if (i + 1) % reproject_every == 0:
            R = project_k(R)
        err = ortho_err_k(R)
        R_out[i + 1] = R
        omega_out[i + 1] = kin_omega_k(R, r4[0], r4[2], r4[3], mu, Isc, d3)
        ortho[i + 1] = err
        if not (err <= 1e-6):
            return R_out, omega_out, ortho, i + 1
    return R_out, omega_out, ortho, -1


@njit(cache=True)
def run_free_rigid(R0, Omega0, Ibody, dt, steps, rk4):
    """Free rigid body Omega_dot = -I^{-1}(Omega x I Omega); returns only the
    terminal (R, Omega). Used by integrator order studies."""
    R = R0.copy()
    w = Omega0.copy()
    Iinv = np.linalg.inv(Ibody)

    for i in range(steps):
        o1 = w
        k1 = -Iinv @ _cross(o1, Ibody @ o1)
        if rk4:
            s2 = 0.5 * dt * o1
            w2 = w + 0.5 * dt * k1
            k2 = -Iinv @ _cross(w2, Ibody @ w2)
            d2 = dexpinv_k(s2, w2)
            s3 = 0.5 * dt * d2
            w3 = w + 0.5 * dt * k2
            k3 = -Iinv @ _cross(w3, Ibody @ w3)
            d3v = dexpinv_k(s3, w3)
            s4 = dt * d3v
            w4 = w + dt * k3
            k4 = -Iinv @ _cross(w4, Ibody @ w4)
            d4 = dexpinv_k(s4, w4)
            R = R @ exp_so3_k((dt / 6.0) * (o1 + 2.0 * d2 + 2.0 * d3v + d4))
            w = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            R = R @ exp_so3_k(dt * o1)
            w = w + dt * k1
    return R, w
