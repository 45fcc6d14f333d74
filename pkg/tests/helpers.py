"""Shared shape-path constructions used by the connection and acceptance tests."""

import numpy as np


def smoothstep(u):
    """Quintic ramp 0 -> 1 on [0, 1] with zero first and second derivatives
    at both ends."""
    return u**3 * (10.0 - 15.0 * u + 6.0 * u**2)


def smoothstep_d(u):
    return 30.0 * u**2 * (1.0 - u) ** 2


def smoothstep_dd(u):
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)


def _leg(t):
    """Clipped smoothstep with derivatives: holds 0 before and 1 after the ramp."""
    u = np.clip(t, 0.0, 1.0)
    inside = (t > 0.0) & (t < 1.0)
    return (smoothstep(u),
            np.where(inside, smoothstep_d(u), 0.0),
            np.where(inside, smoothstep_dd(u), 0.0))


def square_loop_shape(t, d_beta, d_gamma):
    """Shape angles and their first/second derivatives along the closed loop
    +beta, +gamma, -beta, -gamma on t in [0, 4], one time unit per leg.
    Angles hold their end-of-leg values while the other coordinate moves."""
    t = np.asarray(t, dtype=float)
    b_up, b_up_d, b_up_dd = _leg(t)
    b_dn, b_dn_d, b_dn_dd = _leg(t - 2.0)
    g_up, g_up_d, g_up_dd = _leg(t - 1.0)
    g_dn, g_dn_d, g_dn_dd = _leg(t - 3.0)
    return (d_beta * (b_up - b_dn), d_gamma * (g_up - g_dn),
            d_beta * (b_up_d - b_dn_d), d_gamma * (g_up_d - g_dn_d),
            d_beta * (b_up_dd - b_dn_dd), d_gamma * (g_up_dd - g_dn_dd))


def square_loop(d_beta, d_gamma, n_per_leg):
    """Sampled closed loop (t, beta, gamma, beta_dot, gamma_dot)."""
    t = np.linspace(0.0, 4.0, 4 * n_per_leg + 1)
    beta, gamma, beta_dot, gamma_dot, _, _ = square_loop_shape(t, d_beta, d_gamma)
    return (t, beta, gamma, beta_dot, gamma_dot)
