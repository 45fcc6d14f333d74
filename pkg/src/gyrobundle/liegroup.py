"""SO(3) / so(3) primitives: hat/vee maps, exponential, logarithm, projection.

All rotations are plain 3x3 numpy arrays acting on column vectors. Angular
velocities, momenta and exponential coordinates are length-3 numpy arrays.
"""

import numpy as np

# Angle below which sin(t)/t style coefficients switch to Taylor series.
_SMALL_ANGLE = 1e-5


def hat(v):
    """Map a 3-vector to the skew matrix S with S @ w == np.cross(v, w)."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def vee(S):
    """Inverse of hat. Rejects matrices whose symmetric part is non-negligible."""
    S = np.asarray(S, dtype=float)
    sym = 0.5 * (S + S.T)
    if np.abs(sym).max() > 1e-9:
        raise ValueError("matrix is not skew-symmetric (symmetric part exceeds 1e-9)")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def exp_so3(v):
    """Rodrigues exponential of a rotation vector."""
    v = np.asarray(v, dtype=float)
    t2 = v @ v
    t = np.sqrt(t2)
    if t < _SMALL_ANGLE:
        # sin(t)/t and (1-cos(t))/t^2 to 4th order; exact to machine precision here
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
    else:
        a = np.sin(t) / t
        b = (1.0 - np.cos(t)) / t2
    V = hat(v)
    return np.eye(3) + a * V + b * (V @ V)


def log_so3(R):
    """Rotation vector of R with norm in [0, pi]; exp_so3(log_so3(R)) == R."""
    R = np.asarray(R, dtype=float)
    # s = sin(theta) * axis, c = cos(theta)
    s = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]]) * 0.5
    c = np.clip((np.trace(R) - 1.0) * 0.5, -1.0, 1.0)
    theta = np.arctan2(np.linalg.norm(s), c)
    if theta < _SMALL_ANGLE:
        # v = theta/sin(theta) * s, expanded around theta = 0
        return s * (1.0 + theta * theta / 6.0 + 7.0 * theta ** 4 / 360.0)
    if np.pi - theta > 1e-4:
        return s * (theta / np.sin(theta))
    # Near pi: sin(theta) ~ 0, extract the axis from the symmetric part of
    # R + I (rank-one 2*n*n^T at pi; symmetrizing removes the O(pi - theta)
    # skew contamination) using the column with the largest diagonal pivot.
    B = 0.5 * (R + R.T) + np.eye(3)
    k = int(np.argmax(np.diag(B)))
    n = B[:, k] / np.linalg.norm(B[:, k])
    if n @ s < 0.0:
        n = -n
    return theta * n


def adjoint(R, v):
    """Spatial version R @ v of a body-frame vector; equals vee(R hat(v) R^T)."""
    return np.asarray(R, dtype=float) @ np.asarray(v, dtype=float)


def project_to_so3(M):
    """Nearest special-orthogonal matrix in Frobenius norm (polar decomposition)."""
    M = np.asarray(M, dtype=float)
    det = np.linalg.det(M)
    if not np.isfinite(det) or det <= 0.0:
        raise ValueError("matrix must have positive determinant")
    U, _, Vt = np.linalg.svd(M)
    D = np.diag([1.0, 1.0, np.sign(np.linalg.det(U @ Vt))])
    return U @ D @ Vt


def rotation_error(R):
    """Frobenius orthonormality defect ||R^T R - I||_F."""
    R = np.asarray(R, dtype=float)
    return np.linalg.norm(R.T @ R - np.eye(3))


def check_rotation(R, tol=1e-12):
    """Raise if R is not special orthogonal within tol."""
    R = np.asarray(R, dtype=float)
    if rotation_error(R) > tol:
        raise ValueError("matrix is not orthonormal within tolerance")
    if abs(np.linalg.det(R) - 1.0) > tol:
        raise ValueError("matrix determinant is not +1 within tolerance")
    return R


def geodesic_distance(R1, R2):
    """Angle of the relative rotation R1^T R2, in radians."""
    return np.linalg.norm(log_so3(np.asarray(R1).T @ np.asarray(R2)))
