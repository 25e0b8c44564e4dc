"""SO(3) elements as unit quaternions (scalar-last, scipy convention)."""

import numpy as np
from scipy.spatial.transform import Rotation

from willmore_tori.exceptions import DomainError

QUATERNION_TOL = 1e-12
IDENTITY_QUATERNION = (0.0, 0.0, 0.0, 1.0)


def validate_quaternion(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise DomainError(f"Quaternion needs 4 components, got shape {q.shape}")
    if abs(np.linalg.norm(q) - 1.0) > QUATERNION_TOL:
        raise DomainError(f"Quaternion norm {np.linalg.norm(q):.15f} is not 1")
    return q


def rotation_matrix(q) -> np.ndarray:
    return Rotation.from_quat(validate_quaternion(q)).as_matrix()


def quaternion_from_matrix(matrix: np.ndarray) -> np.ndarray:
    q = Rotation.from_matrix(matrix).as_quat()
    return q / np.linalg.norm(q)


def quaternion_from_rotvec(rotvec) -> np.ndarray:
    q = Rotation.from_rotvec(np.asarray(rotvec, dtype=float)).as_quat()
    return q / np.linalg.norm(q)


def axis_quaternion(axis) -> np.ndarray:
    """Rotation taking e_z to ``axis`` along the shortest arc."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    ez = np.array([0.0, 0.0, 1.0])
    cross = np.cross(ez, axis)
    s = np.linalg.norm(cross)
    c = float(ez @ axis)
    if s < 1e-15:
        return np.array(IDENTITY_QUATERNION) if c > 0 else np.array([1.0, 0.0, 0.0, 0.0])
    return quaternion_from_rotvec(cross / s * np.arctan2(s, c))


def axis_from_angles(polar: float, azimuth: float) -> np.ndarray:
    return np.array(
        [np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)]
    )


def rotvec_from_quaternion(q) -> np.ndarray:
    return Rotation.from_quat(validate_quaternion(q)).as_rotvec()
