"""Rigid-body pose math: quaternion poses and 4x4 homogeneous transforms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

QUAT_NORM_TOL = 1e-6
IDENTITY_QUAT = np.array([0.0, 0.0, 0.0, 1.0])


@dataclass(frozen=True)
class Pose6D:
    """Position in meters plus a unit quaternion in scalar-last (x, y, z, w) order."""

    position: np.ndarray
    orientation: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())

    def __post_init__(self):
        p = np.asarray(self.position, dtype=float).reshape(3)
        q = np.asarray(self.orientation, dtype=float).reshape(4)
        n = np.linalg.norm(q)
        if abs(n - 1.0) > QUAT_NORM_TOL:
            raise ValueError(f"quaternion norm {n} deviates from 1 by more than {QUAT_NORM_TOL}")
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "orientation", q)

    def to_matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = Rotation.from_quat(self.orientation).as_matrix()
        T[:3, 3] = self.position
        return T

    @staticmethod
    def from_matrix(T: np.ndarray) -> "Pose6D":
        T = np.asarray(T, dtype=float)
        check_transform(T)
        q = Rotation.from_matrix(T[:3, :3]).as_quat()
        return Pose6D(T[:3, 3].copy(), q)

    def almost_equal(self, other: "Pose6D", pos_tol=1e-9, rot_tol=1e-9) -> bool:
        if np.linalg.norm(self.position - other.position) > pos_tol:
            return False
        return rotation_angle_between(self.orientation, other.orientation) <= rot_tol


def identity_pose() -> Pose6D:
    return Pose6D(np.zeros(3), IDENTITY_QUAT.copy())


def check_transform(T: np.ndarray, tol: float = 1e-9) -> None:
    """Validate a 4x4 homogeneous transform: orthonormal rotation, unit determinant, fixed last row."""
    if T.shape != (4, 4):
        raise ValueError(f"expected 4x4 matrix, got {T.shape}")
    R = T[:3, :3]
    if np.max(np.abs(R @ R.T - np.eye(3))) > max(tol, 1e-9):
        raise ValueError("rotation block is not orthonormal")
    if abs(np.linalg.det(R) - 1.0) > 1e-6:
        raise ValueError("rotation block determinant is not +1")
    if np.max(np.abs(T[3] - np.array([0.0, 0.0, 0.0, 1.0]))) > tol:
        raise ValueError("last row must be [0, 0, 0, 1]")


def invert_transform(T: np.ndarray) -> np.ndarray:
    R = T[:3, :3]
    out = np.eye(4)
    out[:3, :3] = R.T
    out[:3, 3] = -R.T @ T[:3, 3]
    return out


def relative_transform(reference: Pose6D, moving: Pose6D) -> np.ndarray:
    """Pose of `moving` expressed in the frame attached to `reference` (4x4)."""
    return invert_transform(reference.to_matrix()) @ moving.to_matrix()


def rotation_angle_between(qa: np.ndarray, qb: np.ndarray) -> float:
    """Geodesic angle in radians between two unit quaternions."""
    dot = abs(float(np.dot(qa, qb)))
    dot = min(dot, 1.0)
    return 2.0 * np.arccos(dot)


def yaw_of(q: np.ndarray) -> float:
    """Rotation about the vertical (z) axis, radians."""
    R = Rotation.from_quat(q).as_matrix()
    return float(np.arctan2(R[1, 0], R[0, 0]))


def wrap_angle(a: float) -> float:
    return float(np.arctan2(np.sin(a), np.cos(a)))
