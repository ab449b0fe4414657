"""Tagged Cartesian points and the small rigid-transform helpers used everywhere."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import FrameMismatch


class Frame(str, Enum):
    ROBOT = "R"
    SHOULDER = "S"
    PELVIS = "P"


@dataclass(frozen=True)
class CartesianPoint:
    x: float
    y: float
    z: float
    frame: Frame = Frame.ROBOT

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite point {self}")

    @classmethod
    def from_array(cls, v, frame: Frame) -> CartesianPoint:
        v = np.asarray(v, dtype=float).reshape(3)
        return cls(float(v[0]), float(v[1]), float(v[2]), Frame(frame))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __array__(self, dtype=None, copy=None):
        return self.as_array().astype(dtype or float)

    def require(self, frame: Frame) -> np.ndarray:
        """Return the coordinates, raising if the point lives in another frame."""
        if self.frame != Frame(frame):
            raise FrameMismatch(f"expected a point in frame {Frame(frame).value}, got {self.frame.value}")
        return self.as_array()


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def homogeneous(rotation: np.ndarray, translation) -> np.ndarray:
    T = np.eye(4)
    T[:3, :3] = rotation
    T[:3, 3] = translation
    return T


def apply(T: np.ndarray, p) -> np.ndarray:
    """Apply a 4x4 homogeneous transform to one point or an (n, 3) stack."""
    p = np.asarray(p, dtype=float)
    return p @ T[:3, :3].T + T[:3, 3]


def wrap_angle(a):
    """Wrap to [-pi, pi)."""
    return (np.asarray(a) + np.pi) % (2.0 * np.pi) - np.pi


def angle_diff(a, b):
    return wrap_angle(np.asarray(a) - np.asarray(b))
