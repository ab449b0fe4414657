"""Sensor-free human arm pose estimation from robot joint readings.

The elbow and wrist are taken to coincide with the two cuff endpoints of the
robot. Two estimators turn those points into the four arm angles:

* fixed torso: the shoulder sits at its calibrated location, and the upper-arm
  length is re-measured every sample as the elbow distance from it;
* sagittal plane: the shoulder may move in the sagittal plane of the hip,
  on a circle of radius ``l_SH`` around the hip, and is located by
  intersecting that circle with the circle of elbow-compatible shoulder
  positions.

Human frames (shoulder S, pelvis P) are parallel: both are the robot base
frame rotated by ``psi`` about z and translated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, LateralOverreach, NoIntersection, ZeroElbow
from .frames import CartesianPoint, Frame, homogeneous, rot_z
from .human_model import HumanJointAngles, human_ik
from .robot_model import RobotGeometry, RobotJointState, fk_chain

SAGITTAL_CLAMP_TOL = 0.005
_TANGENT_TOL = 1e-12
_TANGENT_CHORD_SQ = 1e-14


@dataclass(frozen=True)
class FrameCalibration:
    """Robot base origin expressed in a human frame, plus the yaw ``psi``."""

    mode: str = "shoulder"
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    psi: float = -0.5 * math.pi

    def __post_init__(self):
        if self.mode not in ("shoulder", "pelvis"):
            raise ConfigError(f"calibration mode must be 'shoulder' or 'pelvis', got {self.mode!r}")
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z, self.psi)):
            raise ConfigError("calibration values must be finite")

    @property
    def frame(self) -> Frame:
        return Frame.SHOULDER if self.mode == "shoulder" else Frame.PELVIS

    @property
    def rotation(self) -> np.ndarray:
        """Rotation taking robot-frame vectors into the human frame."""
        return rot_z(self.psi)

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def matrix(self) -> np.ndarray:
        return homogeneous(self.rotation, self.translation)


@dataclass(frozen=True)
class TorsoParams:
    l_SH: float = 0.385
    l_PH: float = 0.1793

    def __post_init__(self):
        if not (self.l_SH > 0 and self.l_PH > 0):
            raise ConfigError("torso lengths must be positive")

    @property
    def hip(self) -> np.ndarray:
        return np.array([-self.l_PH, 0.0, 0.0])

    @property
    def upright_shoulder(self) -> np.ndarray:
        return np.array([-self.l_PH, 0.0, self.l_SH])


@dataclass(frozen=True)
class FixedTorsoEstimate:
    h: HumanJointAngles
    l_U_cal: float


@dataclass(frozen=True)
class ShoulderSolution:
    point: CartesianPoint
    clamped: bool = False
    miss: float = 0.0


@dataclass(frozen=True)
class SagittalEstimate:
    h: HumanJointAngles
    pS_P: CartesianPoint
    clamped: bool = False


def cuff_points(geom: RobotGeometry, joints: RobotJointState) -> tuple[CartesianPoint, CartesianPoint]:
    """Elbow and wrist in the robot frame: the two cuff endpoints."""
    pts = fk_chain(geom, joints)
    return pts.p6, pts.p7


def to_human_frame(points, calib: FrameCalibration):
    """Map robot-frame points into the calibration's human frame.

    Accepts a single :class:`CartesianPoint`, a sequence of them, or a raw
    array of shape (3,) or (n, 3) which is assumed to be in frame R.
    """
    if isinstance(points, CartesianPoint):
        v = points.require(Frame.ROBOT)
        return CartesianPoint.from_array(calib.rotation @ v + calib.translation, calib.frame)
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], CartesianPoint):
        return type(points)(to_human_frame(p, calib) for p in points)
    arr = np.asarray(points, dtype=float)
    return arr @ calib.rotation.T + calib.translation


def to_shoulder_frame(points, calib: FrameCalibration):
    if calib.mode != "shoulder":
        raise ConfigError("to_shoulder_frame needs a shoulder calibration")
    return to_human_frame(points, calib)


def to_pelvis_frame(points, calib: FrameCalibration):
    if calib.mode != "pelvis":
        raise ConfigError("to_pelvis_frame needs a pelvis calibration")
    return to_human_frame(points, calib)


def estimate_fixed_torso(pE_R, pW_R, calib_S: FrameCalibration, l_F: float, forearm_slack: float = 0.05) -> FixedTorsoEstimate:
    pE = to_shoulder_frame(pE_R, calib_S)
    pW = to_shoulder_frame(pW_R, calib_S)
    pE, pW = np.asarray(pE, dtype=float), np.asarray(pW, dtype=float)
    l_U_cal = float(np.linalg.norm(pE))
    if l_U_cal < 1e-9:
        raise ZeroElbow("elbow coincides with the calibrated shoulder")
    return FixedTorsoEstimate(human_ik(pE, pW, l_U_cal, l_F, forearm_slack), l_U_cal)


def solve_shoulder_sagittal(
    pE_P, torso: TorsoParams, l_U: float, clamp_tol: float = SAGITTAL_CLAMP_TOL
) -> ShoulderSolution:
    """Shoulder position in the hip's sagittal plane ``x = -l_PH``.

    In-plane (y, z) circles: one around the hip with radius ``l_SH``, one
    around the elbow projection with radius ``sqrt(l_U^2 - dx^2)`` where dx is
    the elbow's lateral offset from the plane. Of two intersections the one
    with larger z (shoulder above the hip) is returned. Circles that miss by
    less than ``clamp_tol`` are clamped to the point of the hip circle
    nearest to the elbow circle and flagged.
    """
    if isinstance(pE_P, CartesianPoint):
        pE_P = pE_P.require(Frame.PELVIS)
    ex, ey, ez = (float(v) for v in pE_P)
    dx = ex + torso.l_PH
    if abs(dx) > l_U:
        raise LateralOverreach(f"elbow {abs(dx):.4g} m from the sagittal plane exceeds l_U = {l_U:.4g} m")
    r1 = torso.l_SH
    r2 = math.sqrt(max(l_U * l_U - dx * dx, 0.0))
    d = math.hypot(ey, ez)
    plane_x = -torso.l_PH

    if d == 0.0:
        raise NoIntersection("elbow projection coincides with the hip; shoulder undetermined")
    uy, uz = ey / d, ez / d

    tangent_tol = _TANGENT_TOL * max(r1 + r2, 1.0)
    outside = d - (r1 + r2)
    inside = abs(r1 - r2) - d
    miss = max(outside, inside)
    if miss > tangent_tol:
        if miss >= clamp_tol:
            raise NoIntersection(f"hip and elbow circles miss by {miss * 1e3:.2f} mm")
        # hip circle inside the elbow circle: nearest point faces away from E'
        sign = -1.0 if inside > 0 and r2 > r1 else 1.0
        point = CartesianPoint(plane_x, sign * r1 * uy, sign * r1 * uz, Frame.PELVIS)
        return ShoulderSolution(point, clamped=True, miss=miss)

    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    # near tangency the half-chord is the square root of rounding noise; snap it
    h_sq = r1 * r1 - a * a
    h = math.sqrt(h_sq) if h_sq > _TANGENT_CHORD_SQ * r1 * r1 else 0.0
    my, mz = a * uy, a * uz
    roots = [(my - h * uz, mz + h * uy), (my + h * uz, mz - h * uy)]
    y, z = max(roots, key=lambda r: (r[1], r[0]))
    return ShoulderSolution(CartesianPoint(plane_x, y, z, Frame.PELVIS))


def estimate_sagittal(
    pE_R,
    pW_R,
    calib_P: FrameCalibration,
    torso: TorsoParams,
    l_U: float,
    l_F: float,
    clamp_tol: float = SAGITTAL_CLAMP_TOL,
    forearm_slack: float = 0.05,
) -> SagittalEstimate:
    pE = np.asarray(to_pelvis_frame(pE_R, calib_P), dtype=float)
    pW = np.asarray(to_pelvis_frame(pW_R, calib_P), dtype=float)
    sol = solve_shoulder_sagittal(pE, torso, l_U, clamp_tol)
    shoulder = sol.point.as_array()
    # derived shoulder frame: parallel to P with its origin at the shoulder
    pE_S, pW_S = pE - shoulder, pW - shoulder
    l_U_cal = float(np.linalg.norm(pE_S)) if sol.clamped else l_U
    h = human_ik(pE_S, pW_S, l_U_cal, l_F, forearm_slack)
    return SagittalEstimate(h, sol.point, sol.clamped)
