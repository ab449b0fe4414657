"""Adaptive arm gravity-compensation control step.

One step maps a robot joint snapshot to reference torques for the three
active motors::

    tau_ref = J_R(q)^T F_h + tau_R(q)

where tau_R holds the robot structure against gravity and F_h is the cuff
force that supports the user's arm at the estimated posture. F_h is computed
in the human frame and rotated back into the robot frame before mapping.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, DegenerateJacobian, NumericError
from .human_model import HumanArmParams, HumanJointAngles, support_force
from .pose_estimation import (
    SAGITTAL_CLAMP_TOL,
    FrameCalibration,
    TorsoParams,
    cuff_points,
    estimate_fixed_torso,
    estimate_sagittal,
)
from .robot_model import JointLimits, RobotGeometry, RobotJointState, RobotMassModel, gravity_torque_robot, jacobian_active

log = logging.getLogger(__name__)

PEAK_TORQUE = 48.0


class ControlMode(str, Enum):
    TRANSPARENT = "transparent"
    FIXED_TORSO = "fixed"
    SAGITTAL = "sagittal"


@dataclass(frozen=True)
class ControllerConfig:
    geometry: RobotGeometry = field(default_factory=RobotGeometry)
    mass: RobotMassModel = field(default_factory=RobotMassModel)
    human: HumanArmParams = field(default_factory=HumanArmParams)
    calibration_shoulder: FrameCalibration = field(default_factory=lambda: FrameCalibration("shoulder"))
    calibration_pelvis: FrameCalibration = field(default_factory=lambda: FrameCalibration("pelvis"))
    torso: TorsoParams = field(default_factory=TorsoParams)
    torque_limits: tuple[float, float, float] = (PEAK_TORQUE,) * 3
    sagittal_clamp_tol: float = SAGITTAL_CLAMP_TOL
    forearm_slack: float = 0.05
    joint_limits: JointLimits = field(default_factory=JointLimits)

    def __post_init__(self):
        if self.calibration_shoulder.mode != "shoulder" or self.calibration_pelvis.mode != "pelvis":
            raise ConfigError("calibration_shoulder / calibration_pelvis have the wrong mode")
        limits = tuple(float(v) for v in self.torque_limits)
        if len(limits) != 3 or not all(v > 0 for v in limits):
            raise ConfigError("torque_limits must be three positive values")
        object.__setattr__(self, "torque_limits", limits)


@dataclass(frozen=True)
class TorqueCommand:
    tau1: float
    tau2: float
    tau3: float
    flags: frozenset = frozenset()
    h: HumanJointAngles | None = None
    force_R: tuple[float, float, float] | None = None

    def as_array(self) -> np.ndarray:
        return np.array([self.tau1, self.tau2, self.tau3])


def compute_tau_h(J_R: np.ndarray, F_h) -> np.ndarray:
    """Joint torques that make the end effector exert ``F_h`` (robot frame)."""
    return np.asarray(J_R, dtype=float).T @ np.asarray(F_h, dtype=float)


def force_to_robot_frame(F_human, calib: FrameCalibration) -> np.ndarray:
    """Rotate a human-frame force into the robot frame (translation is irrelevant)."""
    return calib.rotation.T @ np.asarray(F_human, dtype=float)


def clamp_torques(tau: np.ndarray, limits) -> tuple[np.ndarray, bool]:
    limits = np.asarray(limits, dtype=float)
    clamped = np.clip(tau, -limits, limits)
    return clamped, bool(np.any(clamped != tau))


def estimate_posture(joints: RobotJointState, mode: ControlMode, cfg: ControllerConfig):
    """Run the mode's estimator; returns (h, calibration used, flags)."""
    pE, pW = cuff_points(cfg.geometry, joints)
    if mode is ControlMode.FIXED_TORSO:
        est = estimate_fixed_torso(pE, pW, cfg.calibration_shoulder, cfg.human.l_F, cfg.forearm_slack)
        return est.h, cfg.calibration_shoulder, set()
    est = estimate_sagittal(
        pE, pW, cfg.calibration_pelvis, cfg.torso, cfg.human.l_U, cfg.human.l_F, cfg.sagittal_clamp_tol, cfg.forearm_slack
    )
    return est.h, cfg.calibration_pelvis, {"sagittal_clamp"} if est.clamped else set()


def control_step(joints: RobotJointState, mode: ControlMode | str, cfg: ControllerConfig) -> TorqueCommand:
    mode = ControlMode(mode)
    cfg.joint_limits.check(joints)
    tau = gravity_torque_robot(cfg.mass, cfg.geometry, joints, cfg.human.g)
    flags: set[str] = set()
    h = None
    force_R = None

    if mode is not ControlMode.TRANSPARENT:
        try:
            h, calib, est_flags = estimate_posture(joints, mode, cfg)
            flags |= est_flags
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateJacobian)
                F = support_force(cfg.human, h)
            if F.rank_deficient:
                flags.add("degenerate_jacobian")
            F_R = force_to_robot_frame(F.as_array(), calib)
            tau = tau + compute_tau_h(jacobian_active(cfg.geometry, *joints.active), F_R)
            force_R = tuple(float(v) for v in F_R)
        except NumericError as exc:
            # never leave the arm uncompensated: fall back to the transparent torques
            log.warning("estimator failure in %s mode: %s", mode.value, exc)
            flags.add("estimator_failure")
            h = None

    if not np.all(np.isfinite(tau)):
        raise NumericError(f"non-finite torque {tau}")
    tau, clamped = clamp_torques(tau, cfg.torque_limits)
    if clamped:
        flags.add("clamped")
    return TorqueCommand(float(tau[0]), float(tau[1]), float(tau[2]), frozenset(flags), h, force_R)


class Controller:
    """Single-writer wrapper holding an immutable config and per-step counters."""

    def __init__(self, cfg: ControllerConfig, mode: ControlMode | str = ControlMode.TRANSPARENT):
        self.cfg = cfg
        self.mode = ControlMode(mode)
        self.flag_counts: dict[str, int] = {}

    def step(self, joints: RobotJointState) -> TorqueCommand:
        cmd = control_step(joints, self.mode, self.cfg)
        for f in cmd.flags:
            self.flag_counts[f] = self.flag_counts.get(f, 0) + 1
        return cmd
