"""Shared JSON configuration.

One document with the sections ``robot``, ``human``, ``calibration_shoulder``,
``calibration_pelvis``, ``torso``, ``control`` and ``filters``. Every section
and every key is optional; missing values take the defaults below.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path


from ..control import ControllerConfig
from ..errors import ConfigError
from ..human_model import HumanArmParams
from ..pose_estimation import FrameCalibration, TorsoParams
from ..robot_model import JointLimits, LinkMass, RobotGeometry, RobotMassModel

# Robot base origin in the pelvis frame for the bundled setup: 0.32 m to the
# user's right of the hip plane, 0.30 m forward, 0.12 m above the pelvis origin.
DEFAULT_ROBOT_IN_PELVIS = (-0.50, -0.30, 0.12)


@dataclass(frozen=True)
class FilterConfig:
    fs: float = 2000.0
    notch_freqs: tuple[float, ...] = (50.0, 1.67)
    notch_q: tuple[float, ...] = (30.0, 5.0)
    highpass_hz: float = 20.0
    highpass_order: int = 10
    lowpass_hz: float = 4.0
    lowpass_order: int = 10
    zero_phase: bool = True
    mvc: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "notch_freqs", tuple(float(f) for f in self.notch_freqs))
        object.__setattr__(self, "notch_q", tuple(float(q) for q in self.notch_q))
        if len(self.notch_freqs) != len(self.notch_q):
            raise ConfigError("filters.notch_freqs and filters.notch_q must have equal length")


@dataclass(frozen=True)
class Config:
    controller: ControllerConfig
    filters: FilterConfig = field(default_factory=FilterConfig)


def shoulder_calibration_from_pelvis(calib_P: FrameCalibration, torso: TorsoParams) -> FrameCalibration:
    """Shoulder calibration consistent with an upright torso: S is P shifted to the shoulder."""
    t = calib_P.translation - torso.upright_shoulder
    return FrameCalibration("shoulder", float(t[0]), float(t[1]), float(t[2]), calib_P.psi)


def default_config() -> Config:
    torso = TorsoParams()
    calib_P = FrameCalibration("pelvis", *DEFAULT_ROBOT_IN_PELVIS)
    ctrl = ControllerConfig(
        calibration_shoulder=shoulder_calibration_from_pelvis(calib_P, torso),
        calibration_pelvis=calib_P,
        torso=torso,
    )
    return Config(ctrl)


def _build(cls, section: dict, name: str, **extra):
    allowed = {f.name for f in fields(cls)}
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in section {name!r}: {sorted(unknown)}")
    try:
        return cls(**{**section, **extra})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid section {name!r}: {exc}") from exc


def config_from_dict(doc: dict) -> Config:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    check_finite(doc)
    known = {"robot", "human", "calibration_shoulder", "calibration_pelvis", "torso", "control", "filters"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
    defaults = default_config().controller

    robot = dict(doc.get("robot", {}))
    mass_doc = robot.pop("mass", None)
    limits_doc = robot.pop("joint_limits", None)
    geom = _build(RobotGeometry, robot, "robot")
    mass = defaults.mass
    if mass_doc is not None:
        try:
            mass = RobotMassModel(tuple(LinkMass(**m) for m in mass_doc))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid robot.mass: {exc}") from exc
    joint_limits = JointLimits({k: tuple(v) for k, v in (limits_doc or {}).items()})

    human = _build(HumanArmParams, doc.get("human", {}), "human")
    torso = _build(TorsoParams, doc.get("torso", {}), "torso")
    calib_P = _build(
        FrameCalibration, {**asdict(defaults.calibration_pelvis), **doc.get("calibration_pelvis", {})}, "calibration_pelvis"
    )
    if "calibration_shoulder" in doc:
        calib_S = _build(
            FrameCalibration, {**asdict(defaults.calibration_shoulder), **doc["calibration_shoulder"]}, "calibration_shoulder"
        )
    else:
        calib_S = shoulder_calibration_from_pelvis(calib_P, torso)

    control = dict(doc.get("control", {}))
    allowed_control = {"torque_limits", "sagittal_clamp_tol", "forearm_slack"}
    if set(control) - allowed_control:
        raise ConfigError(f"unknown key(s) in section 'control': {sorted(set(control) - allowed_control)}")
    try:
        ctrl = ControllerConfig(
            geometry=geom,
            mass=mass,
            human=human,
            calibration_shoulder=calib_S,
            calibration_pelvis=calib_P,
            torso=torso,
            joint_limits=joint_limits,
            **control,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid controller config: {exc}") from exc
    filters = _build(FilterConfig, doc.get("filters", {}), "filters")
    return Config(ctrl, filters)


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return default_config()
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(doc)


def config_to_dict(cfg: Config) -> dict:
    c = cfg.controller
    robot = asdict(c.geometry)
    robot["cuff_offsets"] = list(c.geometry.cuff_offsets)
    robot["mass"] = [{"mass": m.mass, "com": list(m.com)} for m in c.mass.links]
    robot["joint_limits"] = {k: list(v) for k, v in c.joint_limits.ranges.items()}
    filters = asdict(cfg.filters)
    filters["notch_freqs"] = list(cfg.filters.notch_freqs)
    filters["notch_q"] = list(cfg.filters.notch_q)
    return {
        "robot": robot,
        "human": asdict(c.human),
        "calibration_shoulder": asdict(c.calibration_shoulder),
        "calibration_pelvis": asdict(c.calibration_pelvis),
        "torso": asdict(c.torso),
        "control": {
            "torque_limits": list(c.torque_limits),
            "sagittal_clamp_tol": c.sagittal_clamp_tol,
            "forearm_slack": c.forearm_slack,
        },
        "filters": filters,
    }


def check_finite(doc) -> None:
    """Reject NaN/inf anywhere in a nested config document."""
    if isinstance(doc, dict):
        for v in doc.values():
            check_finite(v)
    elif isinstance(doc, (list, tuple)):
        for v in doc:
            check_finite(v)
    elif isinstance(doc, float) and not math.isfinite(doc):
        raise ConfigError("non-finite number in config")
