"""Synthetic scenes with ground truth.

A scene describes how the user's arm angles and torso lean evolve over time.
The generator places the arm in the pelvis frame, maps the elbow and wrist into
the robot frame and solves the robot's five joints so that its cuff endpoints
land exactly on them: the data flow the estimators invert.

Torso lean is the forward displacement ``s`` of the shoulder, which moves on the
hip-centred circle of radius ``l_SH`` in the sagittal plane::

    shoulder_P(s) = (-l_PH, -s, sqrt(l_SH^2 - s^2))

Forward is -y in the human frames (at h = 0 the upper arm points along -y).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..errors import ConfigError, GimbalDegeneracy, NumericError, Unreachable, WorkspaceViolation
from ..frames import wrap_angle
from ..human_model import HumanArmParams, HumanJointAngles, human_fk
from ..pose_estimation import FrameCalibration, TorsoParams
from ..robot_model import RobotGeometry, RobotJointState, chain_transforms, fk_chain, ik_active
from .io import TrajectorySample

_FIXED_POINT_TOL = 1e-15
_FIXED_POINT_ITERS = 200


@dataclass(frozen=True)
class SyntheticScenario:
    """Time profiles of a synthetic trial.

    ``h_knots`` rows are ``[t, h1, h2, h3, h4]`` in seconds and degrees;
    ``lean_knots`` rows are ``[t, s]`` with the forward shoulder displacement in
    metres. Both are interpolated with monotone cubic (PCHIP) splines and held
    constant outside their span. ``wobble_deg`` adds seeded smooth random
    sinusoids of that amplitude to every arm angle.
    """

    duration: float = 10.0
    rate: float = 100.0
    h_knots: tuple = ((0.0, 0.0, 20.0, -20.0, 0.0),)
    lean_knots: tuple = ((0.0, 0.0),)
    wobble_deg: float = 0.0
    wobble_components: int = 3
    wobble_max_hz: float = 0.5
    name: str = "scenario"

    def __post_init__(self):
        if not (self.duration > 0 and self.rate > 0):
            raise ConfigError("duration and rate must be positive")
        h = np.asarray(self.h_knots, dtype=float)
        lean = np.asarray(self.lean_knots, dtype=float)
        if h.ndim != 2 or h.shape[1] != 5 or lean.ndim != 2 or lean.shape[1] != 2:
            raise ConfigError("h_knots rows must be [t,h1,h2,h3,h4] and lean_knots rows [t,s]")
        for k in (h, lean):
            if not np.all(np.isfinite(k)) or np.any(np.diff(k[:, 0]) <= 0):
                raise ConfigError("knot times must be finite and strictly increasing")

    @classmethod
    def from_dict(cls, doc: dict) -> SyntheticScenario:
        allowed = set(cls.__dataclass_fields__)
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"unknown scenario key(s): {sorted(unknown)}")
        doc = dict(doc)
        for key in ("h_knots", "lean_knots"):
            if key in doc:
                doc[key] = tuple(tuple(float(v) for v in row) for row in doc[key])
        try:
            return cls(**doc)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid scenario: {exc}") from exc

    def times(self) -> np.ndarray:
        n = int(round(self.duration * self.rate))
        return np.arange(n) / self.rate


@dataclass(frozen=True)
class SceneSetup:
    geometry: RobotGeometry = field(default_factory=RobotGeometry)
    human: HumanArmParams = field(default_factory=HumanArmParams)
    calibration_pelvis: FrameCalibration = field(default_factory=lambda: FrameCalibration("pelvis"))
    torso: TorsoParams = field(default_factory=TorsoParams)


def _profile(knots: np.ndarray, t: np.ndarray) -> np.ndarray:
    if len(knots) == 1:
        return np.repeat(knots[:, 1:], len(t), axis=0)
    tt = np.clip(t, knots[0, 0], knots[-1, 0])
    return PchipInterpolator(knots[:, 0], knots[:, 1:], axis=0)(tt)


def arm_profile(spec: SyntheticScenario, t: np.ndarray, seed: int = 0) -> np.ndarray:
    """Arm angles (radians), shape (n, 4)."""
    h_deg = _profile(np.asarray(spec.h_knots, dtype=float), t)
    if spec.wobble_deg > 0:
        rng = np.random.default_rng(seed)
        k = spec.wobble_components
        freqs = rng.uniform(0.05, spec.wobble_max_hz, size=(k, 4))
        phases = rng.uniform(0.0, 2.0 * math.pi, size=(k, 4))
        weights = rng.uniform(0.5, 1.0, size=(k, 4))
        weights /= weights.sum(axis=0)
        h_deg = h_deg + spec.wobble_deg * np.einsum(
            "kj,nkj->nj", weights, np.sin(2.0 * math.pi * freqs[None] * t[:, None, None] + phases[None])
        )
    return np.radians(h_deg)


def lean_profile(spec: SyntheticScenario, t: np.ndarray) -> np.ndarray:
    return _profile(np.asarray(spec.lean_knots, dtype=float), t)[:, 0]


def shoulder_position(s: float, torso: TorsoParams) -> np.ndarray:
    if abs(s) >= torso.l_SH:
        raise ConfigError(f"lean displacement {s} m exceeds the trunk length")
    return np.array([-torso.l_PH, -s, math.sqrt(torso.l_SH**2 - s * s)])


def solve_passive(geom: RobotGeometry, q1: float, q2: float, q3: float, direction) -> tuple[float, float]:
    """Passive angles (q4, q5) aligning the frame-5 cuff axis with ``direction``.

    In frame 3 the cuff axis is (cos q4 cos q5, sin q4 cos q5, -sin q5); the
    branch cos q5 >= 0 is returned. A direction along the q4 axis (z3) leaves
    q4 undetermined: a :class:`GimbalDegeneracy` warning is emitted and q4 = 0.
    """
    d = np.asarray(direction, dtype=float)
    n = np.linalg.norm(d)
    if not n > 1e-12:
        raise NumericError("cuff direction is not normalisable")
    R03 = chain_transforms(geom, RobotJointState(q1, q2, q3))[3][:3, :3]
    d3 = R03.T @ (d / n)
    horiz = math.hypot(d3[0], d3[1])
    q5 = math.atan2(-d3[2], horiz)
    if horiz < 1e-12:
        warnings.warn(GimbalDegeneracy("cuff axis parallel to the q4 axis; q4 set to 0"), stacklevel=2)
        return 0.0, q5
    return math.atan2(d3[1], d3[0]), q5


def robot_joints_for_cuff(geom: RobotGeometry, pE_R, pW_R) -> RobotJointState:
    """All five robot joints placing p6 at ``pE_R`` and the cuff axis along ``pW_R - pE_R``.

    The joint-4 point follows from the cuff pose once q1 is known, since the
    only frame-dependent offsets are ``-l4 z3`` and ``d5 z4`` with
    ``z3 = (sin q1, -cos q1, 0)`` and ``z4 = unit(z3 x d)``. q1 itself must
    equal the azimuth of that point, which is solved by fixed-point iteration.
    """
    pE = np.asarray(pE_R, dtype=float)
    d = np.asarray(pW_R, dtype=float) - pE
    d = d / np.linalg.norm(d)
    c6 = geom.cuff_offsets[0]

    def joint4_point(q1: float) -> np.ndarray:
        z3 = np.array([math.sin(q1), -math.cos(q1), 0.0])
        n = np.cross(z3, d)
        nn = np.linalg.norm(n)
        if nn < 1e-9:
            raise WorkspaceViolation("cuff axis parallel to the q4 axis")
        return pE - (c6 + geom.l5) * d - geom.d5 * n / nn + geom.l4 * z3

    q1 = math.atan2(pE[1], pE[0])
    step = math.inf
    for _ in range(_FIXED_POINT_ITERS):
        p = joint4_point(q1)
        step = float(wrap_angle(math.atan2(p[1], p[0]) - q1))
        q1 += step
        if abs(step) < _FIXED_POINT_TOL:
            break
    if abs(step) > 1e-12:
        raise WorkspaceViolation("base angle iteration did not converge")
    p3 = joint4_point(q1)
    try:
        q1_ik, q2, q3 = ik_active(geom, p3)
    except Unreachable as exc:
        raise WorkspaceViolation(str(exc)) from exc
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GimbalDegeneracy)
        q4, q5 = solve_passive(geom, q1_ik, q2, q3, d)
    return RobotJointState(q1_ik, q2, q3, q4, q5)


def generate_scenario(
    spec: SyntheticScenario, setup: SceneSetup, seed: int = 0, closure_tol: float = 1e-9
) -> list[TrajectorySample]:
    t = spec.times()
    h_all = arm_profile(spec, t, seed)
    lean = lean_profile(spec, t)
    calib = setup.calibration_pelvis
    R_PR, t_PR = calib.rotation, calib.translation
    samples = []
    for ti, h_row, s in zip(t, h_all, lean):
        h = HumanJointAngles.from_array(h_row)
        shoulder = shoulder_position(float(s), setup.torso)
        arm = human_fk(setup.human, h)
        pE_R = R_PR.T @ (shoulder + arm.elbow - t_PR)
        pW_R = R_PR.T @ (shoulder + arm.wrist - t_PR)
        try:
            q = robot_joints_for_cuff(setup.geometry, pE_R, pW_R)
        except WorkspaceViolation as exc:
            raise WorkspaceViolation(f"t={ti:.3f} s: {exc}") from exc
        pts = fk_chain(setup.geometry, q)
        err = max(np.linalg.norm(pts.p6.as_array() - pE_R), np.linalg.norm(pts.p7.as_array() - pW_R))
        if err > closure_tol:
            raise WorkspaceViolation(f"t={ti:.3f} s: cuff closure error {err:.3e} m")
        samples.append(TrajectorySample(float(ti), tuple(q.as_array()), tuple(h_row), tuple(shoulder)))
    return samples
