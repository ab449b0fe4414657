"""Kinematic and gravity model of the 5-DOF ARAE end-effector robot.

The parallelogram drive is modelled as its serial equivalent: five revolute
joints described by a fixed Denavit-Hartenberg table, three of them actuated
(q1 base yaw, q2 and q3 on the parallelogram) and two passive encoders (q4,
q5) in the end-effector module. Because of the parallelogram, the third D-H
angle is not q3 itself but the coupled angle ``q22 = q3 + q2 + pi/2``, which
makes q3 the absolute orientation of the distal link in the arm plane.

Points returned by :func:`fk_chain`:

* ``p3`` origin of D-H frame 3, the joint-4 point used by the IK and the
  active-joint Jacobian;
* ``p5`` origin of frame 5;
* ``p6``, ``p7`` the two cuff endpoints, offset from ``p5`` along the frame-5
  x axis (the forearm-support axis) by ``RobotGeometry.cuff_offsets``.

All distances are in metres and all angles in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BaseSingularity, JointLimitViolation, Unreachable
from .frames import CartesianPoint, Frame, wrap_angle

GRAVITY = 9.81
_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class RobotGeometry:
    l1: float = 0.068
    l21: float = 0.43
    l22: float = 0.446
    l31: float = 0.1
    l32: float = 0.43
    l4: float = 0.111
    l5: float = 0.0895
    d5: float = 0.01
    # p6/p7 positions along the frame-5 x axis; the default spans one mean forearm
    # (0.2643 m) centred on frame 5
    cuff_offsets: tuple[float, float] = (-0.13215, 0.13215)

    def __post_init__(self):
        lengths = (self.l1, self.l21, self.l22, self.l31, self.l32, self.l4, self.l5, self.d5)
        if not all(math.isfinite(v) and v > 0 for v in lengths):
            raise ValueError("all robot link lengths must be finite and positive")
        if self.l22 <= self.l31:
            raise ValueError("l22 must exceed l31 (distal link l22 - l31 must be positive)")
        object.__setattr__(self, "cuff_offsets", tuple(float(c) for c in self.cuff_offsets))
        if len(self.cuff_offsets) != 2 or self.cuff_offsets[1] <= self.cuff_offsets[0]:
            raise ValueError("cuff_offsets must be two increasing offsets (elbow end, wrist end)")

    @property
    def distal(self) -> float:
        """Effective distal link length l22 - l31."""
        return self.l22 - self.l31

    @property
    def cuff_length(self) -> float:
        return self.cuff_offsets[1] - self.cuff_offsets[0]

    @property
    def reach(self) -> tuple[float, float]:
        """(min, max) distance of p3 from the shoulder joint point (0, 0, l1)."""
        return abs(self.l21 - self.distal), self.l21 + self.distal

    @classmethod
    def with_cuff_length(cls, cuff_length: float, **kwargs) -> RobotGeometry:
        half = 0.5 * cuff_length
        return cls(cuff_offsets=(-half, half), **kwargs)


@dataclass(frozen=True)
class JointLimits:
    """Optional protective-stop ranges, ``{name: (lo, hi)}``; unlisted joints are free."""

    ranges: dict = field(default_factory=dict)

    def check(self, joints: RobotJointState) -> None:
        for name, (lo, hi) in self.ranges.items():
            v = getattr(joints, name)
            if not lo <= v <= hi:
                raise JointLimitViolation(f"{name}={v:.6g} outside [{lo:.6g}, {hi:.6g}]")


@dataclass(frozen=True)
class RobotJointState:
    q1: float
    q2: float
    q3: float
    q4: float = 0.0
    q5: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_array()):
            raise ValueError(f"non-finite joint angle in {self}")

    @classmethod
    def from_array(cls, q) -> RobotJointState:
        q = [float(v) for v in q]
        return cls(*q)

    def as_array(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.q3, self.q4, self.q5])

    @property
    def active(self) -> tuple[float, float, float]:
        return self.q1, self.q2, self.q3


@dataclass(frozen=True)
class DHRow:
    theta: float
    alpha: float
    a: float
    d: float


@dataclass(frozen=True)
class LinkMass:
    mass: float = 0.0
    com: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.mass >= 0:
            raise ValueError("link mass must be >= 0")
        object.__setattr__(self, "com", tuple(float(c) for c in self.com))


@dataclass(frozen=True)
class RobotMassModel:
    """Mass and local-frame COM of each of the five serial-equivalent links."""

    links: tuple[LinkMass, ...] = (LinkMass(),) * 5

    def __post_init__(self):
        if len(self.links) != 5:
            raise ValueError("RobotMassModel needs exactly 5 links")

    @classmethod
    def zero(cls) -> RobotMassModel:
        return cls()

    @property
    def is_zero(self) -> bool:
        return all(link.mass == 0 for link in self.links)


@dataclass(frozen=True)
class RobotPoints:
    p3: CartesianPoint
    p5: CartesianPoint
    p6: CartesianPoint
    p7: CartesianPoint
    frames: tuple  # cumulative base-to-frame-i transforms, i = 0..5


def coupled_joint_angle(q2: float, q3: float) -> float:
    """Parallelogram coupling: the D-H angle of the distal link."""
    return q3 - (_HALF_PI - q2) + math.pi


def dh_table(geom: RobotGeometry, joints: RobotJointState) -> list[DHRow]:
    q22 = coupled_joint_angle(joints.q2, joints.q3)
    return [
        DHRow(joints.q1, _HALF_PI, 0.0, geom.l1),
        DHRow(_HALF_PI - joints.q2, 0.0, geom.l21, 0.0),
        DHRow(q22, 0.0, geom.distal, 0.0),
        DHRow(joints.q4, -_HALF_PI, 0.0, -geom.l4),
        DHRow(joints.q5, 0.0, geom.l5, geom.d5),
    ]


def dh_transform(row: DHRow) -> np.ndarray:
    ct, st = math.cos(row.theta), math.sin(row.theta)
    ca, sa = math.cos(row.alpha), math.sin(row.alpha)
    return np.array(
        [
            [ct, -ca * st, sa * st, row.a * ct],
            [st, ca * ct, -sa * ct, row.a * st],
            [0.0, sa, ca, row.d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def chain_transforms(geom: RobotGeometry, joints: RobotJointState) -> list[np.ndarray]:
    """Cumulative transforms [T0_0, T0_1, ..., T0_5]."""
    frames = [np.eye(4)]
    for row in dh_table(geom, joints):
        frames.append(frames[-1] @ dh_transform(row))
    return frames


def fk_chain(geom: RobotGeometry, joints: RobotJointState) -> RobotPoints:
    frames = chain_transforms(geom, joints)
    T05 = frames[5]
    axis = T05[:3, 0]
    p5 = T05[:3, 3]
    c6, c7 = geom.cuff_offsets
    R = Frame.ROBOT
    return RobotPoints(
        p3=CartesianPoint.from_array(frames[3][:3, 3], R),
        p5=CartesianPoint.from_array(p5, R),
        p6=CartesianPoint.from_array(p5 + c6 * axis, R),
        p7=CartesianPoint.from_array(p5 + c7 * axis, R),
        frames=tuple(frames),
    )


def ik_active(geom: RobotGeometry, p3, elbow: str = "up") -> tuple[float, float, float]:
    """Closed-form active-joint IK from the joint-4 point ``p3`` (robot frame).

    ``elbow="up"`` is the configuration given by the positive square roots
    (link 2 above the line from the shoulder joint to p3, q22 in [-pi, 0]).
    ``elbow="down"`` takes the negative roots and returns the mirror
    configuration reaching the same point. q3 is wrapped to [-pi, pi).
    """
    if isinstance(p3, CartesianPoint):
        p3 = p3.require(Frame.ROBOT)
    x, y, z = (float(v) for v in p3)
    if elbow not in ("up", "down"):
        raise ValueError("elbow must be 'up' or 'down'")
    branch = 1.0 if elbow == "up" else -1.0

    rho = math.hypot(x, y)
    if rho < 1e-12:
        raise BaseSingularity(f"p3=({x:.4g}, {y:.4g}, {z:.4g}) lies on the base axis; q1 undefined")
    l21, l3 = geom.l21, geom.distal
    delta = (z - geom.l1) ** 2 + rho**2
    dist = math.sqrt(delta)
    lo, hi = geom.reach
    slack = 1e-12 * hi
    if not lo - slack <= dist <= hi + slack:
        raise Unreachable(f"|p3 - shoulder| = {dist:.6g} m outside reach [{lo:.6g}, {hi:.6g}]")

    q1 = math.atan2(y, x)
    cos_a = np.clip((l21**2 + delta - l3**2) / (2.0 * l21 * dist), -1.0, 1.0)
    sin_a = branch * math.sqrt(1.0 - cos_a**2)
    shoulder_angle = math.atan2(z - geom.l1, rho) + math.atan2(sin_a, cos_a)
    q2 = _HALF_PI - shoulder_angle

    cos_22 = np.clip((delta - l21**2 - l3**2) / (2.0 * l21 * l3), -1.0, 1.0)
    sin_22 = branch * math.sqrt(1.0 - cos_22**2)
    q22 = -math.atan2(sin_22, cos_22)
    q3 = shoulder_angle - math.pi + q22
    return q1, float(wrap_angle(q2)), float(wrap_angle(q3))


def jacobian_active(geom: RobotGeometry, q1: float, q2: float, q3: float) -> np.ndarray:
    """Analytic 3x3 Jacobian of p3 with respect to (q1, q2, q3)."""
    s1, c1 = math.sin(q1), math.cos(q1)
    sg1 = math.cos(q2 - _HALF_PI)
    sg2 = math.sin(q2 - _HALF_PI)
    beta = q2 + q3 + _HALF_PI
    cb, sb = math.cos(beta), math.sin(beta)
    l21, L = geom.l21, geom.distal

    a11 = -l21 * sg1 * s1 - cb * sg1 * s1 * L - sb * s1 * sg2 * L
    a12 = -l21 * c1 * sg2
    a13 = cb * c1 * sg2 * L - sb * c1 * sg1 * L
    a21 = l21 * c1 * sg1 + cb * c1 * sg1 * L + sb * c1 * sg2 * L
    a22 = -l21 * s1 * sg2
    a23 = cb * s1 * sg2 * L - sb * sg1 * s1 * L
    a32 = -l21 * sg1
    a33 = cb * sg1 * L + sb * sg2 * L
    return np.array([[a11, a12, a13], [a21, a22, a23], [0.0, a32, a33]])


def _com_positions(mass: RobotMassModel, frames) -> list[np.ndarray]:
    return [frames[i + 1][:3, :3] @ np.asarray(link.com) + frames[i + 1][:3, 3] for i, link in enumerate(mass.links)]


def potential_energy(mass: RobotMassModel, geom: RobotGeometry, joints: RobotJointState, g: float = GRAVITY) -> float:
    frames = chain_transforms(geom, joints)
    return g * sum(link.mass * p[2] for link, p in zip(mass.links, _com_positions(mass, frames)))


def gravity_torque_robot(
    mass: RobotMassModel, geom: RobotGeometry, joints: RobotJointState, g: float = GRAVITY
) -> np.ndarray:
    """Holding torques of the three motors: the gradient of the structure's
    potential energy with respect to (q1, q2, q3), passive joints frozen.

    Column derivatives of each COM come from the revolute-joint rule
    dp/dtheta_k = z_{k-1} x (p - o_{k-1}), chained through theta2 = pi/2 - q2
    and theta3 = q22(q2, q3).
    """
    tau = np.zeros(3)
    if mass.is_zero:
        return tau
    frames = chain_transforms(geom, joints)
    axes = [T[:3, 2] for T in frames]
    origins = [T[:3, 3] for T in frames]
    for i, (link, p) in enumerate(zip(mass.links, _com_positions(mass, frames)), start=1):
        if link.mass == 0:
            continue
        d_theta = [np.cross(axes[k], p - origins[k]) for k in range(min(i, 3))]
        dq1 = d_theta[0]
        dq2 = -d_theta[1] if i >= 2 else np.zeros(3)
        dq3 = np.zeros(3)
        if i >= 3:
            dq2 = dq2 + d_theta[2]
            dq3 = d_theta[2]
        tau += g * link.mass * np.array([dq1[2], dq2[2], dq3[2]])
    return tau
