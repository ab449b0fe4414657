"""Four-DOF human upper-limb model in the shoulder frame S.

Joint angles: h1 shoulder abduction/adduction, h2 shoulder flexion/extension,
h3 shoulder internal/external rotation, h4 elbow flexion/extension. The frame
S has z pointing up (gravity along -z); at h = 0 the upper arm points along -y
and the forearm along +x.

Positions, with u the upper-arm direction and d the forearm direction::

    u(h)  = (sin h1 cos h2, -cos h1 cos h2, -sin h2)
    d(h)  = cos h4 * a(h1, h2, h3) - sin h4 * u(h1, h2)
    a     = (cos h1 cos h3 - sin h1 sin h2 sin h3,
             cos h3 sin h1 + cos h1 sin h2 sin h3,
             -cos h2 sin h3)
    elbow = l_U u,  cuff = elbow + (l_F / 2) d,  wrist = elbow + l_F d

This is the position function whose Jacobian at the cuff point is the
analytic 3x4 matrix in :func:`human_jacobian`; it is certified against finite
differences in the test suite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateJacobian, ElevationSingularity, InconsistentLengths

PINV_RCOND = 1e-8


@dataclass(frozen=True)
class HumanArmParams:
    l_U: float = 0.2991
    l_F: float = 0.2643
    # segment fractions of a 75.05 kg body: upper arm 2.8 %, forearm+hand 2.2 %
    m_U: float = 2.10
    m_F: float = 1.65
    com_U: float = 0.436
    com_F: float = 0.682
    g: float = 9.81

    def __post_init__(self):
        if not (self.l_U > 0 and self.l_F > 0):
            raise ValueError("segment lengths must be positive")
        if not (self.m_U >= 0 and self.m_F >= 0):
            raise ValueError("segment masses must be >= 0")
        if not (0 <= self.com_U <= 1 and 0 <= self.com_F <= 1):
            raise ValueError("COM ratios must lie in [0, 1]")


@dataclass(frozen=True)
class HumanJointAngles:
    h1: float
    h2: float
    h3: float
    h4: float

    @classmethod
    def from_array(cls, h) -> HumanJointAngles:
        return cls(*(float(v) for v in h))

    def as_array(self) -> np.ndarray:
        return np.array([self.h1, self.h2, self.h3, self.h4])


@dataclass(frozen=True)
class SupportForce:
    """Support force at the cuff point, in the shoulder frame (N)."""

    fx: float
    fy: float
    fz: float
    rank_deficient: bool = False
    residual: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.fx, self.fy, self.fz])


@dataclass(frozen=True)
class HumanPoints:
    elbow: np.ndarray
    cuff: np.ndarray
    wrist: np.ndarray


def _trig(h: HumanJointAngles):
    return (
        math.sin(h.h1), math.cos(h.h1),
        math.sin(h.h2), math.cos(h.h2),
        math.sin(h.h3), math.cos(h.h3),
        math.sin(h.h4), math.cos(h.h4),
    )  # fmt: skip


def upper_arm_direction(h1: float, h2: float) -> np.ndarray:
    c2 = math.cos(h2)
    return np.array([math.sin(h1) * c2, -math.cos(h1) * c2, -math.sin(h2)])


def _rotation_basis(h1: float, h2: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors spanning the plane normal to the upper arm: a(h3=0), a(h3=pi/2)."""
    s1, c1, s2, c2 = math.sin(h1), math.cos(h1), math.sin(h2), math.cos(h2)
    return np.array([c1, s1, 0.0]), np.array([-s1 * s2, c1 * s2, -c2])


def forearm_direction(h: HumanJointAngles) -> np.ndarray:
    s1, c1, s2, c2, s3, c3, s4, c4 = _trig(h)
    lam1 = c1 * c3 - s1 * s2 * s3
    lam2 = c3 * s1 + c1 * s2 * s3
    return np.array([c4 * lam1 - s1 * c2 * s4, c4 * lam2 + c1 * c2 * s4, s2 * s4 - c2 * s3 * c4])


def human_fk(params: HumanArmParams, h: HumanJointAngles) -> HumanPoints:
    elbow = params.l_U * upper_arm_direction(h.h1, h.h2)
    d = forearm_direction(h)
    return HumanPoints(elbow=elbow, cuff=elbow + 0.5 * params.l_F * d, wrist=elbow + params.l_F * d)


def human_ik(pE, pW, l_U_cal: float, l_F: float, forearm_slack: float = 0.05) -> HumanJointAngles:
    """Joint angles placing the elbow at ``pE`` and the wrist at ``pW`` (frame S).

    Branch: h2 in [-pi/2, pi/2] and h4 in [-pi/2, pi/2]. The forearm vector is
    re-normalised, so ``|pW - pE|`` may differ from ``l_F`` by up to
    ``forearm_slack * l_F``. When the forearm is collinear with the upper arm
    h3 is indeterminate and returned as 0.
    """
    pE = np.asarray(pE, dtype=float)
    pW = np.asarray(pW, dtype=float)
    if abs(np.linalg.norm(pE) - l_U_cal) >= 1e-6 * l_U_cal:
        raise InconsistentLengths(f"|pE| = {np.linalg.norm(pE):.9g} differs from l_U_cal = {l_U_cal:.9g}")
    forearm = pW - pE
    fl = np.linalg.norm(forearm)
    if abs(fl - l_F) > forearm_slack * l_F:
        raise InconsistentLengths(f"|pW - pE| = {fl:.6g} m, expected l_F = {l_F:.6g} m (+-{forearm_slack:.0%})")

    u = pE / l_U_cal
    cos_h2 = math.hypot(u[0], u[1])
    if cos_h2 < 1e-6:
        raise ElevationSingularity("elbow on the vertical through the shoulder; h1 and h3 indeterminate")
    h2 = math.atan2(-u[2], cos_h2)
    h1 = math.atan2(u[0], -u[1])

    d = forearm / fl
    # d = cos h4 * a(h3) - sin h4 * u, with a normal to u
    h4 = math.asin(float(np.clip(-d @ u, -1.0, 1.0)))
    a0, a1 = _rotation_basis(h1, h2)
    x, y = float(d @ a0), float(d @ a1)
    h3 = math.atan2(y, x) if math.hypot(x, y) > 1e-12 else 0.0
    return HumanJointAngles(h1, h2, h3, h4)


def human_jacobian(params: HumanArmParams, h: HumanJointAngles) -> np.ndarray:
    """3x4 Jacobian of the cuff point with respect to (h1, h2, h3, h4)."""
    s1, c1, s2, c2, s3, c3, s4, c4 = _trig(h)
    lU, f = params.l_U, 0.5 * params.l_F
    lam1 = c1 * c3 - s1 * s2 * s3
    lam2 = c3 * s1 + c1 * s2 * s3

    b11 = lU * c1 * c2 - f * c4 * lam2 - f * c1 * c2 * s4
    b12 = f * s1 * s2 * s4 - lU * s1 * s2 - f * c2 * c4 * s1 * s3
    b13 = -f * c4 * (c1 * s3 + c3 * s1 * s2)
    b14 = -f * s4 * lam1 - f * c2 * c4 * s1
    b21 = lU * c2 * s1 + f * c4 * lam1 - f * c2 * s1 * s4
    b22 = lU * c1 * s2 - f * c1 * s2 * s4 + f * c1 * c2 * c4 * s3
    # sign of the c1*c3*s2 term chosen so that B is the derivative of the cuff position
    b23 = -f * c4 * (s1 * s3 - c1 * c3 * s2)
    b24 = f * c1 * c2 * c4 - f * s4 * lam2
    b32 = f * c2 * s4 - lU * c2 + f * c4 * s2 * s3
    b33 = -f * c2 * c3 * c4
    b34 = f * c4 * s2 + f * c2 * s3 * s4
    return np.array([[b11, b12, b13, b14], [b21, b22, b23, b24], [0.0, b32, b33, b34]])


def potential_energy(params: HumanArmParams, h: HumanJointAngles) -> float:
    u = upper_arm_direction(h.h1, h.h2)
    d = forearm_direction(h)
    z_upper = params.com_U * params.l_U * u[2]
    z_fore = params.l_U * u[2] + params.com_F * params.l_F * d[2]
    return params.g * (params.m_U * z_upper + params.m_F * z_fore)


def human_gravity(params: HumanArmParams, h: HumanJointAngles) -> np.ndarray:
    """Gravity torque vector dU/dh (N m); the first entry is identically 0."""
    s1, c1, s2, c2, s3, c3, s4, c4 = _trig(h)
    g, lU, lF = params.g, params.l_U, params.l_F
    mU, mF, cU, cF = params.m_U, params.m_F, params.com_U, params.com_F
    g2 = g * (mF * (lF * cF * c2 * s4 - lU * c2 + lF * cF * c4 * s2 * s3) - lU * cU * mU * c2)
    g3 = -lF * cF * mF * c2 * c3 * c4 * g
    g4 = g * mF * (lF * cF * c4 * s2 + lF * cF * c2 * s3 * s4)
    return np.array([0.0, g2, g3, g4])


def pinv(A: np.ndarray, rcond: float = PINV_RCOND) -> tuple[np.ndarray, int]:
    """Moore-Penrose pseudo-inverse by SVD; returns (A^+, numerical rank)."""
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    cutoff = rcond * s[0] if s.size else 0.0
    keep = s > cutoff
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (Vt.T * s_inv) @ U.T, int(keep.sum())


def support_force(params: HumanArmParams, h: HumanJointAngles) -> SupportForce:
    """Cuff force whose joint-space image best matches the arm's gravity torques.

    Solves ``J_h^T F = G_h`` in the least-squares sense with the pseudo-inverse.
    A rank-deficient Jacobian raises a :class:`DegenerateJacobian` warning and
    the minimum-norm solution is still returned.
    """
    JT = human_jacobian(params, h).T
    G = human_gravity(params, h)
    JT_pinv, rank = pinv(JT)
    F = JT_pinv @ G
    deficient = rank < 3
    if deficient:
        warnings.warn(DegenerateJacobian(f"human Jacobian rank {rank} at h={h}"), stacklevel=2)
    residual = float(np.linalg.norm(JT @ F - G))
    return SupportForce(float(F[0]), float(F[1]), float(F[2]), rank_deficient=deficient, residual=residual)
