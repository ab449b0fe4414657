"""Element-wise conformance of the reference analytic expressions.

Both Jacobians and the human gravity vector have reference closed forms. Each
is evaluated verbatim and compared with central finite differences of this
package's kinematics or potential energy; disagreeing elements are listed by
name, so every correction in the production code has a reproducible log entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import human_model as hm
from . import robot_model as rm


@dataclass
class ConformanceReport:
    name: str
    tolerance: float
    max_error: np.ndarray
    notes: list[str] = field(default_factory=list)
    symbol: str = ""

    def _label(self, r: int, c: int) -> str:
        return f"{self.symbol or self.name}{r + 1}{c + 1}"

    @property
    def discrepancies(self) -> list[str]:
        rows, cols = np.nonzero(self.max_error > self.tolerance)
        return [self._label(r, c) for r, c in zip(rows, cols)]

    @property
    def ok(self) -> bool:
        return not self.discrepancies

    def log_lines(self) -> list[str]:
        lines = [f"{self.name}: max element error vs finite differences, tolerance {self.tolerance:g}"]
        for r, row in enumerate(np.atleast_2d(self.max_error)):
            lines.append("  " + "  ".join(f"{self._label(r, c)}={v:.3e}" for c, v in enumerate(row)))
        lines.append("  discrepancies: " + (", ".join(self.discrepancies) or "none"))
        lines.extend("  note: " + n for n in self.notes)
        return lines


def central_difference(fun, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(fun(x))
    J = np.zeros((f0.size, x.size))
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        J[:, j] = (np.atleast_1d(fun(x + e)) - np.atleast_1d(fun(x - e))) / (2.0 * step)
    return J


def printed_human_jacobian(params: hm.HumanArmParams, h: hm.HumanJointAngles) -> np.ndarray:
    """The reference B matrix verbatim, with the undefined sigma_1 in B14 read as lambda_1."""
    s1, c1 = math.sin(h.h1), math.cos(h.h1)
    s2, c2 = math.sin(h.h2), math.cos(h.h2)
    s3, c3 = math.sin(h.h3), math.cos(h.h3)
    s4, c4 = math.sin(h.h4), math.cos(h.h4)
    lU, f = params.l_U, 0.5 * params.l_F
    lam1 = c1 * c3 - s1 * s2 * s3
    lam2 = c3 * s1 + c1 * s2 * s3
    return np.array(
        [
            [
                lU * c1 * c2 - f * c4 * lam2 - f * c1 * c2 * s4,
                f * s1 * s2 * s4 - lU * s1 * s2 - f * c2 * c4 * s1 * s3,
                -f * c4 * (c1 * s3 + c3 * s1 * s2),
                -f * s4 * lam1 - f * c2 * c4 * s1,
            ],
            [
                lU * c2 * s1 + f * c4 * lam1 - f * c2 * s1 * s4,
                lU * c1 * s2 - f * c1 * s2 * s4 + f * c1 * c2 * c4 * s3,
                -f * c4 * (s1 * s3 + c1 * c3 * s2),
                f * c1 * c2 * c4 - f * s4 * lam2,
            ],
            [
                0.0,
                f * c2 * s4 - lU * c2 + f * c4 * s2 * s3,
                -f * c2 * c3 * c4,
                f * c4 * s2 + f * c2 * s3 * s4,
            ],
        ]
    )


def printed_human_gravity(params: hm.HumanArmParams, h: hm.HumanJointAngles, g21_reading: str = "sum") -> np.ndarray:
    """The reference gravity vector.

    The second entry prints ``l_U cos(h2) l_F COM_F cos(h4) ...`` with no
    operator between the two factors. ``g21_reading="sum"`` inserts ``+``;
    ``"product"`` multiplies them as literally juxtaposed.
    """
    s2, c2 = math.sin(h.h2), math.cos(h.h2)
    s3, c3 = math.sin(h.h3), math.cos(h.h3)
    s4, c4 = math.sin(h.h4), math.cos(h.h4)
    g, lU, lF = params.g, params.l_U, params.l_F
    mU, mL, cU, cF = params.m_U, params.m_F, params.com_U, params.com_F
    if g21_reading == "sum":
        inner = lF * cF * c2 * s4 - lU * c2 + lF * cF * c4 * s2 * s3
    elif g21_reading == "product":
        inner = lF * cF * c2 * s4 - lU * c2 * lF * cF * c4 * s2 * s3
    else:
        raise ValueError("g21_reading must be 'sum' or 'product'")
    g21 = g * (mL * inner - lU * cU * mU * c2)
    g31 = -lF * cF * mL * c2 * c3 * c4 * g
    g41 = g * mL * (lF * cF * c4 * s2 + lF * cF * c2 * s3 * s4)
    return np.array([0.0, g21, g31, g41])


def robot_jacobian_conformance(
    geom: rm.RobotGeometry, poses: np.ndarray, tol: float = 1e-5, step: float = 1e-6
) -> ConformanceReport:
    def p3(q):
        return rm.fk_chain(geom, rm.RobotJointState(q[0], q[1], q[2])).p3.as_array()

    worst = np.zeros((3, 3))
    for q in poses:
        fd = central_difference(p3, q, step)
        worst = np.maximum(worst, np.abs(rm.jacobian_active(geom, *q) - fd))
    return ConformanceReport("A", tol, worst)


def human_jacobian_conformance(
    params: hm.HumanArmParams, postures: np.ndarray, tol: float = 1e-5, step: float = 1e-6, printed: bool = False
) -> ConformanceReport:
    """Compare a Jacobian against finite differences of the cuff position.

    ``printed=True`` checks the verbatim reference matrix, otherwise the
    production :func:`human_model.human_jacobian`.
    """
    jac = printed_human_jacobian if printed else hm.human_jacobian

    def cuff(h):
        return hm.human_fk(params, hm.HumanJointAngles.from_array(h)).cuff

    worst = np.zeros((3, 4))
    for h in postures:
        fd = central_difference(cuff, h, step)
        worst = np.maximum(worst, np.abs(jac(params, hm.HumanJointAngles.from_array(h)) - fd))
    report = ConformanceReport("B (as printed)" if printed else "B", tol, worst, symbol="B")
    report.notes.append("sigma_1 in B14 read as lambda_1")
    if printed:
        report.notes.append(
            "B23 as printed, -(lF/2)cos h4 (sin h1 sin h3 + cos h1 cos h3 sin h2), is not integrable together with "
            "B22 (mixed partials d/dh3 B22 and d/dh2 B23 differ in sign); production code uses "
            "-(lF/2)cos h4 (sin h1 sin h3 - cos h1 cos h3 sin h2)"
        )
    return report


def human_gravity_conformance(
    params: hm.HumanArmParams, postures: np.ndarray, tol: float = 1e-6, step: float = 1e-6, g21_reading: str = "sum"
) -> ConformanceReport:
    """Printed gravity vector against finite differences of the arm potential energy."""

    def energy(h):
        return hm.potential_energy(params, hm.HumanJointAngles.from_array(h))

    worst = np.zeros((4, 1))
    for h in postures:
        fd = central_difference(energy, h, step)[0]
        printed = printed_human_gravity(params, hm.HumanJointAngles.from_array(h), g21_reading)
        worst = np.maximum(worst, np.abs(printed - fd)[:, None])
    report = ConformanceReport(f"G (as printed, G21 read as {g21_reading})", tol, worst, symbol="G")
    report.notes.append("G21 prints two factors with no operator between them")
    return report


def full_report(seed: int = 0, n: int = 100) -> list[str]:
    """Conformance log for all reference closed forms at default parameters."""
    rng = np.random.default_rng(seed)
    geom = rm.RobotGeometry()
    params = hm.HumanArmParams()
    poses = rng.uniform(-math.pi, math.pi, size=(n, 3))
    postures = rng.uniform(-math.pi, math.pi, size=(n, 4))
    lines: list[str] = []
    for report in (
        robot_jacobian_conformance(geom, poses),
        human_jacobian_conformance(params, postures, printed=True),
        human_jacobian_conformance(params, postures),
        human_gravity_conformance(params, postures, g21_reading="sum"),
        human_gravity_conformance(params, postures, g21_reading="product"),
    ):
        lines.extend(report.log_lines())
    return lines
