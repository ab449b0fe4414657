"""Acceptance suite: one verdict line per criterion, tolerances pinned below.

Run directly with ``python tests/test_acceptance.py`` or as part of pytest; the
verdict lines are repeated in the terminal summary.
"""

import json
import math
import subprocess
import sys
import time
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from acceptance_log import record
from arae.conformance import (
    central_difference,
    human_jacobian_conformance,
    robot_jacobian_conformance,
)
from arae.control import control_step
from arae.errors import DegenerateJacobian, NoIntersection
from arae.frames import wrap_angle
from arae.harness.config import FilterConfig, default_config
from arae.harness.emg import envelope
from arae.harness.evaluate import evaluate
from arae.harness.metrics import GROUP_LABELS, delta_mav, mav
from arae.harness.scenario import SceneSetup, SyntheticScenario, generate_scenario
from arae.human_model import (
    HumanArmParams,
    HumanJointAngles,
    human_gravity,
    human_jacobian,
    potential_energy as human_potential,
    support_force,
)
from arae.pose_estimation import TorsoParams, solve_shoulder_sagittal
from arae.robot_model import (
    LinkMass,
    RobotGeometry,
    RobotJointState,
    RobotMassModel,
    fk_chain,
    gravity_torque_robot,
    ik_active,
    potential_energy as robot_potential,
)

import oracles

ROOT = Path(__file__).resolve().parent.parent
SEED = 20241015

FKIK_POS_TOL = 1e-9  # m
FKIK_ANGLE_TOL = 1e-9  # rad
FKIK_TIME = 1.0  # s
JACOBIAN_TOL = 1e-5
GRAVITY_TOL = 1e-6  # N m
PINV_TOL = 1e-9  # N m
CERT_TOL = 1e-9  # m
EXACT_MAE = 1e-4  # deg
FIXED_LEAN_MAE = 1.0  # deg
SCENE_TIME = 10.0  # s
NOTCH_DB = 40.0
TONE_REL = 0.05

GEOM = RobotGeometry()
HUMAN = HumanArmParams()
ROBOT_MASS = RobotMassModel(
    (
        LinkMass(1.2, (0.0, -0.02, 0.01)),
        LinkMass(0.9, (-0.2, 0.0, 0.03)),
        LinkMass(0.7, (-0.15, 0.01, 0.0)),
        LinkMass(0.4, (0.0, 0.02, -0.03)),
        LinkMass(0.3, (-0.04, 0.0, 0.01)),
    )
)


def _postures(rng, n):
    h = rng.uniform(-math.pi, math.pi, (n, 4))
    h[:, [1, 3]] = rng.uniform(-math.pi / 2 + 0.05, math.pi / 2 - 0.05, (n, 2))
    return h


def _scene(name, seed=0):
    cfg = default_config()
    c = cfg.controller
    spec = SyntheticScenario.from_dict(json.loads((ROOT / "scenarios" / f"{name}.json").read_text()))
    return cfg, spec, generate_scenario(spec, SceneSetup(c.geometry, c.human, c.calibration_pelvis, c.torso), seed=seed)


def test_criterion_01_fk_ik_roundtrip():
    rng = np.random.default_rng(SEED)
    qs = []
    while len(qs) < 1000:
        q1, q2 = rng.uniform(-math.pi, math.pi, 2)
        q3 = float(wrap_angle(rng.uniform(-math.pi + 0.05, -0.05) - q2 - math.pi / 2))
        if GEOM.l21 * math.sin(q2) - GEOM.distal * math.cos(q3) > 0.02:
            qs.append((q1, q2, q3))
    start = time.perf_counter()
    pos_err = ang_err = 0.0
    for q in qs:
        p3 = fk_chain(GEOM, RobotJointState(*q)).p3
        sol = ik_active(GEOM, p3)
        back = fk_chain(GEOM, RobotJointState(*sol)).p3
        pos_err = max(pos_err, float(np.linalg.norm(back.as_array() - p3.as_array())))
        ang_err = max(ang_err, float(np.max(np.abs(wrap_angle(np.array(sol) - q)))))
    elapsed = time.perf_counter() - start
    ok = pos_err < FKIK_POS_TOL and ang_err < FKIK_ANGLE_TOL and elapsed < FKIK_TIME
    record(1, ok, f"1000 poses, max pos err {pos_err:.2e} m, max angle err {ang_err:.2e} rad, {elapsed:.3f} s")
    assert ok


def test_criterion_02_robot_jacobian_conformance():
    rng = np.random.default_rng(SEED + 2)
    report = robot_jacobian_conformance(GEOM, rng.uniform(-math.pi, math.pi, (100, 3)), tol=JACOBIAN_TOL)
    worst = float(report.max_error.max())
    ok = worst < JACOBIAN_TOL and report.ok
    record(2, ok, f"A vs FD at 100 poses, max element err {worst:.2e}; discrepancies: {report.discrepancies or 'none'}")
    assert ok


def _human_jacobian_reports():
    postures = np.random.default_rng(SEED + 3).uniform(-math.pi, math.pi, (100, 4))
    printed = human_jacobian_conformance(HUMAN, postures, tol=JACOBIAN_TOL, printed=True)
    production = human_jacobian_conformance(HUMAN, postures, tol=JACOBIAN_TOL)
    return printed, production


def test_criterion_03_human_jacobian_conformance():
    """The verbatim reference matrix is checked element by element.

    It disagrees with the finite differences in B23 alone, and no position
    function can have it as its Jacobian (B22 and B23 violate the mixed-partial
    symmetry). The verdict therefore reports FAIL, while the sign-corrected
    production matrix and the conformance log are asserted in the companion
    test below.
    """
    printed, production = _human_jacobian_reports()
    ok = printed.ok
    record(
        3,
        ok,
        f"printed B vs FD at 100 postures: max err {printed.max_error.max():.2e}, "
        f"discrepancies {printed.discrepancies}; sign-corrected B max err {production.max_error.max():.2e}",
    )
    if not ok:
        pytest.xfail("reference B23 has a sign error; logged by the conformance report")


def test_criterion_03_corrected_jacobian_and_log():
    printed, production = _human_jacobian_reports()
    assert production.ok and production.max_error.max() < JACOBIAN_TOL
    assert printed.discrepancies == ["B23"]
    assert any("B23" in line for line in printed.log_lines())


def test_criterion_04_gravity_gradients():
    rng = np.random.default_rng(SEED + 4)
    worst_R = worst_h = 0.0
    for q in rng.uniform(-math.pi, math.pi, (100, 5)):
        fd = central_difference(lambda a, q=q: robot_potential(ROBOT_MASS, GEOM, RobotJointState(*a, q[3], q[4])), q[:3])[0]
        worst_R = max(worst_R, float(np.max(np.abs(gravity_torque_robot(ROBOT_MASS, GEOM, RobotJointState(*q)) - fd))))
    for h in _postures(rng, 100):
        fd = central_difference(lambda x: human_potential(HUMAN, HumanJointAngles.from_array(x)), h)[0]
        worst_h = max(worst_h, float(np.max(np.abs(human_gravity(HUMAN, HumanJointAngles.from_array(h)) - fd))))
    ok = worst_R < GRAVITY_TOL and worst_h < GRAVITY_TOL
    record(4, ok, f"G_R max err {worst_R:.2e} N m, G_h max err {worst_h:.2e} N m (100 poses each)")
    assert ok


def test_criterion_05_pseudo_inverse_law():
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateJacobian)
        for h in _postures(rng, 100):
            hh = HumanJointAngles.from_array(h)
            JT, G = human_jacobian(HUMAN, hh).T, human_gravity(HUMAN, hh)
            ref = oracles.least_squares_force(JT, G)
            worst = max(worst, abs(support_force(HUMAN, hh).residual - float(np.linalg.norm(JT @ ref - G))))
    massless = HumanArmParams(m_U=0.0, m_F=0.0)
    zero = support_force(massless, HumanJointAngles(0.3, 0.4, -0.5, -0.6)).as_array().tolist() == [0.0, 0.0, 0.0]
    cfg, _, samples = _scene("fixed_shoulder")
    c = replace(cfg.controller, human=massless, mass=ROBOT_MASS)
    same = all(
        control_step(RobotJointState.from_array(s.q), mode, c).as_array().tolist()
        == control_step(RobotJointState.from_array(s.q), "transparent", c).as_array().tolist()
        for s in samples[::20]
        for mode in ("fixed", "sagittal")
    )
    ok = worst < PINV_TOL and zero and same
    record(5, ok, f"residual vs SVD least squares max diff {worst:.2e} N m; massless force zero: {zero}; adaptive == transparent: {same}")
    assert ok


def test_criterion_06_sagittal_certificates():
    rng = np.random.default_rng(SEED + 6)
    torso, l_U = TorsoParams(), HUMAN.l_U
    worst = 0.0
    for _ in range(1000):
        lean = rng.uniform(-1.2, 1.2)
        pS = np.array([-torso.l_PH, -torso.l_SH * math.sin(lean), torso.l_SH * math.cos(lean)])
        u = rng.normal(size=3)
        pE = pS + l_U * u / np.linalg.norm(u)
        p = solve_shoulder_sagittal(pE, torso, l_U).point.as_array()
        worst = max(worst, abs(np.linalg.norm(p - torso.hip) - torso.l_SH), abs(np.linalg.norm(p - pE) - l_U))

    tangent = solve_shoulder_sagittal(np.array([-torso.l_PH, 0.0, torso.l_SH + l_U]), torso, l_U)
    tangent_ok = np.allclose(tangent.point.as_array(), torso.upright_shoulder, atol=CERT_TOL) and not tangent.clamped
    on_circle = np.array([-torso.l_PH + l_U, 0.1, math.sqrt(torso.l_SH**2 - 0.01)])
    degenerate_ok = np.allclose(solve_shoulder_sagittal(on_circle, torso, l_U).point.as_array()[1:], on_circle[1:], atol=CERT_TOL)
    try:
        solve_shoulder_sagittal(np.array([-torso.l_PH + l_U, 0.1, 0.2]), torso, l_U)
        degenerate_ok = False
    except NoIntersection:
        pass
    ok = worst < CERT_TOL and tangent_ok and degenerate_ok
    record(6, ok, f"1000 placements, max certificate err {worst:.2e} m; tangent ok: {tangent_ok}; degenerate radius ok: {degenerate_ok}")
    assert ok


def _scene_maes():
    start = time.perf_counter()
    cfg, spec_f, fixed_scene = _scene("fixed_shoulder")
    _, spec_l, lean_scene = _scene("forward_lean")
    fixed_rep = evaluate(fixed_scene, cfg).report["models"]
    lean_rep = evaluate(lean_scene, cfg).report["models"]
    return fixed_rep, lean_rep, min(spec_f.duration, spec_l.duration), time.perf_counter() - start


def test_criterion_07_estimator_exactness():
    fixed_rep, lean_rep, duration, elapsed = _scene_maes()
    a = fixed_rep["fixed"]["mae_mean_deg"]
    b = lean_rep["sagittal"]["mae_mean_deg"]
    c = lean_rep["fixed"]["mae_mean_deg"]
    ok = a < EXACT_MAE and b < EXACT_MAE and c > FIXED_LEAN_MAE and duration >= 10.0 and elapsed < SCENE_TIME
    record(
        7,
        ok,
        f"fixed scene fixed-torso MAE {a:.2e} deg; lean scene sagittal MAE {b:.2e} deg, fixed-torso MAE {c:.2f} deg; "
        f"{duration:.0f} s at 100 Hz per scene, {elapsed:.2f} s",
    )
    assert ok


def test_criterion_08_distance_groups():
    _, lean_rep, _, _ = _scene_maes()
    groups = lean_rep["fixed"]["groups"]
    populated = all(groups[g]["n"] > 0 for g in GROUP_LABELS)
    upper = [groups[g]["mae_deg"] for g in GROUP_LABELS[2:]]
    monotone = populated and all(x < y for x, y in zip(upper, upper[1:]))
    ok = len(GROUP_LABELS) == 7 and populated and monotone
    record(8, ok, "fixed-torso MAE by bin from 100%: " + ", ".join(f"{v:.2f}" for v in upper) + f" deg; all 7 bins populated: {populated}")
    assert ok


def test_criterion_09_emg_chain():
    fs = FilterConfig().fs
    t = np.arange(0, 8.0, 1 / fs)
    mid = slice(len(t) // 4, 3 * len(t) // 4)
    hum = envelope(np.sin(2 * math.pi * 50 * t))
    atten = -20 * math.log10(np.abs(hum[mid]).mean() / (2 / math.pi))
    dc = float(np.abs(envelope(np.full_like(t, 2.0))).max())
    A = 0.5
    tone = float(envelope(A * np.sin(2 * math.pi * 100 * t))[mid].mean())
    rel = abs(tone - 2 * A / math.pi) / (2 * A / math.pi)
    identities = delta_mav(5, 10) == -50.0 and delta_mav(10, 10) == 0.0 and mav(np.ones(50)) == 1.0
    ok = atten >= NOTCH_DB and dc < 1e-6 and rel < TONE_REL and identities
    record(9, ok, f"50 Hz attenuation {atten:.1f} dB; DC residue {dc:.1e}; 100 Hz envelope off by {rel:.2%}; MAV identities exact: {identities}")
    assert ok


def test_criterion_10_end_to_end_determinism(tmp_path):
    reports = []
    for run in ("a", "b"):
        d = tmp_path / run
        d.mkdir()
        for argv in (
            ["simulate", "--scenario", str(ROOT / "scenarios" / "forward_lean.json"), "--seed", "7", "--out", str(d / "traj.csv")],
            ["evaluate", "--traj", str(d / "traj.csv"), "--out", str(d / "eval")],
        ):
            subprocess.run([sys.executable, "-m", "arae", *argv], check=True, cwd=d)
        reports.append([(d / "eval" / n).read_bytes() for n in ("report.json", "samples.csv", "groups.csv")] + [(d / "traj.csv").read_bytes()])
    ok = reports[0] == reports[1]
    record(10, ok, f"two separate simulate+evaluate runs with seed 7: byte-identical outputs: {ok}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
