import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arae.errors import ConfigError, FrameMismatch, LateralOverreach, NoIntersection, ZeroElbow
from arae.frames import CartesianPoint, Frame, wrap_angle
from arae.harness.config import default_config
from arae.harness.scenario import SceneSetup, SyntheticScenario, generate_scenario
from arae.pose_estimation import (
    FrameCalibration,
    TorsoParams,
    cuff_points,
    estimate_fixed_torso,
    estimate_sagittal,
    solve_shoulder_sagittal,
    to_human_frame,
    to_pelvis_frame,
    to_shoulder_frame,
)
from arae.robot_model import RobotGeometry, RobotJointState, fk_chain

import oracles

GEOM = RobotGeometry()
TORSO = TorsoParams()
L_U = 0.2991
angle = st.floats(-math.pi, math.pi, allow_nan=False)

# higher-z intersection for pE_P = (-0.1793, 0.25, 0.30), from the substitution oracle
SAGITTAL_REF = (-0.03729844543936243, 0.38318902119946874)


class TestFrames:
    def test_identity(self):
        calib = FrameCalibration("shoulder", psi=0.0)
        np.testing.assert_array_equal(to_shoulder_frame(np.array([0.1, -0.2, 0.3]), calib), [0.1, -0.2, 0.3])

    def test_quarter_turn(self):
        out = to_shoulder_frame(CartesianPoint(1, 0, 0), FrameCalibration("shoulder"))
        assert out.frame is Frame.SHOULDER
        np.testing.assert_allclose(out.as_array(), [0, -1, 0], atol=1e-15)

    def test_offsets(self):
        calib = FrameCalibration("shoulder", 0.3, -0.2, 0.1)
        np.testing.assert_allclose(to_shoulder_frame(np.array([1.0, 2.0, 3.0]), calib), [2.3, -1.2, 3.1], atol=1e-15)
        np.testing.assert_allclose(calib.matrix @ [1, 2, 3, 1], [2.3, -1.2, 3.1, 1], atol=1e-15)

    def test_mode_checks(self):
        with pytest.raises(ConfigError):
            FrameCalibration("hip")
        with pytest.raises(ConfigError):
            to_pelvis_frame(np.zeros(3), FrameCalibration("shoulder"))
        with pytest.raises(ConfigError):
            to_shoulder_frame(np.zeros(3), FrameCalibration("pelvis"))
        with pytest.raises(FrameMismatch):
            to_human_frame(CartesianPoint(0, 0, 0, Frame.PELVIS), FrameCalibration("pelvis"))

    def test_batch_and_list_inputs(self):
        calib = FrameCalibration("pelvis", -0.5, -0.3, 0.12)
        pts = np.array([[0.1, 0.2, 0.3], [0.4, -0.1, 0.0]])
        out = to_pelvis_frame(pts, calib)
        listed = to_pelvis_frame([CartesianPoint.from_array(p, Frame.ROBOT) for p in pts], calib)
        np.testing.assert_allclose([p.as_array() for p in listed], out, atol=1e-15)

    @given(st.tuples(*[st.floats(-2, 2)] * 3), st.tuples(*[st.floats(-2, 2)] * 3), st.tuples(*[st.floats(-1, 1)] * 3), angle)
    def test_rigid(self, a, b, t, psi):
        calib = FrameCalibration("pelvis", *t, psi=psi)
        pa, pb = to_human_frame(np.array(a), calib), to_human_frame(np.array(b), calib)
        assert np.linalg.norm(pa - pb) == pytest.approx(np.linalg.norm(np.subtract(a, b)), abs=1e-12)


class TestCuffPoints:
    def test_aliases_fk(self):
        q = RobotJointState(0.3, 0.5, -1.2, 0.2, -0.1)
        pE, pW = cuff_points(GEOM, q)
        pts = fk_chain(GEOM, q)
        assert pE == pts.p6 and pW == pts.p7

    def test_reference_values(self):
        pE, pW = cuff_points(GEOM, RobotJointState(0, 0.6, -1.2, 0.1, -0.2))
        ref = oracles.robot_points((0, 0.6, -1.2, 0.1, -0.2))
        np.testing.assert_allclose(pE.as_array(), ref["p6"], atol=1e-12)
        np.testing.assert_allclose(pW.as_array(), ref["p7"], atol=1e-12)

    @given(st.tuples(angle, angle, angle, angle, angle))
    def test_rigid_cuff(self, q):
        pE, pW = cuff_points(GEOM, RobotJointState(*q))
        assert np.linalg.norm(pW.as_array() - pE.as_array()) == pytest.approx(GEOM.cuff_length, abs=1e-12)


class TestSagittalSolver:
    def test_reference_intersection(self):
        sol = solve_shoulder_sagittal(np.array([-0.1793, 0.25, 0.30]), TORSO, L_U)
        roots = oracles.circle_intersections(TORSO.l_SH, 0.25, 0.30, L_U)
        assert max(roots, key=lambda r: r[1]) == pytest.approx(SAGITTAL_REF, abs=1e-12)
        assert not sol.clamped
        np.testing.assert_allclose(sol.point.as_array(), [-0.1793, *SAGITTAL_REF], atol=1e-12)

    def test_external_tangency(self):
        sol = solve_shoulder_sagittal(np.array([-TORSO.l_PH, 0.0, TORSO.l_SH + L_U]), TORSO, L_U)
        np.testing.assert_allclose(sol.point.as_array(), TORSO.upright_shoulder, atol=1e-12)
        assert not sol.clamped

    def test_internal_tangency(self):
        sol = solve_shoulder_sagittal(np.array([-TORSO.l_PH, -(TORSO.l_SH - L_U), 0.0]), TORSO, L_U)
        np.testing.assert_allclose(sol.point.as_array(), [-TORSO.l_PH, -TORSO.l_SH, 0.0], atol=1e-9)

    def test_degenerate_radius_on_hip_circle(self):
        pE = np.array([-TORSO.l_PH + L_U, 0.1, math.sqrt(TORSO.l_SH**2 - 0.01)])
        sol = solve_shoulder_sagittal(pE, TORSO, L_U)
        np.testing.assert_allclose(sol.point.as_array(), [-TORSO.l_PH, *pE[1:]], atol=1e-9)

    def test_degenerate_radius_off_hip_circle(self):
        with pytest.raises(NoIntersection):
            solve_shoulder_sagittal(np.array([-TORSO.l_PH + L_U, 0.1, 0.2]), TORSO, L_U)

    def test_small_miss_is_clamped_and_flagged(self):
        pE = np.array([-TORSO.l_PH, 0.0, TORSO.l_SH + L_U + 0.002])
        sol = solve_shoulder_sagittal(pE, TORSO, L_U)
        assert sol.clamped and sol.miss == pytest.approx(0.002)
        np.testing.assert_allclose(sol.point.as_array(), TORSO.upright_shoulder, atol=1e-12)

    def test_large_miss_raises(self):
        with pytest.raises(NoIntersection):
            solve_shoulder_sagittal(np.array([-TORSO.l_PH, 0.0, TORSO.l_SH + L_U + 0.02]), TORSO, L_U)
        with pytest.raises(NoIntersection):
            solve_shoulder_sagittal(np.array([-TORSO.l_PH, 0.0, 0.0]), TORSO, L_U)

    def test_lateral_overreach(self):
        with pytest.raises(LateralOverreach):
            solve_shoulder_sagittal(np.array([-TORSO.l_PH + 0.31, 0.1, 0.3]), TORSO, L_U)

    def test_rejects_robot_frame_points(self):
        with pytest.raises(FrameMismatch):
            solve_shoulder_sagittal(CartesianPoint(0.1, 0.2, 0.3, Frame.ROBOT), TORSO, L_U)

    def test_certificates_on_1000_placements(self, rng):
        hip = TORSO.hip
        for _ in range(1000):
            lean = rng.uniform(-1.2, 1.2)
            pS = np.array([-TORSO.l_PH, -TORSO.l_SH * math.sin(lean), TORSO.l_SH * math.cos(lean)])
            u = rng.normal(size=3)
            pE = pS + L_U * u / np.linalg.norm(u)
            sol = solve_shoulder_sagittal(pE, TORSO, L_U)
            p = sol.point.as_array()
            assert not sol.clamped
            assert abs(np.linalg.norm(p - hip) - TORSO.l_SH) < 1e-9
            assert abs(np.linalg.norm(p - pE) - L_U) < 1e-9

    def test_branch_determinism(self):
        pE = np.array([-0.15, 0.2, 0.35])
        assert solve_shoulder_sagittal(pE, TORSO, L_U) == solve_shoulder_sagittal(pE.copy(), TORSO, L_U)


def _scene(spec):
    cfg = default_config()
    c = cfg.controller
    return cfg, generate_scenario(spec, SceneSetup(c.geometry, c.human, c.calibration_pelvis, c.torso), seed=0)


class TestEstimators:
    def test_zero_elbow(self):
        calib = FrameCalibration("shoulder", 0.3, -0.2, 0.1)
        pE_R = calib.rotation.T @ (-calib.translation)
        with pytest.raises(ZeroElbow):
            estimate_fixed_torso(pE_R, pE_R + [0.26, 0, 0], calib, 0.2643)

    def test_fixed_scene_recovers_truth_with_both(self):
        cfg, samples = _scene(SyntheticScenario(duration=1.0, h_knots=((0, 10, 20, -30, -20), (1, 30, 40, 10, 10))))
        c = cfg.controller
        for s in samples:
            pE, pW = cuff_points(c.geometry, RobotJointState.from_array(s.q))
            fixed = estimate_fixed_torso(pE, pW, c.calibration_shoulder, c.human.l_F)
            sag = estimate_sagittal(pE, pW, c.calibration_pelvis, c.torso, c.human.l_U, c.human.l_F)
            assert np.max(np.abs(wrap_angle(fixed.h.as_array() - s.h))) < 1e-6
            assert np.max(np.abs(wrap_angle(sag.h.as_array() - s.h))) < 1e-6
            assert fixed.l_U_cal == pytest.approx(c.human.l_U, abs=1e-9)

    def test_lean_scene(self):
        cfg, samples = _scene(SyntheticScenario(duration=1.0, h_knots=((0, 0, 35, 0, -45),), lean_knots=((0, 0.0), (1, 0.1))))
        c = cfg.controller
        fixed_err, sag_err = [], []
        for s in samples:
            pE, pW = cuff_points(c.geometry, RobotJointState.from_array(s.q))
            sag = estimate_sagittal(pE, pW, c.calibration_pelvis, c.torso, c.human.l_U, c.human.l_F)
            fixed = estimate_fixed_torso(pE, pW, c.calibration_shoulder, c.human.l_F)
            np.testing.assert_allclose(sag.pS_P.as_array(), s.shoulder, atol=1e-9)
            sag_err.append(np.abs(wrap_angle(sag.h.as_array() - s.h)).mean())
            fixed_err.append(np.abs(wrap_angle(fixed.h.as_array() - s.h)).mean())
        assert max(sag_err) < 1e-6
        assert np.mean(fixed_err) > np.mean(sag_err)
        assert fixed_err[-1] > fixed_err[len(fixed_err) // 2] > 0
