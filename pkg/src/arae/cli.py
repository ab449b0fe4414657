"""Command-line entry point.

Exit codes: 0 success, 2 input/configuration error, 3 numeric/solver error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .conformance import full_report
from .control import Controller, ControlMode, estimate_posture
from .errors import AraeError, ConfigError, NumericError
from .harness.config import load_config
from .harness.emg import emg_pipeline
from .harness.evaluate import MODELS, evaluate_trials, write_evaluation
from .harness.io import dumps_report, read_emg, read_trajectory, write_columns, write_trajectory
from .harness.metrics import delta_mav, mav
from .harness.scenario import SceneSetup, SyntheticScenario, generate_scenario
from .robot_model import RobotJointState, fk_chain, ik_active

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _emit(doc: dict, out: str | None) -> None:
    text = dumps_report(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _joint_inputs(args) -> tuple[list[RobotJointState], np.ndarray | None]:
    if args.traj:
        samples = read_trajectory(args.traj)
        return [RobotJointState.from_array(s.q) for s in samples], np.array([s.t for s in samples])
    if args.q is None:
        raise ConfigError("give either --q or --traj")
    return [RobotJointState.from_array(args.q)], None


def cmd_fk(args, cfg) -> None:
    pts = fk_chain(cfg.controller.geometry, RobotJointState.from_array(args.q))
    _emit({k: getattr(pts, k).as_array() for k in ("p3", "p5", "p6", "p7")}, args.out)


def cmd_ik(args, cfg) -> None:
    q1, q2, q3 = ik_active(cfg.controller.geometry, args.p3, elbow=args.elbow)
    _emit({"q1": q1, "q2": q2, "q3": q3}, args.out)


def cmd_estimate(args, cfg) -> None:
    joints, t = _joint_inputs(args)
    mode = ControlMode(args.model)
    rows = [estimate_posture(j, mode, cfg.controller) for j in joints]
    if t is None:
        h, _, flags = rows[0]
        _emit({f"h{i + 1}": v for i, v in enumerate(h.as_array())} | {"flags": sorted(flags)}, args.out)
        return
    H = np.array([r[0].as_array() for r in rows])
    cols = {"t": t} | {f"h{i + 1}": H[:, i] for i in range(4)}
    cols["sagittal_clamp"] = np.array([float("sagittal_clamp" in r[2]) for r in rows])
    _write_csv_or_stdout(cols, args.out)


def cmd_gc(args, cfg) -> None:
    joints, t = _joint_inputs(args)
    ctl = Controller(cfg.controller, args.mode)
    cmds = [ctl.step(j) for j in joints]
    if t is None:
        c = cmds[0]
        _emit({"tau": c.as_array(), "flags": sorted(c.flags)}, args.out)
        return
    tau = np.array([c.as_array() for c in cmds])
    cols = {"t": t, "tau1": tau[:, 0], "tau2": tau[:, 1], "tau3": tau[:, 2]}
    cols["flags"] = np.array(["|".join(sorted(c.flags)) for c in cmds], dtype=object)
    _write_csv_or_stdout(cols, args.out)


def _write_csv_or_stdout(cols: dict, out: str | None) -> None:
    if out:
        write_columns(out, cols)
    else:
        write_columns(sys.stdout, cols)


def cmd_simulate(args, cfg) -> None:
    try:
        doc = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario {args.scenario}: {exc}") from exc
    spec = SyntheticScenario.from_dict(doc)
    c = cfg.controller
    samples = generate_scenario(spec, SceneSetup(c.geometry, c.human, c.calibration_pelvis, c.torso), seed=args.seed)
    out = args.out or f"{Path(args.scenario).stem}.csv"
    write_trajectory(out, samples)
    if args.torques:
        ctl = Controller(c, args.mode)
        tau = np.array([ctl.step(RobotJointState.from_array(s.q)).as_array() for s in samples])
        write_columns(args.torques, {"t": np.array([s.t for s in samples]), "tau1": tau[:, 0], "tau2": tau[:, 1], "tau3": tau[:, 2]})
    logging.getLogger("arae").info("wrote %d samples to %s", len(samples), out)


def cmd_evaluate(args, cfg) -> None:
    trials = [read_trajectory(p) for p in args.traj]
    models = MODELS if args.model == "both" else (args.model,)
    ev = evaluate_trials(trials, cfg, models, names=[Path(p).name for p in args.traj])
    if args.out:
        write_evaluation(ev, args.out)
    else:
        sys.stdout.write(dumps_report(ev.report))


def _emg_summary(path: str, cfg) -> tuple[dict, dict]:
    rec = read_emg(path)
    env = emg_pipeline(rec, cfg.filters)
    return {"t": rec.t} | env, {k: mav(v) for k, v in env.items()}


def cmd_emg(args, cfg) -> None:
    cols, mavs = _emg_summary(args.input, cfg)
    summary: dict = {"mav": mavs}
    if args.baseline:
        _, base = _emg_summary(args.baseline, cfg)
        summary["baseline_mav"] = base
        summary["delta_mav_percent"] = {k: delta_mav(mavs[k], base[k]) for k in mavs}
    if args.out:
        write_columns(args.out, cols)
    sys.stdout.write(dumps_report(summary))


def cmd_conformance(args, cfg) -> None:
    text = "\n".join(full_report(seed=args.seed, n=args.n)) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration document")
    common.add_argument("--out", help="output path (file, or directory for evaluate)")
    common.add_argument("--seed", type=int, default=0, help="seed for scenario randomness")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="arae", description="Arm-support robot kinematics, estimation and evaluation tools.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fk", parents=[common], help="robot forward kinematics")
    s.add_argument("--q", type=float, nargs=5, required=True, metavar="Q")
    s.set_defaults(func=cmd_fk)

    s = sub.add_parser("ik", parents=[common], help="active-joint inverse kinematics from p3")
    s.add_argument("--p3", type=float, nargs=3, required=True, metavar=("X", "Y", "Z"))
    s.add_argument("--elbow", choices=("up", "down"), default="up")
    s.set_defaults(func=cmd_ik)

    for name, func, flag, choices, help_ in (
        ("estimate", cmd_estimate, "--model", ("fixed", "sagittal"), "estimate arm angles from robot joints"),
        ("gc", cmd_gc, "--mode", tuple(m.value for m in ControlMode), "gravity-compensation torques"),
    ):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument(flag, choices=choices, required=True)
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--q", type=float, nargs=5, metavar="Q")
        src.add_argument("--traj", help="trajectory CSV")
        s.set_defaults(func=func)

    s = sub.add_parser("simulate", parents=[common], help="generate a synthetic trajectory with ground truth")
    s.add_argument("--scenario", required=True)
    s.add_argument("--torques", help="also write controller torques along the trajectory to this CSV")
    s.add_argument("--mode", choices=tuple(m.value for m in ControlMode), default="sagittal")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("evaluate", parents=[common], help="score the estimators against ground truth")
    s.add_argument("--traj", required=True, action="append", help="trajectory CSV (repeat for several trials)")
    s.add_argument("--model", choices=(*MODELS, "both"), default="both")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("emg", parents=[common], help="EMG envelopes and MAV")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--baseline", help="baseline-condition EMG CSV for percent MAV change")
    s.set_defaults(func=cmd_emg)

    s = sub.add_parser("conformance", parents=[common], help="check the reference closed forms against finite differences")
    s.add_argument("--n", type=int, default=100, help="random poses per check")
    s.set_defaults(func=cmd_conformance)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        args.func(args, cfg)
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (AraeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
