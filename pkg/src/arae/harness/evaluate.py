"""Run the pose estimators over recorded or synthetic trajectories and score them."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..control import ControlMode, estimate_posture
from ..errors import MissingGroundTruth, NumericError
from ..robot_model import RobotJointState, fk_chain
from .config import Config
from .io import TrajectorySample, dumps_report, write_columns
from .metrics import GROUP_LABELS, OUT_OF_RANGE, abs_errors_deg, distance_ratio, group_for_ratio

MODELS = ("fixed", "sagittal")


@dataclass
class ModelRun:
    """Per-sample estimates of one model over one trial (NaN rows where it failed)."""

    h: np.ndarray
    flags: dict[str, int] = field(default_factory=dict)


def _truth(samples: list[TrajectorySample]) -> np.ndarray:
    if not samples:
        raise MissingGroundTruth("trajectory is empty")
    if any(s.h is None for s in samples):
        raise MissingGroundTruth("trajectory has no h1..h4 ground-truth columns")
    return np.array([s.h for s in samples], dtype=float)


def run_estimator(samples: list[TrajectorySample], cfg: Config, model: str) -> ModelRun:
    ctrl = cfg.controller
    mode = ControlMode(model)
    out = np.full((len(samples), 4), np.nan)
    flags: dict[str, int] = {}
    for i, s in enumerate(samples):
        try:
            h, _, f = estimate_posture(RobotJointState.from_array(s.q), mode, ctrl)
        except NumericError as exc:
            f = {"estimator_failure", type(exc).__name__}
        else:
            out[i] = h.as_array()
        for name in f:
            flags[name] = flags.get(name, 0) + 1
    return ModelRun(out, flags)


def distance_ratios(samples: list[TrajectorySample], cfg: Config) -> np.ndarray:
    """Elbow distance from the upright shoulder, as a fraction of ``l_U``."""
    ctrl = cfg.controller
    calib = ctrl.calibration_pelvis
    pS = ctrl.torso.upright_shoulder
    ratios = []
    for s in samples:
        pE_R = fk_chain(ctrl.geometry, RobotJointState.from_array(s.q)).p6.as_array()
        ratios.append(distance_ratio(calib.rotation @ pE_R + calib.translation, pS, ctrl.human.l_U))
    return np.array(ratios)


def _model_summary(errs: list[np.ndarray], groups: list[list[str]], flags: dict[str, int]) -> dict:
    """Summaries of per-frame absolute errors (deg), one array per trial."""
    pooled = np.concatenate(errs)
    ok = ~np.isnan(pooled).any(axis=1)
    per_joint = pooled[ok].mean(axis=0) if ok.any() else np.full(4, np.nan)
    trial_means = [float(e[~np.isnan(e).any(axis=1)].mean()) for e in errs if (~np.isnan(e).any(axis=1)).any()]
    labels = np.concatenate([np.array(g, dtype=object) for g in groups])
    frame_err = pooled.mean(axis=1)
    by_group = {}
    for label in (*GROUP_LABELS, OUT_OF_RANGE):
        sel = (labels == label) & ok
        by_group[label] = {"n": int(sel.sum()), "mae_deg": float(frame_err[sel].mean()) if sel.any() else None}
    return {
        "mae_per_joint_deg": {f"h{j + 1}": float(v) for j, v in enumerate(per_joint)},
        "mae_mean_deg": float(per_joint.mean()),
        "mae_pooled_deg": float(pooled[ok].mean()) if ok.any() else None,
        "mae_trial_averaged_deg": float(np.mean(trial_means)) if trial_means else None,
        "n_estimated": int(ok.sum()),
        "n_failed": int((~ok).sum()),
        "groups": by_group,
        "flags": dict(sorted(flags.items())),
    }


@dataclass
class Evaluation:
    report: dict
    per_sample: dict[str, np.ndarray]
    per_group: dict[str, list]


def evaluate_trials(
    trials: list[list[TrajectorySample]], cfg: Config, models: tuple[str, ...] = MODELS, names: list[str] | None = None
) -> Evaluation:
    """Score each model across one or more trials.

    The report carries both the pooled MAE (all frames and joints together)
    and the trial-averaged MAE (each trial's mean, then the mean of those).
    """
    truths = [_truth(s) for s in trials]
    ratios = [distance_ratios(s, cfg) for s in trials]
    groups = [[group_for_ratio(r) for r in rs] for rs in ratios]
    names = names or [f"trial{i}" for i in range(len(trials))]

    report: dict = {"trials": [{"name": n, "n_samples": len(s)} for n, s in zip(names, trials)], "models": {}}
    per_sample: dict[str, np.ndarray] = {
        "trial": np.concatenate([[i] * len(s) for i, s in enumerate(trials)]).astype(float),
        "t": np.concatenate([[x.t for x in s] for s in trials]),
        "distance_ratio": np.concatenate(ratios),
    }
    for j in range(4):
        per_sample[f"true_h{j + 1}"] = np.concatenate([tr[:, j] for tr in truths])
    for model in models:
        runs = [run_estimator(s, cfg, model) for s in trials]
        errs = [abs_errors_deg(tr, run.h) for tr, run in zip(truths, runs)]
        flags: dict[str, int] = {}
        for run in runs:
            for k, v in run.flags.items():
                flags[k] = flags.get(k, 0) + v
        report["models"][model] = _model_summary(errs, groups, flags)
        est = np.concatenate([run.h for run in runs])
        err = np.concatenate(errs)
        for j in range(4):
            per_sample[f"{model}_h{j + 1}"] = est[:, j]
        for j in range(4):
            per_sample[f"{model}_err{j + 1}_deg"] = err[:, j]

    per_group: dict[str, list] = {"group": list(GROUP_LABELS) + [OUT_OF_RANGE]}
    for model in models:
        g = report["models"][model]["groups"]
        per_group[f"{model}_n"] = [float(g[k]["n"]) for k in per_group["group"]]
        per_group[f"{model}_mae_deg"] = [np.nan if g[k]["mae_deg"] is None else g[k]["mae_deg"] for k in per_group["group"]]
    return Evaluation(report, per_sample, per_group)


def evaluate(samples: list[TrajectorySample], cfg: Config, models: tuple[str, ...] = MODELS) -> Evaluation:
    return evaluate_trials([samples], cfg, models)


def write_evaluation(ev: Evaluation, out_dir: str | Path) -> list[Path]:
    """Write ``report.json``, ``samples.csv`` and ``groups.csv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "report.json", out / "samples.csv", out / "groups.csv"]
    paths[0].write_text(dumps_report(ev.report), encoding="utf-8", newline="\n")
    write_columns(paths[1], ev.per_sample)
    write_columns(paths[2], ev.per_group)
    return paths
