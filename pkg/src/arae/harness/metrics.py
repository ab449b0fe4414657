"""Accuracy and muscle-activity metrics."""

from __future__ import annotations

import math

import numpy as np

from ..errors import LengthMismatch, ZeroBaseline
from ..frames import CartesianPoint, angle_diff

GROUP_EDGES = (0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5)
GROUP_LABELS = tuple(f"{lo}-{lo + 10}%" for lo in range(80, 150, 10))
OUT_OF_RANGE = "OutOfRange"


def _paired(truth, estimate) -> tuple[np.ndarray, np.ndarray]:
    a = np.atleast_2d(np.asarray(truth, dtype=float))
    b = np.atleast_2d(np.asarray(estimate, dtype=float))
    if a.shape != b.shape or a.shape[0] == 0:
        raise LengthMismatch(f"truth {a.shape} and estimate {b.shape} must have equal non-empty shape")
    return a, b


def abs_errors_deg(truth, estimate) -> np.ndarray:
    """Per-frame absolute angle errors in degrees, wrapped to [0, 180]."""
    a, b = _paired(truth, estimate)
    return np.degrees(np.abs(angle_diff(b, a)))


def mae_per_joint(truth, estimate) -> np.ndarray:
    """Mean absolute error per joint (degrees); inputs are (n, joints) in radians."""
    return abs_errors_deg(truth, estimate).mean(axis=0)


def mae(truth, estimate) -> float:
    """Mean over frames of the absolute error, averaged across joints (degrees).

    Errors are not allowed to cancel: alternating +5/-5 deg gives 5, not 0.
    """
    return float(mae_per_joint(truth, estimate).mean())


def distance_ratio(pE, pS_init, l_U: float) -> float:
    if isinstance(pE, CartesianPoint) and isinstance(pS_init, CartesianPoint):
        pE, pS_init = pE.as_array(), pS_init.require(pE.frame)
    return float(np.linalg.norm(np.asarray(pE, dtype=float) - np.asarray(pS_init, dtype=float)) / l_U)


def group_for_ratio(ratio: float) -> str:
    if not math.isfinite(ratio) or ratio < GROUP_EDGES[0] or ratio > GROUP_EDGES[-1]:
        return OUT_OF_RANGE
    # the last bin is closed on the right
    idx = min(int(np.searchsorted(GROUP_EDGES, ratio, side="right")) - 1, len(GROUP_LABELS) - 1)
    return GROUP_LABELS[idx]


def classify_distance_group(pE, pS_init, l_U: float) -> str:
    """Bin the elbow distance from the initial shoulder as a percentage of ``l_U``."""
    if not l_U > 0:
        raise ValueError("l_U must be positive")
    return group_for_ratio(distance_ratio(pE, pS_init, l_U))


def mav(series) -> float:
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise LengthMismatch("mav of an empty series")
    return float(x.mean())


def delta_mav(mav_condition: float, mav_baseline: float) -> float:
    """Percent change of a condition's MAV relative to the baseline."""
    if mav_baseline == 0:
        raise ZeroBaseline("baseline MAV is zero")
    return (mav_condition - mav_baseline) / mav_baseline * 100.0
