"""CSV and JSON formats.

Trajectory CSV: header ``t,q1,q2,q3,q4,q5`` optionally followed by the ground
truth columns ``h1,h2,h3,h4`` and ``sx,sy,sz`` (shoulder in the pelvis frame).
Radians and metres. EMG CSV: ``t,pm,dm,bb,tb`` in mV. All files are UTF-8
with LF line endings; floats are written with ``repr`` so a round trip is
exact.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from ..errors import ParseError

Q_COLS = ["q1", "q2", "q3", "q4", "q5"]
H_COLS = ["h1", "h2", "h3", "h4"]
S_COLS = ["sx", "sy", "sz"]
EMG_CHANNELS = ["pm", "dm", "bb", "tb"]


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    q: tuple[float, float, float, float, float]
    h: tuple[float, float, float, float] | None = None
    shoulder: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class EmgRecord:
    t: np.ndarray
    channels: dict[str, np.ndarray]
    fs: float = 2000.0


def _fmt(v: float) -> str:
    return repr(float(v))


def write_trajectory(path: str | Path, samples: list[TrajectorySample]) -> None:
    has_h = bool(samples) and all(s.h is not None for s in samples)
    has_s = bool(samples) and all(s.shoulder is not None for s in samples)
    header = ["t"] + Q_COLS + (H_COLS if has_h else []) + (S_COLS if has_s else [])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for s in samples:
            row = [s.t, *s.q]
            if has_h:
                row += list(s.h)
            if has_s:
                row += list(s.shoulder)
            w.writerow([_fmt(v) for v in row])


def _read_rows(path: str | Path) -> tuple[list[str], np.ndarray]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    body = [r for r in rows[1:] if r]
    try:
        data = np.array([[float(c) for c in r] for r in body], dtype=float).reshape(len(body), len(header))
    except ValueError as exc:
        raise ParseError(f"{path}: malformed numeric row ({exc})") from exc
    if not np.all(np.isfinite(data)):
        raise ParseError(f"{path}: non-finite value")
    return header, data


def read_trajectory(path: str | Path) -> list[TrajectorySample]:
    header, data = _read_rows(path)
    if header[:6] != ["t"] + Q_COLS:
        raise ParseError(f"{path}: header must start with t,{','.join(Q_COLS)}")
    extra = header[6:]
    has_h = extra[:4] == H_COLS
    rest = extra[4:] if has_h else extra
    has_s = rest == S_COLS
    if rest and not has_s:
        raise ParseError(f"{path}: unexpected columns {extra}")
    if len(data) > 1 and np.any(np.diff(data[:, 0]) <= 0):
        raise ParseError(f"{path}: t must be strictly increasing")
    samples = []
    for row in data:
        h = tuple(row[6:10]) if has_h else None
        s = tuple(row[-3:]) if has_s else None
        samples.append(TrajectorySample(float(row[0]), tuple(row[1:6]), h, s))
    return samples


def read_emg(path: str | Path, fs: float | None = None) -> EmgRecord:
    header, data = _read_rows(path)
    if header != ["t"] + EMG_CHANNELS:
        raise ParseError(f"{path}: header must be t,{','.join(EMG_CHANNELS)}")
    t = data[:, 0]
    if len(t) < 2:
        raise ParseError(f"{path}: need at least two samples")
    dt = np.diff(t)
    if np.any(dt <= 0) or not np.allclose(dt, dt[0], rtol=1e-6, atol=1e-9):
        raise ParseError(f"{path}: EMG samples must be uniformly spaced")
    rate = 1.0 / float(dt.mean()) if fs is None else fs
    return EmgRecord(t, {c: data[:, i + 1] for i, c in enumerate(EMG_CHANNELS)}, rate)


def write_emg(path: str | Path, rec: EmgRecord) -> None:
    write_columns(path, {"t": rec.t, **{c: rec.channels[c] for c in EMG_CHANNELS}})


def write_columns(dest: str | Path | TextIO, columns: dict[str, np.ndarray]) -> None:
    """Write equal-length columns as CSV to a path or an open text stream."""
    if not isinstance(dest, (str, Path)):
        _write_columns(dest, columns)
        return
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        _write_columns(fh, columns)


def _write_columns(fh: TextIO, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(names)
    for row in zip(*arrays):
        w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps_report(report: dict) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(path: str | Path, report: dict) -> None:
    Path(path).write_text(dumps_report(report), encoding="utf-8", newline="\n")
