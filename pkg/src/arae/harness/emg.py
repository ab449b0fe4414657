"""Surface-EMG envelope extraction.

Chain per channel: notch filters (powerline, then heartbeat), high-pass
Butterworth, full-wave rectification, low-pass Butterworth. Butterworth stages
run as second-order sections; by default every stage is applied forward and
backward (zero phase), with a causal mode for online-style processing.
"""

from __future__ import annotations

import numpy as np
from scipy import signal

from ..errors import ConfigError, SampleRateTooLow
from .config import FilterConfig
from .io import EMG_CHANNELS, EmgRecord


def _check_rate(cfg: FilterConfig, fs: float) -> None:
    highest = max((*cfg.notch_freqs, cfg.highpass_hz, cfg.lowpass_hz))
    if fs < 2.0 * highest:
        raise SampleRateTooLow(f"sample rate {fs} Hz is below twice the highest filter frequency {highest} Hz")


def _stages(cfg: FilterConfig, fs: float):
    notches = [signal.iirnotch(f, q, fs=fs) for f, q in zip(cfg.notch_freqs, cfg.notch_q)]
    hp = signal.butter(cfg.highpass_order, cfg.highpass_hz, btype="highpass", fs=fs, output="sos")
    lp = signal.butter(cfg.lowpass_order, cfg.lowpass_hz, btype="lowpass", fs=fs, output="sos")
    return notches, hp, lp


def envelope(x, cfg: FilterConfig | None = None, fs: float | None = None) -> np.ndarray:
    """Envelope of one channel (same units as ``x``)."""
    cfg = cfg or FilterConfig()
    fs = cfg.fs if fs is None else fs
    _check_rate(cfg, fs)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0 or not np.all(np.isfinite(x)):
        raise ConfigError("EMG channel must be a non-empty finite 1-D series")
    notches, hp, lp = _stages(cfg, fs)
    if cfg.zero_phase:
        for b, a in notches:
            x = signal.filtfilt(b, a, x)
        x = signal.sosfiltfilt(hp, x)
        return signal.sosfiltfilt(lp, np.abs(x))
    for b, a in notches:
        x = signal.lfilter(b, a, x)
    x = signal.sosfilt(hp, x)
    return signal.sosfilt(lp, np.abs(x))


def emg_pipeline(rec: EmgRecord | np.ndarray, cfg: FilterConfig | None = None) -> dict[str, np.ndarray]:
    """Envelope of every channel; channels with an MVC constant are normalised by it.

    A bare array is treated as a single channel named ``"x"`` sampled at ``cfg.fs``.
    """
    cfg = cfg or FilterConfig()
    if not isinstance(rec, EmgRecord):
        return {"x": envelope(rec, cfg)}
    out = {}
    for name in EMG_CHANNELS:
        env = envelope(rec.channels[name], cfg, rec.fs)
        mvc = cfg.mvc.get(name)
        if mvc is not None:
            if not mvc > 0:
                raise ConfigError(f"MVC constant for {name} must be positive")
            env = env / mvc
        out[name] = env
    return out


def downsample_ground_truth(x, factor: int = 2) -> np.ndarray:
    """Decimate an externally sampled series (e.g. 200 Hz motion capture to 100 Hz).

    Uses a linear-phase FIR anti-aliasing low-pass applied with zero phase before
    keeping every ``factor``-th sample, so the kept samples stay time aligned.
    """
    return signal.decimate(np.asarray(x, dtype=float), factor, ftype="fir", axis=0, zero_phase=True)
