"""Uniformly sampled simulation traces and their CSV form."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import UsageError


@dataclass(frozen=True)
class ChannelStats:
    mean: float
    ripple: float  # peak-to-peak


@dataclass
class SimTrace:
    """Sample ``k`` sits at ``t = k * dt``. Channels are equal-length arrays.

    ``columns`` maps channel name to CSV header; channel order follows it.
    """

    dt: float
    channels: dict
    columns: dict
    metadata: dict = field(default_factory=dict)
    warmup: np.ndarray | None = None

    def __post_init__(self):
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) > 1:
            raise ValueError(f"channels have unequal lengths {sorted(lengths)}")
        missing = set(self.columns) - set(self.channels)
        if missing:
            raise ValueError(f"columns without channel data: {sorted(missing)}")

    def __len__(self):
        return len(next(iter(self.channels.values()))) if self.channels else 0

    def __getitem__(self, name):
        return self.channels[name]

    @property
    def t(self):
        return np.arange(len(self)) * self.dt

    @property
    def duration(self):
        return (len(self) - 1) * self.dt

    def tail(self, window: float) -> dict:
        """Channel arrays restricted to the trailing ``window`` seconds."""
        m = _window_samples(self, window)
        return {k: v[-m:] for k, v in self.channels.items()}

    def to_csv(self, path, averaged: SimTrace | None = None):
        """Write ``t_s`` plus every column; ``averaged`` adds ``<col>_avg`` columns."""
        header = ["t_s"] + list(self.columns.values())
        data = [self.t] + [np.asarray(self.channels[k], dtype=float) for k in self.columns]
        if averaged is not None:
            header += [f"{c}_avg" for c in averaged.columns.values()]
            data += [np.asarray(averaged.channels[k], dtype=float) for k in averaged.columns]
            if averaged.warmup is not None:
                header.append("warmup")
                data.append(averaged.warmup.astype(int))
        cols = [arr.tolist() for arr in data]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in zip(*cols):
                fh.write(",".join(map(repr, row)) + "\n")


def _window_samples(trace, window):
    if window > trace.duration * (1 + 1e-9) + 1e-15:
        raise UsageError(f"window {window:g} s exceeds trace duration {trace.duration:g} s")
    m = int(round(window / trace.dt))
    if m < 2:
        raise UsageError(f"window {window:g} s spans fewer than 2 samples at dt = {trace.dt:g} s")
    return m


def steady_state_of_trace(trace: SimTrace, window: float) -> dict[str, ChannelStats]:
    """Mean and peak-to-peak ripple of every channel over the trailing window."""
    out = {}
    for name, values in trace.tail(window).items():
        values = np.asarray(values, dtype=float)
        out[name] = ChannelStats(float(values.mean()), float(values.max() - values.min()))
    return out


def switching_average(trace: SimTrace, window: float | None = None, backend=None) -> SimTrace:
    """Trailing moving average of every channel at the original sample rate.

    ``window`` defaults to one carrier period (``metadata['f_sw']``) and must
    be an integer multiple of ``dt``. The first ``m - 1`` samples average over
    fewer points and are flagged in ``warmup``.
    """
    if window is None:
        try:
            window = 1.0 / trace.metadata["f_sw"]
        except KeyError:
            raise UsageError("trace metadata lacks f_sw; pass an explicit window") from None
    ratio = window / trace.dt
    m = int(round(ratio))
    if abs(ratio - m) > 1e-6 * max(1.0, ratio):
        raise UsageError(f"window {window:g} s is not an integer multiple of dt = {trace.dt:g} s")
    if m < 2:
        raise UsageError("window must span at least 2 samples")
    names = list(trace.channels)
    stacked = np.column_stack([np.asarray(trace.channels[k], dtype=float) for k in names])
    avg = _kernels.moving_average(stacked, m, backend=backend)
    warmup = np.zeros(len(trace), dtype=bool)
    warmup[: m - 1] = True
    meta = dict(trace.metadata, averaging_window_s=window)
    return SimTrace(
        dt=trace.dt,
        channels={k: avg[:, i] for i, k in enumerate(names)},
        columns=dict(trace.columns),
        metadata=meta,
        warmup=warmup,
    )
