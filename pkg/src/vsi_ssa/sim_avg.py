"""Time integration of the large-signal averaged dq model."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DivergedError, UsageError
from .params import ConverterParams
from .steady_state import OperatingPoint
from .trace import SimTrace

DEFAULT_DT = 1e-6
DIVERGENCE_LIMIT = 1e6  # amperes

AVG_COLUMNS = {
    "i_ld": "i_ld_a",
    "i_lq": "i_lq_a",
    "i_in": "i_in_a",
    "i_od": "i_od_a",
    "i_oq": "i_oq_a",
}


class AvgState(NamedTuple):
    i_ld: float
    i_lq: float
    t: float = 0.0


class AvgInputs(NamedTuple):
    """Each field is a number or a callable ``f(t) -> float``."""

    d_d: object
    d_q: object
    u_in: object
    u_od: object
    u_oq: object

    @classmethod
    def from_operating_point(cls, params: ConverterParams, op: OperatingPoint) -> AvgInputs:
        return cls(op.d_d, op.d_q, params.u_in, params.u_od, params.u_oq)


def average_derivative(params: ConverterParams, state, inputs):
    """``(di_ld/dt, di_lq/dt)`` of the averaged model for constant inputs."""
    i_ld, i_lq = state[0], state[1]
    d_d, d_q, u_in, u_od, u_oq = inputs
    L = params.inductance
    wl = params.omega_s * L
    r = params.r_eq
    di_ld = (-r * i_ld + wl * i_lq + d_d * u_in - u_od) / L
    di_lq = (-wl * i_ld - r * i_lq + d_q * u_in - u_oq) / L
    return di_ld, di_lq


def average_outputs(state, inputs):
    """``(i_in, i_od, i_oq)``; the output currents equal the inductor currents."""
    i_ld, i_lq = state[0], state[1]
    d_d, d_q = inputs[0], inputs[1]
    return 1.5 * (d_d * i_ld + d_q * i_lq), i_ld, i_lq


def _sample(value, times):
    if callable(value):
        return np.array([float(value(t)) for t in times])
    return np.full(len(times), float(value))


def _step_count(duration, dt):
    if not dt > 0:
        raise UsageError(f"dt must be positive, got {dt!r}")
    if not duration >= dt * (1 - 1e-9):
        raise UsageError(f"duration {duration!r} is shorter than one step dt = {dt!r}")
    return max(1, int(round(duration / dt)))


def _check_divergence(x, what):
    bad = ~np.isfinite(x) | (np.abs(x) > DIVERGENCE_LIMIT)
    if bad.any():
        idx = int(np.argmax(bad.any(axis=1) if bad.ndim == 2 else bad))
        raise DivergedError(f"{what} diverged at sample {idx}", index=idx)


def simulate_average(params: ConverterParams, inputs, initial=None, duration=10e-3,
                     dt=DEFAULT_DT, backend=None) -> SimTrace:
    """Fixed-step RK4 integration of the averaged model from ``initial`` (rest by default)."""
    n = _step_count(duration, dt)
    L = params.inductance
    damping = params.r_eq / L
    w = params.omega_s
    spectral_norm = math.hypot(damping, w)
    if dt > 0.1 / spectral_norm:
        raise UsageError(
            f"dt = {dt:g} s exceeds the stability guard 0.1/||A|| = {0.1 / spectral_norm:g} s"
        )
    initial = AvgState(0.0, 0.0) if initial is None else initial
    inputs = AvgInputs(*inputs)

    t0 = getattr(initial, "t", 0.0) if isinstance(initial, AvgState) else 0.0
    half_grid = t0 + 0.5 * dt * np.arange(2 * n + 1)
    d_d, d_q, u_in, u_od, u_oq = (_sample(v, half_grid) for v in inputs)
    forcing = ((d_d + 1j * d_q) * u_in - (u_od + 1j * u_oq)) / L

    x = _kernels.rk4_affine(
        complex(-damping, -w),
        forcing[0:-1:2], forcing[1::2], forcing[2::2],
        np.array([complex(initial[0], initial[1])]),
        dt, backend=backend,
    )[:, 0]
    _check_divergence(x, "averaged model")

    i_ld, i_lq = x.real.copy(), x.imag.copy()
    i_in, i_od, i_oq = average_outputs((i_ld, i_lq), (d_d[::2], d_q[::2]))
    return SimTrace(
        dt=dt,
        channels={"i_ld": i_ld, "i_lq": i_lq, "i_in": i_in, "i_od": i_od.copy(), "i_oq": i_oq.copy()},
        columns=dict(AVG_COLUMNS),
        metadata={
            "model": "averaged-dq",
            "integrator": "rk4-fixed",
            "dt": dt,
            "t0": t0,
            "params": params,
        },
    )


def simulate_linear(model, du, dx0=(0.0, 0.0), duration=1e-3, dt=DEFAULT_DT, backend=None) -> SimTrace:
    """RK4 response of the small-signal model ``dx/dt = A dx + B du``.

    ``du`` is a 5-sequence of numbers or callables. ``A`` must have the
    rotation structure ``[[-k, w], [-w, -k]]`` produced by
    :func:`vsi_ssa.smallsignal.build_state_space`.
    """
    (a11, a12), (a21, a22) = model.a
    if a11 != a22 or a12 != -a21:
        raise UsageError("simulate_linear needs A of the form [[-k, w], [-w, -k]]")
    n = _step_count(duration, dt)
    half_grid = 0.5 * dt * np.arange(2 * n + 1)
    u = np.vstack([_sample(v, half_grid) for v in du])
    bu = model.b @ u
    forcing = bu[0] + 1j * bu[1]
    x = _kernels.rk4_affine(
        complex(a11, -a12), forcing[0:-1:2], forcing[1::2], forcing[2::2],
        np.array([complex(dx0[0], dx0[1])]), dt, backend=backend,
    )[:, 0]
    _check_divergence(x, "linear model")
    states = np.vstack([x.real, x.imag])
    y = model.c @ states + model.d @ u[:, ::2]
    return SimTrace(
        dt=dt,
        channels={"i_ld": x.real.copy(), "i_lq": x.imag.copy(),
                  "i_in": y[0], "i_od": y[1], "i_oq": y[2]},
        columns=dict(AVG_COLUMNS),
        metadata={"model": "small-signal", "integrator": "rk4-fixed", "dt": dt},
    )
