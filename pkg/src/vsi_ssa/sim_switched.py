"""Switch-level simulation of the three-leg bridge driven by carrier PWM.

Chain per step: grid angle -> abc duties (inverse Park with zero-sequence
injection) -> sawtooth carrier comparison -> leg states -> phase-current RK4.
Legs are ideal and complementary; r_on is already inside r_eq.

The comparator is sampled once per integration step, at the step midpoint,
and the resulting switch state is held for the whole step. Midpoint sampling
makes the per-period duty quantisation unbiased (``round`` rather than
``ceil`` of ``d * f_sw^-1 / dt``); sampling at the step start adds roughly
half a sample of duty to every leg and visibly shifts the currents.

Because the modulation is open loop, every switch state and grid voltage is
known before integrating, so the state equation reduces to three decoupled
affine ODEs handled by :func:`vsi_ssa._kernels.rk4_affine`.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DivergedError, InfeasibleDutyError, UsageError
from .frames import park_forward, park_inverse
from .params import ConverterParams
from .steady_state import OperatingPoint
from .trace import SimTrace

DEFAULT_DT = 0.5e-6
DEFAULT_DURATION = 100e-3
DIVERGENCE_LIMIT = 1e6

SWITCHED_COLUMNS = {
    "i_a": "i_a_a",
    "i_b": "i_b_a",
    "i_c": "i_c_a",
    "i_in": "i_in_a",
    "u_nn": "u_nn_v",
    "u_an": "u_an_v",
    "d_a": "d_a",
    "d_b": "d_b",
    "d_c": "d_c",
    "i_od": "i_od_a",
    "i_oq": "i_oq_a",
}


class SwitchState(NamedTuple):
    """Upper-switch conduction per leg; the lower switch is the complement."""

    s_a: bool
    s_b: bool
    s_c: bool

    @property
    def closed(self) -> int:
        return int(self.s_a) + int(self.s_b) + int(self.s_c)


class SwitchedState(NamedTuple):
    i_a: float
    i_b: float
    i_c: float
    t: float = 0.0


def duty_waveforms(op: OperatingPoint, theta):
    """abc duty ratios at grid angle ``theta`` (scalar or array).

    Raises InfeasibleDutyError if any value leaves [0, 1].
    """
    d_a, d_b, d_c = park_inverse(op.d_d, op.d_q, op.d_0, theta)
    lo = min(np.min(d_a), np.min(d_b), np.min(d_c))
    hi = max(np.max(d_a), np.max(d_b), np.max(d_c))
    if lo < 0.0 or hi > 1.0:
        raise InfeasibleDutyError(
            f"duty waveforms span [{lo:.6g}, {hi:.6g}], outside [0, 1] "
            f"(d_0 = {op.d_0:g}, modulation amplitude {op.modulation_amplitude:.6g})"
        )
    return d_a, d_b, d_c


def check_duty_range(op: OperatingPoint):
    """Raise unless the duty waveforms stay in [0, 1] for every grid angle."""
    amp = op.modulation_amplitude
    if op.d_0 - amp < 0.0 or op.d_0 + amp > 1.0:
        raise InfeasibleDutyError(
            f"duty waveforms span [{op.d_0 - amp:.6g}, {op.d_0 + amp:.6g}] over a period, "
            f"outside [0, 1]"
        )


def carrier(t, f_sw):
    """Rising sawtooth in [0, 1) with period ``1/f_sw``."""
    x = np.asarray(t, dtype=float) * f_sw
    out = x - np.floor(x)
    return float(out) if out.ndim == 0 else out


def switch_states(duties, carrier_value) -> SwitchState:
    d_a, d_b, d_c = duties
    return SwitchState(bool(carrier_value < d_a), bool(carrier_value < d_b), bool(carrier_value < d_c))


def u_nN_of_state(state, u_dc):
    """Grid-neutral to negative-rail voltage, ``k * u_dc / 3`` with k closed upper switches."""
    k = int(state[0]) + int(state[1]) + int(state[2])
    return k * u_dc / 3.0


def grid_voltages(params: ConverterParams, t):
    """Balanced grid phase voltages whose Park transform at ``omega_s t`` is ``(u_od, u_oq, 0)``."""
    return park_inverse(params.u_od, params.u_oq, 0.0, params.omega_s * np.asarray(t, dtype=float))


def bridge_derivative(params: ConverterParams, state, switch, t):
    """Phase-current derivatives for a fixed switch state."""
    u_in = params.u_in
    u_nn = u_nN_of_state(switch, u_in)
    grid = grid_voltages(params, t)
    L = params.inductance
    r = params.r_eq
    return tuple(
        (float(s) * u_in - r * i - float(u) - u_nn) / L
        for s, i, u in zip(switch, state[:3], grid)
    )


def simulate_switched(params: ConverterParams, op: OperatingPoint, duration=DEFAULT_DURATION,
                      dt=DEFAULT_DT, initial=None, backend=None) -> SimTrace:
    """Run the switched bridge open loop with the duties of ``op``.

    Channels (per sample ``t_k = k dt``): phase currents, the DC-link current
    ``i_in = sum(s_x i_x)`` averaged over the step that starts at ``t_k``, ``u_nn``, leg voltage ``u_an = s_a u_in - u_nn``,
    the abc duties, the Park-frame currents and the switch states ``s_a..s_c``
    that are held over ``[t_k, t_k + dt)``.
    """
    if not dt > 0:
        raise UsageError(f"dt must be positive, got {dt!r}")
    if dt > (1.0 / (20.0 * params.f_sw)) * (1 + 1e-9):
        raise UsageError(
            f"dt = {dt:g} s gives fewer than 20 samples per switching period "
            f"(need dt <= {1.0 / (20.0 * params.f_sw):g} s)"
        )
    if not duration >= dt * (1 - 1e-9):
        raise UsageError(f"duration {duration!r} is shorter than one step dt = {dt!r}")
    check_duty_range(op)
    n = max(1, int(round(duration / dt)))
    initial = SwitchedState(0.0, 0.0, 0.0) if initial is None else initial
    L = params.inductance
    u_in = params.u_in
    w = params.omega_s

    t0 = float(getattr(initial, "t", 0.0))
    t = t0 + np.arange(n + 1) * dt
    t_mid = t + 0.5 * dt
    # comparator sampled at the step midpoint and held over the step
    duty_mid = duty_waveforms(op, w * t_mid)
    c_mid = carrier(t_mid, params.f_sw)
    s = np.vstack([c_mid < d for d in duty_mid])  # (3, n+1)
    k_closed = s.sum(axis=0)
    u_nn = k_closed * u_in / 3.0
    leg = s * u_in - u_nn  # (3, n+1) leg-to-grid-neutral voltage

    grid_t = np.vstack(grid_voltages(params, t))
    grid_mid = np.vstack(grid_voltages(params, t_mid))
    g0 = (leg[:, :-1] - grid_t[:, :-1]) / L
    gm = (leg[:, :-1] - grid_mid[:, :-1]) / L
    g1 = (leg[:, :-1] - grid_t[:, 1:]) / L

    x = _kernels.rk4_affine(
        -params.r_eq / L, g0.T, gm.T, g1.T,
        np.array([initial[0], initial[1], initial[2]], dtype=float), dt, backend=backend,
    ).real
    bad = ~np.isfinite(x) | (np.abs(x) > DIVERGENCE_LIMIT)
    if bad.any():
        idx = int(np.argmax(bad.any(axis=1)))
        raise DivergedError(f"switched model diverged at sample {idx}", index=idx)

    i_a, i_b, i_c = x[:, 0].copy(), x[:, 1].copy(), x[:, 2].copy()
    # DC-link current over each held interval: switch state times the
    # trapezoidal mean of the phase current across the step.
    i_step = x.copy()
    i_step[:-1] = 0.5 * (x[:-1] + x[1:])
    i_in = (s.T * i_step).sum(axis=1)
    d_a, d_b, d_c = duty_waveforms(op, w * t)
    i_od, i_oq, _ = park_forward(i_a, i_b, i_c, w * t)
    return SimTrace(
        dt=dt,
        channels={
            "i_a": i_a, "i_b": i_b, "i_c": i_c,
            "i_in": i_in,
            "u_nn": u_nn,
            "u_an": leg[0],
            "d_a": d_a, "d_b": d_b, "d_c": d_c,
            "i_od": i_od, "i_oq": i_oq,
            "s_a": s[0].astype(np.int8), "s_b": s[1].astype(np.int8), "s_c": s[2].astype(np.int8),
        },
        columns=dict(SWITCHED_COLUMNS),
        metadata={
            "model": "switched-bridge",
            "integrator": "rk4-fixed, switch state held per step (midpoint comparator)",
            "dt": dt,
            "t0": t0,
            "f_sw": params.f_sw,
            "f_grid": params.f_grid,
            "d_0": op.d_0,
            "params": params,
            "operating_point": op,
        },
    )


def fundamental_period(params: ConverterParams) -> float:
    return 1.0 / params.f_grid


def dominant_frequency(signal, dt) -> float:
    """Frequency (Hz) of the largest non-DC spectral line."""
    signal = np.asarray(signal, dtype=float)
    spec = np.abs(np.fft.rfft(signal - signal.mean()))
    freqs = np.fft.rfftfreq(len(signal), dt)
    return float(freqs[1:][np.argmax(spec[1:])])

