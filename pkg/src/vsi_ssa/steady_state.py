"""Closed-form steady-state operating point of the grid-connected inverter.

Grid-voltage orientation (u_oq = 0) and unity power factor (i_lq = 0) are
assumed. Given u_in, i_in and u_od the d-channel duty is the larger root of

    u_in * D_d**2 - u_od * D_d - (2/3) * r_eq * i_in = 0

and everything else follows from power balance.

Note on reference data: the commonly quoted d-channel current of 4.4236 A
for the default parameters does not match the duty D_d = 0.3103 quoted with
it; ``(2/3) * i_in / D_d`` gives 4.2969 A. This module follows the formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleZeroSequenceError, NoOperatingPointError, UsageError
from .params import ConverterParams

DEFAULT_D0 = 0.5


@dataclass(frozen=True)
class OperatingPoint:
    d_d: float
    d_q: float
    d_0: float
    i_ld: float
    i_lq: float = 0.0
    u_oq_set: float = 0.0

    @property
    def modulation_amplitude(self) -> float:
        """Peak of the sinusoidal part of the abc duty waveforms."""
        return math.hypot(self.d_d, self.d_q)

    @property
    def i_od(self) -> float:
        return self.i_ld

    @property
    def i_oq(self) -> float:
        return self.i_lq


def solve_duty_d(params: ConverterParams) -> float:
    if params.u_in <= 0:
        raise UsageError(f"u_in must be positive, got {params.u_in!r}")
    disc = params.u_od**2 + (8.0 / 3.0) * params.r_eq * params.u_in * params.i_in
    if disc < 0:
        raise NoOperatingPointError(
            f"no real operating point: discriminant {disc:g} < 0 "
            f"(i_in = {params.i_in:g} A is beyond the regeneration limit)"
        )
    return (params.u_od + math.sqrt(disc)) / (2.0 * params.u_in)


def solve_inductor_current_d(params: ConverterParams, d_d: float) -> float:
    if d_d == 0:
        raise ZeroDivisionError("d-channel duty is zero")
    return (2.0 / 3.0) * params.i_in / d_d


def solve_duty_q(params: ConverterParams, d_d: float) -> float:
    if d_d == 0:
        raise ZeroDivisionError("d-channel duty is zero")
    return 2.0 * params.omega_s * params.inductance * params.i_in / (3.0 * params.u_in * d_d)


def operating_point(params: ConverterParams, d_0: float = DEFAULT_D0, *,
                    enforce_duty_range: bool = True) -> OperatingPoint:
    """Assemble the operating point.

    ``d_0`` is the zero-sequence duty (constant policy). It must keep all
    three abc duty waveforms inside [0, 1], i.e. lie strictly inside
    ``(A, 1 - A)`` with ``A = hypot(d_d, d_q)``. ``enforce_duty_range=False``
    skips that check, which is only useful for studying the dq equations
    outside the modulator's linear range.
    """
    d_d = solve_duty_d(params)
    i_ld = solve_inductor_current_d(params, d_d)
    d_q = solve_duty_q(params, d_d)
    op = OperatingPoint(d_d=d_d, d_q=d_q, d_0=float(d_0), i_ld=i_ld)
    if enforce_duty_range:
        amp = op.modulation_amplitude
        if not amp < d_0 < 1.0 - amp:
            raise InfeasibleZeroSequenceError(
                f"zero-sequence duty d_0 = {d_0:g} outside the feasible interval "
                f"({amp:.6g}, {1.0 - amp:.6g}); abc duties would leave [0, 1]"
            )
    return op


def residuals(params: ConverterParams, op: OperatingPoint) -> tuple[float, float, float]:
    """Steady-state balance of the dq voltage equations and the input current.

    Returns ``(r_d, r_q, r_in)`` in volts, volts and amperes; all vanish at a
    true operating point.
    """
    wl = params.omega_s * params.inductance
    r_d = -params.r_eq * op.i_ld + wl * op.i_lq + op.d_d * params.u_in - params.u_od
    r_q = -params.r_eq * op.i_lq - wl * op.i_ld + op.d_q * params.u_in - params.u_oq
    r_in = params.i_in - 1.5 * (op.d_d * op.i_ld + op.d_q * op.i_lq)
    return r_d, r_q, r_in


def complex_power(u_od: float, u_oq: float, i_ld: float, i_lq: float) -> tuple[float, float]:
    """Active and reactive power delivered to the grid.

    Includes the 3/2 factor that the amplitude-invariant transform requires,
    so that ``p == u_in * i_in`` for a lossless converter.
    """
    p = 1.5 * (u_od * i_ld + u_oq * i_lq)
    q = 1.5 * (u_oq * i_ld - u_od * i_lq)
    return p, q
