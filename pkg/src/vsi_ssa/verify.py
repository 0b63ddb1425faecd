"""End-to-end check: analytic point vs averaged model vs switched bridge."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import ConverterParams
from .sim_avg import AvgInputs, simulate_average
from .sim_switched import simulate_switched
from .smallsignal import ENTRIES, GY_LAYOUT, build_state_space, closed_form_all, transfer_matrix_numeric
from .steady_state import DEFAULT_D0, operating_point, residuals
from .trace import steady_state_of_trace


@dataclass(frozen=True)
class Tolerances:
    i_od_rel: float = 0.05
    i_oq_abs: float = 0.1
    i_in_rel: float = 0.05
    tf_rel: float = 1e-9


@dataclass(frozen=True)
class Comparison:
    name: str
    reference: float
    value: float
    tolerance: float
    kind: str  # "abs" or "rel"

    @property
    def abs_dev(self) -> float:
        return abs(self.value - self.reference)

    @property
    def rel_dev(self) -> float:
        if self.reference == 0:
            return math.inf if self.abs_dev else 0.0
        return self.abs_dev / abs(self.reference)

    @property
    def passed(self) -> bool:
        dev = self.rel_dev if self.kind == "rel" else self.abs_dev
        return dev <= self.tolerance


@dataclass
class VerifyReport:
    operating_point: object
    residuals: tuple
    averaged: dict
    switched: dict
    comparisons: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons)

    def format(self) -> str:
        op = self.operating_point
        lines = [
            "analytic operating point:",
            f"  d_d = {op.d_d:.6g}  d_q = {op.d_q:.6g}  d_0 = {op.d_0:.6g}",
            f"  i_ld = {op.i_ld:.6g} A  i_lq = {op.i_lq:.6g} A",
            "  residuals r_d, r_q, r_in = " + ", ".join(f"{r:.3g}" for r in self.residuals),
            "averaged model, trailing period mean: "
            + ", ".join(f"{k} = {v:.6g}" for k, v in self.averaged.items()),
            "switched model, trailing period mean: "
            + ", ".join(f"{k} = {v:.6g}" for k, v in self.switched.items()),
            "",
            f"{'check':<34}{'reference':>14}{'value':>14}{'abs dev':>12}{'rel dev':>12}"
            f"{'tol':>10}  result",
        ]
        for c in self.comparisons:
            lines.append(
                f"{c.name:<34}{c.reference:>14.6g}{c.value:>14.6g}{c.abs_dev:>12.3g}"
                f"{c.rel_dev:>12.3g}{c.tolerance:>7.3g} {c.kind:<3} {'PASS' if c.passed else 'FAIL'}"
            )
        lines.append("")
        lines.append("VERIFY: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


class StageError(Exception):
    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


def tf_oracle_error(params: ConverterParams, op, n_points: int = 50) -> float:
    """Worst relative gap between closed forms and the r_eq = 0 numeric matrix."""
    lossless = params.replace(r_l=0.0, r_on=0.0, r_s=0.0)
    model = build_state_space(lossless, op)
    closed = closed_form_all(params, op)
    w = params.omega_s
    worst = 0.0
    for omega in 2 * np.pi * np.logspace(0, 4, n_points):
        if abs(omega - w) <= 1e-6 * w:
            continue
        s = 1j * omega
        g = transfer_matrix_numeric(model, s)
        for name in ENTRIES:
            row, col, sign = GY_LAYOUT[name]
            ref = sign * g[row, col]
            val = closed[name](s)
            worst = max(worst, abs(val - ref) / abs(ref))
    return worst


def run_verify(params: ConverterParams, tol: Tolerances = Tolerances(), d_0: float = DEFAULT_D0,
               avg_duration=25e-3, avg_dt=1e-6, sw_duration=100e-3, sw_dt=0.5e-6) -> VerifyReport:
    period = 1.0 / params.f_grid

    try:
        op = operating_point(params, d_0)
    except Exception as exc:
        raise StageError("operating-point", exc) from exc
    res = residuals(params, op)

    try:
        avg = simulate_average(params, AvgInputs.from_operating_point(params, op),
                               duration=avg_duration, dt=avg_dt)
        avg_ss = {k: v.mean for k, v in steady_state_of_trace(avg, min(period, avg.duration)).items()}
    except Exception as exc:
        raise StageError("averaged-simulation", exc) from exc

    try:
        sw = simulate_switched(params, op, duration=sw_duration, dt=sw_dt)
        sw_ss = {k: v.mean for k, v in steady_state_of_trace(sw, min(period, sw.duration)).items()
                 if k in ("i_od", "i_oq", "i_in", "u_nn")}
    except Exception as exc:
        raise StageError("switched-simulation", exc) from exc

    try:
        tf_err = tf_oracle_error(params, op)
    except Exception as exc:
        raise StageError("small-signal", exc) from exc

    comparisons = [
        Comparison("averaged i_od vs analytic I_Ld", op.i_ld, avg_ss["i_od"], tol.i_od_rel, "rel"),
        Comparison("averaged i_in vs I_in", params.i_in, avg_ss["i_in"], tol.i_in_rel, "rel"),
        Comparison("switched <i_od> vs averaged", avg_ss["i_od"], sw_ss["i_od"], tol.i_od_rel, "rel"),
        Comparison("switched <i_oq> vs 0", 0.0, sw_ss["i_oq"], tol.i_oq_abs, "abs"),
        Comparison("switched <i_in> vs I_in", params.i_in, sw_ss["i_in"], tol.i_in_rel, "rel"),
        Comparison("closed-form TF vs C(sI-A)^-1B+D", 0.0, tf_err, tol.tf_rel, "abs"),
    ]
    return VerifyReport(operating_point=op, residuals=res, averaged=avg_ss, switched=sw_ss,
                        comparisons=comparisons)
