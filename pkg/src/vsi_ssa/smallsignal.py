"""Linearised dq model: state-space matrices and the 3x5 admittance matrix.

Orderings::

    state   x = [i_Ld, i_Lq]
    input   u = [u_in, u_od, u_oq, d_d, d_q]
    output  y = [i_in, i_od, i_oq]

Closed-form entries neglect r_eq and share the denominator s**2 + omega_s**2.
They are stored expanded (numerator polynomial over that denominator), which
keeps entries such as T_oi_q well defined when d_q == 0.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PoleError, UsageError
from .params import ConverterParams
from .steady_state import OperatingPoint

STATES = ("i_ld", "i_lq")
INPUTS = ("u_in", "u_od", "u_oq", "d_d", "d_q")
OUTPUTS = ("i_in", "i_od", "i_oq")

# entry name -> (row, column, sign) inside G_Y. The output admittances are
# defined with the opposite current direction, hence sign -1.
GY_LAYOUT = {
    "Y_in": (0, 0, 1),
    "T_oi_d": (0, 1, 1),
    "T_oi_q": (0, 2, 1),
    "G_ci_d": (0, 3, 1),
    "G_ci_q": (0, 4, 1),
    "G_io_d": (1, 0, 1),
    "Y_o_d": (1, 1, -1),
    "G_cr_qd": (1, 2, 1),
    "G_co_d": (1, 3, 1),
    "G_co_qd": (1, 4, 1),
    "G_io_q": (2, 0, 1),
    "G_cr_dq": (2, 1, 1),
    "Y_o_q": (2, 2, -1),
    "G_co_dq": (2, 3, 1),
    "G_co_q": (2, 4, 1),
}
ENTRIES = tuple(GY_LAYOUT)


@dataclass(frozen=True)
class StateSpaceModel:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def derivative(self, dx, du):
        return self.a @ np.asarray(dx, dtype=float) + self.b @ np.asarray(du, dtype=float)

    def output(self, dx, du):
        return self.c @ np.asarray(dx, dtype=float) + self.d @ np.asarray(du, dtype=float)


@dataclass(frozen=True)
class RationalTransferFunction:
    """``sum(num[k] s**k) / sum(den[k] s**k)``, coefficients in ascending degree."""

    numerator: tuple
    denominator: tuple
    name: str = ""

    def __call__(self, s):
        den = np.polynomial.polynomial.polyval(s, self.denominator)
        num = np.polynomial.polynomial.polyval(s, self.numerator)
        if np.any(den == 0):
            raise PoleError(f"{self.name or 'transfer function'} evaluated at a pole s = {s!r}",
                            pole=s)
        return num / den

    def poles(self):
        return np.polynomial.polynomial.polyroots(self.denominator)

    def zeros(self):
        return np.polynomial.polynomial.polyroots(self.numerator)


def build_state_space(params: ConverterParams, op: OperatingPoint) -> StateSpaceModel:
    if op.d_d == 0:
        raise ZeroDivisionError("d-channel duty is zero; the i_in/d_d feed-through is undefined")
    L = params.inductance
    w = params.omega_s
    damping = params.r_eq / L
    a = np.array([[-damping, w], [-w, -damping]])
    b = np.array([
        [op.d_d / L, -1.0 / L, 0.0, params.u_in / L, 0.0],
        [op.d_q / L, 0.0, -1.0 / L, 0.0, params.u_in / L],
    ])
    c = np.array([[1.5 * op.d_d, 1.5 * op.d_q], [1.0, 0.0], [0.0, 1.0]])
    d = np.zeros((3, 5))
    d[0, 3] = params.i_in / op.d_d
    return StateSpaceModel(a=a, b=b, c=c, d=d)


def transfer_matrix_numeric(model: StateSpaceModel, s: complex) -> np.ndarray:
    """``C (sI - A)^-1 B + D`` at one complex frequency, via the 2x2 adjugate."""
    (a11, a12), (a21, a22) = model.a
    m11, m12, m21, m22 = s - a11, -a12, -a21, s - a22
    det = m11 * m22 - m12 * m21
    scale = max(abs(s) ** 2, abs(a11 * a22), abs(a12 * a21), 1e-300)
    if abs(det) <= 1e-13 * scale:
        eig = np.linalg.eigvals(model.a)
        hit = eig[np.argmin(abs(eig - s))]
        raise PoleError(f"s = {s!r} coincides with eigenvalue {hit!r} of A", pole=hit)
    inv = np.array([[m22, -m12], [-m21, m11]]) / det
    return model.c @ inv @ model.b + model.d


def closed_form_tf(params: ConverterParams, op: OperatingPoint, which: str) -> RationalTransferFunction:
    """One r_eq-neglected entry of G_Y, by name (see :data:`ENTRIES`).

    Every entry returns the quantity its name defines; for ``Y_o_d`` and
    ``Y_o_q`` that is ``-i_o/u_o``, i.e. the negative of the G_Y element.
    """
    try:
        num = _closed_form_numerators(params, op)[which]
    except KeyError:
        raise UsageError(f"unknown transfer function {which!r}; valid: {', '.join(ENTRIES)}") from None
    w = params.omega_s
    return RationalTransferFunction(tuple(float(v) for v in num), (w * w, 0.0, 1.0), which)


def closed_form_all(params: ConverterParams, op: OperatingPoint) -> dict:
    return {name: closed_form_tf(params, op, name) for name in ENTRIES}


def _closed_form_numerators(params, op):
    L = params.inductance
    w = params.omega_s
    U = params.u_in
    dd, dq = op.d_d, op.d_q
    k = 1.5 / L
    return {
        "Y_in": (0.0, k * (dd * dd + dq * dq)),
        "T_oi_d": (k * dq * w, -k * dd),
        "T_oi_q": (-k * dd * w, -k * dq),
        # the constant term cancels by the steady-state d_q relation
        "G_ci_d": (0.0, k * U * dd, params.i_in / dd),
        "G_ci_q": (k * U * dd * w, k * U * dq),
        "G_io_d": (dq * w / L, dd / L),
        "G_io_q": (-dd * w / L, dq / L),
        "Y_o_d": (0.0, 1.0 / L),
        "Y_o_q": (0.0, 1.0 / L),
        "G_cr_qd": (-w / L,),
        "G_cr_dq": (w / L,),
        "G_co_d": (0.0, U / L),
        "G_co_q": (0.0, U / L),
        "G_co_qd": (U * w / L,),
        "G_co_dq": (-U * w / L,),
    }


def linearized_derivative(params: ConverterParams, op: OperatingPoint, dx, du):
    """Small-signal state derivative ``A dx + B du`` around ``op``."""
    return tuple(build_state_space(params, op).derivative(dx, du))


# ---------------------------------------------------------------------------
# frequency sweeps


@dataclass(frozen=True)
class ResponsePoint:
    freq_hz: float
    entry: str
    value: complex
    pole: bool = False

    @property
    def mag_db(self) -> float:
        return 20.0 * math.log10(abs(self.value)) if not self.pole else math.nan

    @property
    def phase_deg(self) -> float:
        return math.degrees(cmath.phase(self.value)) if not self.pole else math.nan


@dataclass(frozen=True)
class ResponseRow:
    freq_hz: float
    entry: str
    re: float
    im: float
    mag_db: float
    phase_deg: float
    phase_unwrapped_deg: float
    pole: bool


def _threads():
    try:
        return max(0, int(os.environ.get("VSI_SSA_THREADS", "0")))
    except ValueError:
        return 0


def _evaluate_point(source, f, entries):
    s = 2j * math.pi * f
    if isinstance(source, StateSpaceModel):
        try:
            g = transfer_matrix_numeric(source, s)
        except PoleError:
            return [ResponsePoint(f, e, complex(math.nan, math.nan), True) for e in entries]
        out = []
        for e in entries:
            row, col, sign = GY_LAYOUT[e]
            out.append(ResponsePoint(f, e, complex(sign * g[row, col])))
        return out
    out = []
    for e in entries:
        tf = source[e]
        den = np.polynomial.polynomial.polyval(s, tf.denominator)
        if abs(den) <= 1e-13 * max(abs(s) ** 2, abs(tf.denominator[0])):
            out.append(ResponsePoint(f, e, complex(math.nan, math.nan), True))
        else:
            out.append(ResponsePoint(f, e, complex(tf(s))))
    return out


def frequency_response(source, frequencies, entries=None, threads=None) -> list[ResponseRow]:
    """Evaluate entries at ``s = j 2 pi f`` for every ``f`` in ``frequencies``.

    ``source`` is a :class:`StateSpaceModel` (numeric route) or a mapping of
    entry name to :class:`RationalTransferFunction` (closed forms). Rows come
    back ordered by frequency, then by entry. Points that land on an undamped
    pole are flagged instead of raising. Phase is unwrapped per entry along
    the frequency axis.
    """
    freqs = [float(f) for f in frequencies]
    if not freqs:
        raise UsageError("frequency list is empty")
    if any(not f > 0 for f in freqs):
        raise UsageError("frequencies must be positive")
    if entries is None:
        entries = ENTRIES if isinstance(source, StateSpaceModel) else tuple(source)
    entries = tuple(entries)
    if not entries:
        raise UsageError("no transfer-function entries requested")
    unknown = [e for e in entries if e not in GY_LAYOUT]
    if unknown:
        raise UsageError(f"unknown entries {unknown}; valid: {', '.join(ENTRIES)}")

    threads = _threads() if threads is None else threads
    if threads > 1 and len(freqs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_freq = list(pool.map(lambda f: _evaluate_point(source, f, entries), freqs))
    else:
        per_freq = [_evaluate_point(source, f, entries) for f in freqs]

    unwrapped = {}
    for j, e in enumerate(entries):
        phases = np.array([pts[j].phase_deg for pts in per_freq])
        unwrapped[e] = _unwrap_deg(phases)

    rows = []
    for i, pts in enumerate(per_freq):
        for j, p in enumerate(pts):
            rows.append(ResponseRow(
                freq_hz=p.freq_hz, entry=p.entry, re=p.value.real, im=p.value.imag,
                mag_db=p.mag_db, phase_deg=p.phase_deg,
                phase_unwrapped_deg=float(unwrapped[p.entry][i]), pole=p.pole,
            ))
    return rows


def _unwrap_deg(phases):
    # nearest-branch continuation that skips pole points (NaN)
    out = np.full_like(phases, np.nan)
    prev = None
    for i, p in enumerate(phases):
        if math.isnan(p):
            continue
        if prev is not None:
            p = p - 360.0 * round((p - prev) / 360.0)
        out[i] = p
        prev = p
    return out


FREQRESP_HEADER = ("freq_hz", "entry", "re", "im", "mag_db", "phase_deg", "phase_unwrapped_deg")


def format_response_rows(rows, source=None):
    """CSV lines (without header) for ``rows``; appends source and flag columns if ``source``."""
    lines = []
    for r in rows:
        fields = [repr(r.freq_hz), r.entry, repr(r.re), repr(r.im), repr(r.mag_db),
                  repr(r.phase_deg), repr(r.phase_unwrapped_deg)]
        if source is not None:
            fields += [source, "pole" if r.pole else ""]
        lines.append(",".join(fields))
    return lines


def write_freqresp_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(FREQRESP_HEADER) + "\n")
        for line in format_response_rows(rows):
            fh.write(line + "\n")
