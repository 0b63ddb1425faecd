"""Inverter switch states, sector lookup and the per-sector u_nN sequences.

Only the state order within a switching period is modelled; dwell times are
not computed (the simulator uses carrier comparison, not an SVM modulator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import UsageError
from .frames import clarke_forward
from .sim_switched import SwitchState, u_nN_of_state

# Active vectors advance 60 degrees counter-clockwise from SV1 at angle 0.
STATES = {
    "SV0": SwitchState(False, False, False),
    "SV1": SwitchState(True, False, False),
    "SV2": SwitchState(True, True, False),
    "SV3": SwitchState(False, True, False),
    "SV4": SwitchState(False, True, True),
    "SV5": SwitchState(False, False, True),
    "SV6": SwitchState(True, False, True),
    "SV7": SwitchState(True, True, True),
}


@dataclass(frozen=True)
class SectorSequence:
    sector: int
    states: tuple
    u_nn_levels: tuple


def enumerate_states() -> dict[str, SwitchState]:
    return dict(STATES)


def state_vector(label: str, u_dc: float = 1.0) -> complex:
    """Stationary-frame (alpha + j beta) vector of a state's leg voltages."""
    s = STATES[label]
    alpha, beta, _ = clarke_forward(*(u_dc * float(x) for x in s))
    return complex(alpha, beta)


def sector_of(theta: float) -> int:
    """Sector 1..6 on half-open intervals ``[k pi/3, (k+1) pi/3)``."""
    norm = math.fmod(theta, 2.0 * math.pi)
    if norm < 0:
        norm += 2.0 * math.pi
    return min(int(norm // (math.pi / 3.0)), 5) + 1


def sector_sequence(sector: int, u_dc: float = 1.0) -> SectorSequence:
    """Centre-aligned state order for ``sector``, mirrored over the period.

    The one-switch active state comes first so every transition toggles a
    single leg: SV0 -> one leg high -> two legs high -> SV7.
    """
    if sector not in range(1, 7):
        raise UsageError(f"sector must be in 1..6, got {sector!r}")
    first = sector if sector % 2 == 1 else sector + 1
    second = sector + 1 if sector % 2 == 1 else sector
    first = (first - 1) % 6 + 1
    second = (second - 1) % 6 + 1
    half = ("SV0", f"SV{first}", f"SV{second}", "SV7")
    states = half + half[::-1]
    levels = tuple(u_nN_of_state(STATES[s], u_dc) for s in states)
    return SectorSequence(sector=sector, states=states, u_nn_levels=levels)


def all_sector_sequences(u_dc: float = 1.0) -> list[SectorSequence]:
    return [sector_sequence(k, u_dc) for k in range(1, 7)]


def format_table(u_dc: float) -> str:
    lines = []
    for seq in all_sector_sequences(u_dc):
        lines.append(f"sector {seq.sector}: " + " ".join(seq.states))
        lines.append("  u_nN [V]: " + " ".join(f"{v:g}" for v in seq.u_nn_levels))
    return "\n".join(lines)
