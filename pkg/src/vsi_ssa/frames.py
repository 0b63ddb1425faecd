"""Amplitude-invariant Clarke/Park transforms.

The angle convention is theta = omega_s * t, with theta = 0 putting the
d-axis on the phase-a voltage peak. The Park matrix rows are
``(2/3)[cos, -sin, 1/2]`` evaluated at ``theta - k*2pi/3`` for phases a, b, c,
so ``x_d + j x_q = (x_alpha + j x_beta) * exp(-j theta)``.

Functions accept scalars or numpy arrays of matching shape for the three
phase inputs (and ``theta``), and broadcast.
"""

from typing import NamedTuple

import numpy as np

_SHIFT = 2.0 * np.pi / 3.0


class AbcTriple(NamedTuple):
    a: object
    b: object
    c: object


class Dq0Triple(NamedTuple):
    d: object
    q: object
    zero: object


def _phase_angles(theta):
    return theta, theta - _SHIFT, theta - 2.0 * _SHIFT


def clarke_forward(a, b, c):
    """Return ``(alpha, beta, zero)`` with the 2/3 amplitude-invariant scaling."""
    alpha = (2.0 * a - b - c) / 3.0
    beta = (b - c) / np.sqrt(3.0)
    zero = (a + b + c) / 3.0
    return alpha, beta, zero


def park_matrix(theta):
    """The 3x3 forward matrix, including the 2/3 factor."""
    ta, tb, tc = _phase_angles(theta)
    return (2.0 / 3.0) * np.array([
        [np.cos(ta), np.cos(tb), np.cos(tc)],
        [-np.sin(ta), -np.sin(tb), -np.sin(tc)],
        [0.5, 0.5, 0.5],
    ])


def inverse_park_matrix(theta):
    ta, tb, tc = _phase_angles(theta)
    return np.array([
        [np.cos(ta), -np.sin(ta), 1.0],
        [np.cos(tb), -np.sin(tb), 1.0],
        [np.cos(tc), -np.sin(tc), 1.0],
    ])


def park_forward(a, b, c, theta):
    """abc -> ``(d, q, zero)``."""
    ta, tb, tc = _phase_angles(theta)
    d = (2.0 / 3.0) * (a * np.cos(ta) + b * np.cos(tb) + c * np.cos(tc))
    q = -(2.0 / 3.0) * (a * np.sin(ta) + b * np.sin(tb) + c * np.sin(tc))
    zero = (a + b + c) / 3.0
    return Dq0Triple(d, q, zero)


def park_inverse(d, q, zero, theta):
    """``(d, q, zero)`` -> abc. Exact inverse of :func:`park_forward`."""
    ta, tb, tc = _phase_angles(theta)
    a = d * np.cos(ta) - q * np.sin(ta) + zero
    b = d * np.cos(tb) - q * np.sin(tb) + zero
    c = d * np.cos(tc) - q * np.sin(tc) + zero
    return AbcTriple(a, b, c)


def rotation_coupling_matrix(omega):
    """``T(theta) @ d(T^-1(theta))/dt`` for theta = omega * t.

    The product is independent of theta. Its negative is the speed-voltage
    coupling that appears in the dq inductor equations
    (``+omega*i_q`` in the d row, ``-omega*i_d`` in the q row).
    """
    w = float(omega)
    return np.array([
        [0.0, -w, 0.0],
        [w, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    ])
