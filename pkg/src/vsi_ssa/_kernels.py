"""Hot loops: numba-compiled kernels with a vectorised numpy/scipy fallback.

The backend is chosen once at import from the ``VSI_SSA_NUMBA`` environment
variable (``0``/``false``/``off`` selects the fallback). Every public kernel
also accepts an explicit ``backend=`` so both paths can be compared in the
same process.

Both simulators reduce to the same affine ODE per state column::

    dx/dt = a * x + g(t)

with a constant complex coefficient ``a`` and a forcing term known ahead of
time (the simulation is open loop). The averaged dq model uses one complex
column (``x = i_d + j i_q``), the switched bridge three real ones.
"""

import os

import numpy as np
from scipy.signal import lfilter

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

BACKENDS = ("numba", "numpy")


def _default_backend():
    flag = os.environ.get("VSI_SSA_NUMBA", "1").strip().lower()
    if numba is None or flag in ("0", "false", "off", "no"):
        return "numpy"
    return "numba"


BACKEND = _default_backend()


def _resolve(backend):
    backend = BACKEND if backend is None else backend
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and numba is None:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


def _njit(func):
    if numba is None:
        return func
    return numba.njit(cache=True)(func)


# ---------------------------------------------------------------------------
# classical RK4 on dx/dt = a x + g(t)


@_njit
def _rk4_affine_loop(a, g0, gm, g1, x0, h):
    n, m = g0.shape
    x = np.empty((n + 1, m), dtype=np.complex128)
    for j in range(m):
        x[0, j] = x0[j]
    half = 0.5 * h
    for k in range(n):
        for j in range(m):
            xk = x[k, j]
            k1 = a * xk + g0[k, j]
            k2 = a * (xk + half * k1) + gm[k, j]
            k3 = a * (xk + half * k2) + gm[k, j]
            k4 = a * (xk + h * k3) + g1[k, j]
            x[k + 1, j] = xk + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def _rk4_affine_vectorised(a, g0, gm, g1, x0, h):
    # One RK4 step of the affine ODE collapses to x+ = phi*x + c_k, where phi
    # is the degree-4 Taylor polynomial of exp(a h) and c_k mixes the three
    # forcing samples. The resulting first-order recurrence is an IIR filter.
    z = a * h
    phi = 1 + z + z**2 / 2 + z**3 / 6 + z**4 / 24
    w0 = 1 + z + z**2 / 2 + z**3 / 4
    wm = 4 + 2 * z + z**2 / 2
    c = (h / 6) * (w0 * g0 + wm * gm + g1)
    n, m = g0.shape
    x = np.empty((n + 1, m), dtype=np.complex128)
    x[0] = x0
    for j in range(m):
        x[1:, j] = lfilter([1.0], [1.0, -phi], c[:, j], zi=[phi * x0[j]])[0]
    return x


def rk4_affine(a, g0, gm, g1, x0, h, backend=None):
    """Integrate ``dx/dt = a x + g(t)`` with fixed-step classical RK4.

    ``g0``, ``gm`` and ``g1`` hold the forcing at the start, midpoint and end
    of every step, shape ``(n_steps, n_columns)``. Returns the trajectory of
    shape ``(n_steps + 1, n_columns)`` as complex numbers.
    """
    g0 = np.ascontiguousarray(np.atleast_2d(g0.T).T, dtype=np.complex128)
    gm = np.ascontiguousarray(np.atleast_2d(gm.T).T, dtype=np.complex128)
    g1 = np.ascontiguousarray(np.atleast_2d(g1.T).T, dtype=np.complex128)
    x0 = np.ascontiguousarray(np.atleast_1d(x0), dtype=np.complex128)
    if not (g0.shape == gm.shape == g1.shape) or g0.shape[1] != x0.shape[0]:
        raise ValueError("forcing arrays and initial state have inconsistent shapes")
    if _resolve(backend) == "numba":
        return _rk4_affine_loop(complex(a), g0, gm, g1, x0, float(h))
    return _rk4_affine_vectorised(complex(a), g0, gm, g1, x0, float(h))


# ---------------------------------------------------------------------------
# trailing moving average


@_njit
def _moving_average_loop(x, m):
    n, k = x.shape
    out = np.empty((n, k))
    for j in range(k):
        acc = 0.0
        for i in range(n):
            acc += x[i, j]
            if i >= m:
                acc -= x[i - m, j]
            out[i, j] = acc / min(i + 1, m)
    return out


def _moving_average_vectorised(x, m):
    n = x.shape[0]
    csum = np.cumsum(x, axis=0)
    out = np.empty_like(csum)
    head = min(m, n)
    out[:head] = csum[:head] / np.arange(1, head + 1)[:, None]
    if n > m:
        out[m:] = (csum[m:] - csum[:-m]) / m
    return out


def moving_average(x, m, backend=None):
    """Trailing mean over ``m`` samples along axis 0.

    The first ``m - 1`` outputs average only the samples seen so far.
    """
    x = np.asarray(x, dtype=np.float64)
    flat = x.ndim == 1
    x2 = np.ascontiguousarray(x[:, None] if flat else x)
    if m < 1:
        raise ValueError("window must span at least one sample")
    if _resolve(backend) == "numba":
        out = _moving_average_loop(x2, int(m))
    else:
        out = _moving_average_vectorised(x2, int(m))
    return out[:, 0] if flat else out
