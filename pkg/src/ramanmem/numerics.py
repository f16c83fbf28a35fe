"""Small numeric helpers shared across modules."""

import numpy as np
from numba import njit

#: |x| below which sinc falls back to its Taylor expansion (avoids 0/0).
SINC_TAYLOR_CUTOFF = 1e-4


def sinc(x):
    """sin(x)/x with a Taylor branch 1 - x^2/6 + x^4/120 for |x| < 1e-4."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SINC_TAYLOR_CUTOFF
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x * x / 6.0 + x ** 4 / 120.0, np.sin(safe) / safe)
    if out.ndim == 0:
        return float(out)
    return out


@njit(cache=True)
def sinc_scalar(x):
    if abs(x) < SINC_TAYLOR_CUTOFF:
        return 1.0 - x * x / 6.0 + x ** 4 / 120.0
    return np.sin(x) / x


def relative_l2(measured, reference, t=None):
    """Relative L2 distance ||measured - reference|| / ||reference||.

    With `t` given, norms are trapezoid integrals over the grid; otherwise
    plain vector norms.
    """
    measured = np.asarray(measured)
    reference = np.asarray(reference)
    d = np.abs(measured - reference) ** 2
    r = np.abs(reference) ** 2
    if t is not None:
        num = np.trapezoid(d, t)
        den = np.trapezoid(r, t)
    else:
        num = d.sum()
        den = r.sum()
    if den == 0.0:
        return np.inf if num > 0 else 0.0
    return float(np.sqrt(num / den))


def pearson(a, b):
    """Pearson correlation of two real sequences."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.corrcoef(a, b)[0, 1])


def record_energy(t, values):
    """Trapezoid integral of |values|^2 over t."""
    return float(np.trapezoid(np.abs(np.asarray(values)) ** 2, t))
