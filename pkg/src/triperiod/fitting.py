"""Log-log exponent fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from triperiod.errors import DomainError


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r2: float

    def __iter__(self):
        return iter((self.slope, self.intercept, self.r2))


def fit_exponent(pairs) -> ExponentFit:
    """Least-squares line through ``(ln x, ln y)``.

    Parameters
    ----------
    pairs : sequence of (x, y)
        At least three pairs, all entries positive.

    Returns
    -------
    ExponentFit
        ``(slope, intercept, r2)``; unpacks as a tuple.

    Examples
    --------
    >>> round(fit_exponent([(1, 7), (2, 7 * 2**-2), (4, 7 * 4**-2)]).slope, 12)
    -2.0
    """
    arr = np.asarray(list(pairs), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("pairs must be a sequence of (x, y)")
    if len(arr) < 3:
        raise DomainError("need at least three pairs")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("all x and y must be positive and finite")
    lx, ly = np.log(arr[:, 0]), np.log(arr[:, 1])
    if np.ptp(lx) == 0:
        raise DomainError("x values must not all coincide")
    res = linregress(lx, ly)
    r2 = res.rvalue**2 if math.isfinite(res.rvalue) else 1.0
    return ExponentFit(float(res.slope), float(res.intercept), float(r2))
