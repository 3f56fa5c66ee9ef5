"""Frozen budget constants, each 1.2 x the empirical maximum over a fixed grid.

The grids here are disjoint from the ones used by the acceptance suite.
Run :func:`recompute` (or ``python -m triperiod.calibration``) to regenerate
the numbers; the literals below are its frozen output for
``(tau, tau') = (0.3i, 0.7i)``.
"""

from __future__ import annotations

import math

import numpy as np

SAFETY = 1.2

KERNEL_C = 0.377371
BRIDGE_C = 0.239334
TILDE_C = 283.066
AIRY_C = 0.271952

KERNEL_GRID_C = (0.2, 0.45, 0.75, 1.0, 1.3, 1.85, 2.2, 2.7)
KERNEL_GRID_T = (48.0, 96.0, 192.0, 384.0, 600.0)
BRIDGE_GRID_T = (40.0, 72.0, 150.0, 300.0, 600.0)
BRIDGE_GRID_NT = (0.25, 0.5, 0.55, 0.8, 1.5, 3.0)  # n as a multiple of t, plus n = 2 and 10
# the ratio to the budget peaks in the oscillatory regime t << n, so the
# grid samples that range densely
TILDE_GRID_N = (160, 200)
TILDE_GRID_T = tuple(3.1 + i * 3.0 for i in range(20))
AIRY_GRID_R = (0.15, 0.25)
AIRY_GRID_T = (150.0, 300.0, 600.0, 1200.0)
AIRY_GRID_DELTA = (0.92, 0.97, 1.02, 1.07, 1.1)


def reference_params():
    from triperiod.repn import RepParams

    return RepParams(0.3j, 0.7j)


def bridge_profile():
    """Fixed trigonometric profile ``1 + cos(2c) / 2`` used for the F-G bridge."""
    from triperiod.repn import CircleFunction

    return CircleFunction.from_coeffs({0: 1.0, 2: 0.25, -2: 0.25})


def airy_profile(radius: float):
    """Bump of the given radius centered at ``pi/2``, period ``pi``."""
    from triperiod.repn import CircleFunction

    def f(c):
        u = (np.asarray(c, dtype=float) % math.pi - 0.5 * math.pi) / radius
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(np.abs(u) < 1.0, np.exp(1.0 - 1.0 / np.maximum(1.0 - u * u, 1e-300)), 0.0)

    return CircleFunction.from_callable(f, period=math.pi)


def _even(x: float) -> int:
    return max(2, int(round(x / 2.0)) * 2)


def bridge_grid():
    return [(t, n) for t in BRIDGE_GRID_T for n in (2, 10) + tuple(_even(f * t) for f in BRIDGE_GRID_NT)]


def tilde_grid():
    return [(n, t) for n in TILDE_GRID_N for t in TILDE_GRID_T]


def kernel_ratio(p, t: float, c: float) -> float:
    from triperiod.asympt import kernel_budget_shape, kernel_main_term
    from triperiod.trilinear import l_kernel

    return abs(l_kernel(p, t, c).value - kernel_main_term(p, t, c)) / kernel_budget_shape(t, c)


def bridge_ratio(p, t: float, n: int) -> float:
    from triperiod.asympt import a_lambda, g_functional
    from triperiod.trilinear import f_functional

    phi = bridge_profile()
    F = f_functional(p, t, n, phi)
    G = g_functional(p, t, n, phi).value
    return abs(F - a_lambda(t) * t**-0.5 / math.sqrt(2.0 * math.pi) * G) * t**1.5 / phi.cnorm(0)


def tilde_ratio(p, t: float, n: int) -> float:
    from triperiod.asympt import remainder_budget_II
    from triperiod.repn import make_test_vector
    from triperiod.trilinear import h_form

    return h_form(p, t, make_test_vector(n, "tilde")) / remainder_budget_II(p, t, n, C=1.0)


def airy_ratio(p, t: float, n: int, radius: float) -> float:
    from triperiod.asympt import C0, g_functional, g_main_term

    phi = airy_profile(radius)
    g = g_functional(p, t, n, phi).value
    return abs(g - g_main_term(t, n, complex(phi.eval(C0)))) * t ** (2.0 / 3.0) / phi.cnorm(2)


def recompute(verbose: bool = False) -> dict:
    """Recompute all constants from their calibration grids."""
    p = reference_params()
    out = {}
    out["KERNEL_C"] = max(kernel_ratio(p, t, c) for c in KERNEL_GRID_C for t in KERNEL_GRID_T)
    out["BRIDGE_C"] = max(bridge_ratio(p, t, n) for t, n in bridge_grid())
    out["TILDE_C"] = max(tilde_ratio(p, t, n) for n, t in tilde_grid())
    out["AIRY_C"] = max(
        airy_ratio(p, t, _even(d * t / 2.0), r) for r in AIRY_GRID_R for t in AIRY_GRID_T for d in AIRY_GRID_DELTA
    )
    out = {k: SAFETY * v for k, v in out.items()}
    if verbose:
        for k, v in out.items():
            print(f"{k} = {v:.6g}")
    return out


if __name__ == "__main__":
    recompute(verbose=True)
