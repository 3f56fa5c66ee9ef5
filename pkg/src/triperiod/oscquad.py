"""Adaptive quadrature for oscillatory integrands with algebraic singularities.

Integrands of the form ``|y - p|^sigma * h(y)`` with ``Re sigma > -1``,
possibly with a large imaginary part (oscillation in ``ln|y - p|``) and a
large linear frequency, are integrated as follows.

1. The interval is split at declared singular points and at midpoints, so
   every piece has at most one singular endpoint.
2. On a singular piece the substitution ``y = p + L w^q`` with
   ``q = 1 / (1 + Re sigma)`` removes the algebraic blow-up, and panels are
   graded geometrically in ``w`` with a ratio set by the log-frequency.
3. Panels are capped at roughly one wavelength of the declared linear
   frequency, then refined adaptively by comparing a Gauss-Legendre rule
   on each panel with the same rule on its two halves.
4. The innermost sliver ``[0, w_min]`` is replaced by the closed-form
   integral of the local power law, which is checked against the adjacent
   panel and counted into the error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from triperiod.errors import DomainError, SingularityError

GL_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
DEFAULT_MAX_EVALS = 10_000_000
_CHUNK = 400_000
_ROUNDOFF = 50.0 * np.finfo(float).eps
_MAX_STALL = 4  # refinement rounds (each doubling work) without halving the error


@dataclass(frozen=True)
class QuadResult:
    """Value, error estimate, evaluation count and convergence flag."""

    value: complex
    err_estimate: float
    n_evals: int
    converged: bool

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.err_estimate + other.err_estimate,
            self.n_evals + other.n_evals,
            self.converged and other.converged,
        )

    def scaled(self, factor: complex) -> "QuadResult":
        return QuadResult(self.value * factor, self.err_estimate * abs(factor), self.n_evals, self.converged)


@dataclass(frozen=True)
class SingularitySpec:
    """Declared singular points with their local power-law exponents.

    Parameters
    ----------
    locations : sequence of float
        Singular points. On the circle they are reduced modulo the period.
    exponents : sequence
        Exponent ``sigma`` of ``|y - p|^sigma`` at each location, or a
        single value used for all. An entry may itself be a tuple when the
        integrand mixes several power laws ``sum_k C_k |y - p|^{sigma_k}``
        at that point. Real parts must exceed -1. Imaginary parts are
        log-frequencies; giving them exactly makes the endpoint correction
        sharp.
    log_freqs : sequence of float, optional
        Log-frequency used for mesh grading. Defaults to the largest
        ``|Im sigma_k|`` at each location.
    """

    locations: tuple = ()
    exponents: tuple = ()
    log_freqs: tuple | None = None

    def __post_init__(self):
        locs = tuple(float(x) for x in np.atleast_1d(np.asarray(self.locations, dtype=float)))
        raw = self.exponents
        if np.isscalar(raw) or isinstance(raw, complex):
            raw = (raw,)
        exps = tuple(tuple(complex(v) for v in np.atleast_1d(np.asarray(e, dtype=complex))) for e in raw)
        if len(exps) == 1 and len(locs) > 1:
            exps = exps * len(locs)
        if len(locs) and len(exps) != len(locs):
            raise DomainError("one exponent per singular location is required")
        if not len(locs):
            exps = ()
        for group in exps:
            if not group:
                raise DomainError("empty exponent group")
            for e in group:
                if e.real <= -1.0:
                    raise DomainError(f"exponent real part must exceed -1, got {e.real}")
        if self.log_freqs is None:
            lf = tuple(max(abs(e.imag) for e in group) for group in exps)
        else:
            lf = tuple(float(x) for x in np.atleast_1d(self.log_freqs))
            if len(lf) == 1 and len(locs) > 1:
                lf = lf * len(locs)
            if len(lf) != len(locs):
                raise DomainError("one log-frequency per singular location is required")
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "log_freqs", lf)

    @property
    def exponent_real_part(self) -> tuple:
        """Smallest real part of the exponents at each location."""
        return tuple(min(e.real for e in group) for group in self.exponents)

    @classmethod
    def none(cls) -> "SingularitySpec":
        return cls()


@dataclass
class _Piece:
    p: float  # anchor (singular endpoint, or left end for regular pieces)
    sign: float
    length: float
    q: float
    sigmas: tuple | None  # None for a regular piece
    w_min: float = 0.0


def _pieces(a: float, b: float, sing_pts: list[tuple[float, complex, float]], rel_eps: float):
    """Split [a, b] into pieces with at most one singular endpoint."""
    span = b - a
    inner = sorted((x, s, lf) for x, s, lf in sing_pts if a + rel_eps * span < x < b - rel_eps * span)
    at_a = [(s, lf) for x, s, lf in sing_pts if abs(x - a) <= rel_eps * span]
    at_b = [(s, lf) for x, s, lf in sing_pts if abs(x - b) <= rel_eps * span]
    nodes = [(a, at_a[0] if at_a else None)] + [(x, (s, lf)) for x, s, lf in inner] + [(b, at_b[0] if at_b else None)]
    out = []
    for (x0, s0), (x1, s1) in zip(nodes[:-1], nodes[1:]):
        if s0 is not None and s1 is not None:
            mid = 0.5 * (x0 + x1)
            out.append(((x0, mid), s0, "left"))
            out.append(((mid, x1), s1, "right"))
        elif s0 is not None:
            out.append(((x0, x1), s0, "left"))
        elif s1 is not None:
            out.append(((x0, x1), s1, "right"))
        else:
            out.append(((x0, x1), None, None))
    return out


def _exp_for_q(sigmas) -> float:
    r = min(s.real for s in sigmas)
    return 1.0 / (1.0 + r) if r < 0 else 1.0


class _Integrator:
    def __init__(self, f: Callable, freq: float, max_evals: int):
        self.f = f
        self.freq = float(freq)
        self.max_evals = int(max_evals)
        self.n_evals = 0

    def eval_nodes(self, piece_idx, w, pieces_arr):
        p, sgn, length, q = (arr[piece_idx] for arr in pieces_arr)
        wq = np.power(w, q)
        y = p + sgn * length * wq
        jac = length * q * np.where(q == 1.0, 1.0, np.power(w, q - 1.0))
        vals = np.empty(y.shape, dtype=complex)
        for s in range(0, y.size, _CHUNK):
            out = np.asarray(self.f(y[s:s + _CHUNK]), dtype=complex)
            vals[s:s + _CHUNK] = np.broadcast_to(out, y[s:s + _CHUNK].shape)
        self.n_evals += y.size
        if not np.all(np.isfinite(vals)):
            bad = y[~np.isfinite(vals)][0]
            raise SingularityError(f"integrand not finite at y = {bad!r}; declare the singularity")
        return vals * jac

    def panel_rule(self, piece_idx, lo, hi, pieces_arr, with_abs=False):
        """Gauss-Legendre values on panels [lo, hi] (vectorized)."""
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        w = mid[:, None] + half[:, None] * _GL_X[None, :]
        vals = self.eval_nodes(np.broadcast_to(piece_idx[:, None], w.shape), w, pieces_arr)
        if with_abs:
            return half * (vals @ _GL_W), half * (np.abs(vals) @ _GL_W)
        return half * (vals @ _GL_W)

    def split_rule(self, piece_idx, lo, hi, pieces_arr):
        """Two-half values, their sum and a roundoff floor per panel."""
        mids = 0.5 * (lo + hi)
        left, al = self.panel_rule(piece_idx, lo, mids, pieces_arr, with_abs=True)
        right, ar = self.panel_rule(piece_idx, mids, hi, pieces_arr, with_abs=True)
        return left, right, _ROUNDOFF * (al + ar)


def integrate_line(
    f: Callable,
    interval: Sequence[float],
    sing: SingularitySpec | None = None,
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    freq: float = 0.0,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadResult:
    """Integrate a vectorized ``f`` over a finite interval.

    Parameters
    ----------
    f : callable
        Vectorized integrand, real or complex valued.
    interval : (a, b)
        Finite interval with ``a < b``.
    sing : SingularitySpec, optional
        Declared singular points inside or at the ends of the interval.
    tol, rtol : float
        Absolute and relative targets; the run stops once the estimated
        error is below ``max(tol, rtol * |value|)``.
    freq : float
        Maximum local angular frequency of the integrand (radians per unit
        length); caps the panel width.
    max_evals : int
        Evaluation budget; on exhaustion the best estimate is returned
        with ``converged=False``.

    Returns
    -------
    QuadResult
    """
    a, b = (float(v) for v in interval)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainError("interval must be finite with a < b")
    if tol <= 0 and rtol <= 0:
        raise DomainError("a positive tolerance is required")
    sing = sing or SingularitySpec()
    pts = list(zip(sing.locations, sing.exponents, sing.log_freqs))
    return _integrate(f, a, b, pts, tol, rtol, freq, max_evals)


def integrate_circle(
    f: Callable,
    sing: SingularitySpec | None = None,
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    period: float = 2.0 * math.pi,
    freq: float = 0.0,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> QuadResult:
    """Integrate a ``period``-periodic ``f`` over one period ``[0, period)``.

    Singular locations are reduced modulo the period; a singularity at 0
    is treated as singular at both ends of ``[0, period]``.
    """
    sing = sing or SingularitySpec()
    pts = []
    for x, s, lf in zip(sing.locations, sing.exponents, sing.log_freqs):
        r = math.fmod(x, period)
        if r < 0:
            r += period
        if r < 1e-13 * period or period - r < 1e-13 * period:
            pts.append((0.0, s, lf))
            pts.append((period, s, lf))
        else:
            pts.append((r, s, lf))
    return _integrate(f, 0.0, period, pts, tol, rtol, freq, max_evals)


def _graded_panels(piece: _Piece, log_freq: float, freq: float, w_min: float):
    """Panel edges in w for a singular piece, from w_min to 1."""
    rate = piece.q * log_freq
    h = min(0.7, 2.5 / rate) if rate > 0 else 0.7
    n_geo = max(1, math.ceil(-math.log(w_min) / h))
    edges = np.exp(np.linspace(math.log(w_min), 0.0, n_geo + 1))
    edges[-1] = 1.0
    if freq > 0:
        wave = 2.0 * math.pi / freq
        ywidth = piece.length * (edges[1:] ** piece.q - edges[:-1] ** piece.q)
        counts = np.maximum(1, np.ceil(ywidth / wave)).astype(int)
        if np.any(counts > 1):
            parts = [np.linspace(lo, hi, c + 1)[:-1] for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
            edges = np.concatenate(parts + [np.array([1.0])])
    return edges


def _tail_fit(it: _Integrator, i: int, pc: _Piece, arr, w_min: float, log_freq: float):
    """Integral of the power-law fit over [0, w_min] and its relative misfit.

    ``g(w) ~ sum_k C_k w^{e_k}`` is fitted at points of the panel
    ``[w_min, w1]`` and compared with quadrature over that panel.
    """
    e = np.array([pc.q * (sg + 1.0) - 1.0 for sg in pc.sigmas])
    rate = pc.q * log_freq
    w1 = w_min * math.exp(min(0.7, 2.5 / rate) if rate > 0 else 0.7)
    ws = w_min * (w1 / w_min) ** (np.arange(len(e)) / max(len(e), 2))
    g = it.eval_nodes(np.full(len(ws), i), ws, arr)
    coef = np.linalg.solve(np.power.outer(ws, e), g)
    corr = np.sum(coef * w_min ** (e + 1.0) / (e + 1.0))
    q_last = it.panel_rule(np.array([i]), np.array([w_min]), np.array([w1]), arr)[0]
    model = np.sum(coef * (w1 ** (e + 1.0) - w_min ** (e + 1.0)) / (e + 1.0))
    return complex(corr), abs(q_last - model) / max(abs(q_last), 1e-300)


def _integrate(f, a, b, pts, tol, rtol, freq, max_evals) -> QuadResult:
    it = _Integrator(f, freq, max_evals)
    target_abs = tol if tol > 0 else 0.0
    pieces: list[_Piece] = []
    edges_all: list[np.ndarray] = []
    log_freqs: list[float] = []
    for (x0, x1), s, side in _pieces(a, b, pts, 1e-14):
        length = x1 - x0
        if s is None:
            pieces.append(_Piece(x0, 1.0, length, 1.0, None))
            n0 = max(2, math.ceil(length * freq / (2.0 * math.pi)) if freq > 0 else 2)
            edges_all.append(np.linspace(0.0, 1.0, n0 + 1))
            log_freqs.append(0.0)
            continue
        sigmas, lf = s
        q = _exp_for_q(sigmas)
        anchor, sgn = (x0, 1.0) if side == "left" else (x1, -1.0)
        piece = _Piece(anchor, sgn, length, q, sigmas)
        pieces.append(piece)
        log_freqs.append(lf)
        edges_all.append(None)

    arr = (
        np.array([pc.p for pc in pieces]),
        np.array([pc.sign for pc in pieces]),
        np.array([pc.length for pc in pieces]),
        np.array([pc.q for pc in pieces]),
    )

    # choose w_min on singular pieces and replace [0, w_min] by a power-law fit
    tol_scale = max(target_abs, 1e-300) if target_abs > 0 else 1e-14
    tail_val = 0.0 + 0.0j
    tail_err = 0.0
    for i, pc in enumerate(pieces):
        if pc.sigmas is None:
            continue
        probe = np.abs(it.eval_nodes(np.array([i]), np.array([1e-3]), arr))[0]
        scale = max(probe, 1e-300)
        wm = (1e-2 * tol_scale / ((1.0 + pc.length * (freq + 1.0)) * scale)) ** (1.0 / (1.0 + pc.q))
        # keep the sliver wide enough that y - p is resolved in floating point
        floor = max((1e-8 * abs(pc.p) / pc.length) ** (1.0 / pc.q), 1e-14)
        wm = float(min(1e-3, max(wm, floor)))
        # shrink the sliver until the local power law is confirmed, which
        # matters when another singular point lies just outside the piece
        while True:
            corr, mismatch = _tail_fit(it, i, pc, arr, wm, log_freqs[i])
            if mismatch <= 1e-6 or wm <= floor:
                break
            wm = max(wm * 1e-2, floor)
        pc.w_min = wm
        edges_all[i] = _graded_panels(pc, log_freqs[i], freq, pc.w_min)
        tail_val += corr
        tail_err += abs(corr) * min(1.0, max(mismatch, 1e-12))

    pid = np.concatenate([np.full(len(e) - 1, i) for i, e in enumerate(edges_all)])
    lo = np.concatenate([e[:-1] for e in edges_all])
    hi = np.concatenate([e[1:] for e in edges_all])

    coarse = it.panel_rule(pid, lo, hi, arr)
    left, right, floor = it.split_rule(pid, lo, hi, arr)
    fine = left + right
    err = np.abs(coarse - fine)

    done_val = 0.0 + 0.0j
    done_err = 0.0
    converged = False
    best_err, stall = math.inf, 0
    while True:
        total = done_val + fine.sum() + tail_val
        total_err = done_err + err.sum() + tail_err
        goal = max(target_abs, rtol * abs(total))
        if total_err <= goal:
            converged = True
            break
        # give up once refinement stops paying off (rounding noise in f)
        if total_err < 0.5 * best_err:
            best_err, stall = total_err, 0
        else:
            stall += 1
            if stall >= _MAX_STALL:
                break
        # refine panels whose error exceeds their share of the goal and is
        # not already at the rounding floor
        share = max(goal - done_err - tail_err, 0.5 * goal) / max(lo.size, 1)
        refine = err > np.maximum(0.5 * share, floor)
        if not np.any(refine) or it.n_evals + 4 * GL_ORDER * int(refine.sum()) > it.max_evals:
            break
        keep = ~refine
        done_val += fine[keep].sum()
        done_err += err[keep].sum()
        r_pid, r_lo, r_hi = pid[refine], lo[refine], hi[refine]
        r_mid = 0.5 * (r_lo + r_hi)
        coarse = np.concatenate([left[refine], right[refine]])
        pid = np.concatenate([r_pid, r_pid])
        lo = np.concatenate([r_lo, r_mid])
        hi = np.concatenate([r_mid, r_hi])
        left, right, floor = it.split_rule(pid, lo, hi, arr)
        fine = left + right
        err = np.abs(coarse - fine)

    return QuadResult(complex(total), float(total_err), it.n_evals, converged)
