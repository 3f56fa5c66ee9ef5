"""Synthetic spectra and the dyadic summation argument.

There is no lattice here: the full form ``H_Delta(w)`` is *defined* as the
Parseval sum ``sum_i d_i H_{t_i}(w)`` over a synthetic spectrum, which is the
equality case for diagonally K-invariant vectors. Only scaling shapes are
meaningful; ``A`` and ``kappa`` are free knobs.

Dyadic blocks: with ``2^{k0} <= S < 2^{k0+1}``, the low block is
``{t < 2^{k0+1}}`` and ``I_k = [2^k, 2^{k+1})`` for ``k > k0``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from triperiod import asympt, calibration, kseries
from triperiod.errors import ContractError, DomainError
from triperiod.pool import ordered_map
from triperiod.repn import RepParams, make_test_vector
from triperiod.trilinear import h_form

SCHEMA_VERSION = 1
D_MODELS = ("uniform", "heavy-tail")
PARETO_ALPHA = 1.5
PARETO_TRUNC = 100.0
SPOT_CHECKS = 10


@dataclass(frozen=True)
class SyntheticSpectrum:
    """Sorted points ``t_i > 0`` with weights ``d_i >= 0``."""

    t: np.ndarray
    d: np.ndarray
    weyl_const: float
    mv_const: float
    seed: int
    T_max: float
    d_model: str = "uniform"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        d = np.asarray(self.d, dtype=float)
        if t.shape != d.shape or t.ndim != 1:
            raise DomainError("t and d must be 1-d arrays of equal length")
        if np.any(t <= 0) or np.any(d < 0) or np.any(np.diff(t) < 0):
            raise DomainError("need sorted t > 0 and d >= 0")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "d", d)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.d.tolist()))

    def __len__(self) -> int:
        return len(self.t)

    def count(self, T: float) -> int:
        return int(np.searchsorted(self.t, T, side="right"))

    def mass(self, T: float) -> float:
        return float(self.d[: self.count(T)].sum())

    def without(self, mask) -> "SyntheticSpectrum":
        """Copy with the points where ``mask`` is true removed."""
        keep = ~np.asarray(mask, dtype=bool)
        return SyntheticSpectrum(self.t[keep], self.d[keep], self.weyl_const, self.mv_const, self.seed, self.T_max, self.d_model)

    def with_weights(self, d) -> "SyntheticSpectrum":
        return SyntheticSpectrum(self.t, np.asarray(d, dtype=float), self.weyl_const, self.mv_const, self.seed, self.T_max, self.d_model)

    def audit(self, S: float = 1.0) -> dict:
        """Worst-case slack of the counting and mean-value invariants.

        ``weyl_excess`` is ``max (|N(T) - kappa T^2| - 3 kappa T)`` over
        ``T in [S, T_max]`` and ``mv_excess`` is ``max (M(T) - A T^2)``;
        both are ``<= 0`` when the invariants hold.
        """
        kappa, A = self.weyl_const, self.mv_const
        # both counting error and mass jump only at the points, so checking
        # just before and at each point (and at the ends) is exhaustive
        ts = self.t[(self.t >= S) & (self.t <= self.T_max)]
        T = np.concatenate([[S, self.T_max], ts, np.nextafter(ts, 0.0)])
        T = T[(T >= S) & (T <= self.T_max)]
        N = np.searchsorted(self.t, T, side="right")
        weyl = np.max(np.abs(N - kappa * T * T) - 3.0 * kappa * T)
        cum = np.concatenate([[0.0], np.cumsum(self.d)])
        Tm = np.concatenate([self.t[self.t <= self.T_max], [self.T_max]])
        M = cum[np.searchsorted(self.t, Tm, side="right")]
        mv = np.max(M - A * Tm * Tm)
        return {"weyl_excess": float(weyl), "mv_excess": float(mv)}


def dyadic_k0(S: float) -> int:
    """``k0`` with ``2^{k0} <= S < 2^{k0+1}`` (``S >= 1``)."""
    if S < 1.0:
        raise DomainError("the spectral cutoff must be >= 1")
    return int(math.floor(math.log2(S)))


def block_index(t, k0: int) -> np.ndarray:
    """Dyadic block of each point; the low block is ``k0``."""
    t = np.asarray(t, dtype=float)
    k = np.floor(np.log2(np.maximum(t, 1e-300))).astype(int)
    return np.maximum(k, k0)


def _cap_cumulative(t: np.ndarray, d: np.ndarray, A: float) -> np.ndarray:
    out = d.copy()
    acc = 0.0
    for i in range(len(out)):
        room = A * t[i] * t[i] * (1.0 - 1e-12) - acc
        if out[i] > room:
            out[i] = max(room, 0.0)
        acc += out[i]
    return out


def gen_spectrum(T_max: float, kappa: float, A: float, seed: int, d_model: str = "uniform", S: float = 1.0) -> SyntheticSpectrum:
    """Weyl-law spectrum ``t_i = sqrt((i + U_i) / kappa)`` with capped weights.

    Weights are i.i.d. (exponential with mean ``A/2``, or Pareto(1.5)
    truncated at 100 and scaled to mean about ``A/2``), then rescaled so that
    every dyadic block carries mass at most ``A 4^k`` and finally clipped so
    that ``sum_{t_i <= T} d_i <= A T^2`` for all ``T``.

    The count satisfies ``|N(T) - kappa T^2| <= 1``, hence the Weyl
    invariant whenever ``3 kappa T >= 1``.
    """
    if d_model not in D_MODELS:
        raise DomainError(f"d_model must be one of {D_MODELS}")
    if kappa <= 0 or A < 0:
        raise DomainError("need kappa > 0 and A >= 0")
    if T_max < 4.0 * S:
        raise DomainError(f"T_max must be at least 4 S = {4.0 * S}")
    rng = np.random.default_rng(seed)
    N = int(math.floor(kappa * T_max * T_max))
    i = np.arange(N)
    t = np.sqrt((i + rng.random(N)) / kappa)
    t = t[t > 0]
    if d_model == "uniform":
        d = rng.exponential(1.0, len(t)) * (0.5 * A)
    else:
        raw = np.minimum(rng.pareto(PARETO_ALPHA, len(t)) + 1.0, PARETO_TRUNC)
        # untruncated mean is alpha / (alpha - 1) = 3
        d = raw * (0.5 * A / 3.0)
    k0 = dyadic_k0(S)
    blocks = block_index(t, k0)
    for k in np.unique(blocks):
        sel = blocks == k
        cap = A * 4.0**k
        total = d[sel].sum()
        if total > cap:
            d[sel] *= cap / total
    d = _cap_cumulative(t, d, A)
    return SyntheticSpectrum(t, d, float(kappa), float(A), int(seed), float(T_max), d_model)


# --- Parseval sum over dyadic blocks --------------------------------------


def block_M(k: int, n: int, C: float) -> float:
    """``M_k = C(n^{-1} 2^{-k} + 2^{-3k})`` if ``2^k < 4n``, else ``C 2^{-3k}``."""
    if 2.0**k < 4 * n:
        return C * (2.0**-k / n + 2.0 ** (-3 * k))
    return C * 2.0 ** (-3 * k)


def budget_values(p: RepParams, t, n: int, C: float) -> np.ndarray:
    """``remainder_budget_II`` at each point, with ``t`` clamped up to ``S``."""
    t = np.maximum(np.asarray(t, dtype=float), p.S_cutoff)
    main = np.where(t <= 4 * n, 1.0 / ((1.0 + n) * t), 0.0)
    return C * (main + t**-3.0)


@dataclass
class BlockReport:
    k: int
    lo: float
    hi: float
    count: int
    mass: float
    H: float
    M: float
    bound: float  # A 4^k M_k, from the block mass cap A 2^{2k}
    bound_literal: float  # A 2^k M_k, tighter than the mass cap supports
    spot_max_ratio: float | None = None
    spot_points: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.H <= self.bound * (1.0 + 1e-12)

    @property
    def ok_literal(self) -> bool:
        return self.H <= self.bound_literal * (1.0 + 1e-12)


@dataclass
class DyadicReport:
    n: int
    mode: str
    C: float
    A: float
    k0: int
    low: BlockReport
    blocks: list
    tail_sum: float
    tail_bound: float  # A C (1 + 8)
    total: float

    @property
    def blocks_ok(self) -> bool:
        return all(b.ok for b in self.blocks)

    @property
    def blocks_ok_literal(self) -> bool:
        return all(b.ok_literal for b in self.blocks)

    @property
    def tail_ok(self) -> bool:
        return self.tail_sum <= self.tail_bound

    @property
    def spot_ok(self) -> bool:
        ratios = [b.spot_max_ratio for b in [self.low, *self.blocks] if b.spot_max_ratio is not None]
        return all(r <= 1.0 for r in ratios)

    def rows(self) -> list[dict]:
        out = []
        for b in [self.low, *self.blocks]:
            out.append(
                {
                    "k": b.k,
                    "lo": b.lo,
                    "hi": b.hi,
                    "count": b.count,
                    "mass": b.mass,
                    "H_k": b.H,
                    "M_k": b.M,
                    "bound": b.bound,
                    "bound_literal": b.bound_literal,
                    "spot_max_ratio": b.spot_max_ratio,
                }
            )
        return out


def _spot_indices(idx: np.ndarray, seed: int, k: int) -> np.ndarray:
    if len(idx) <= SPOT_CHECKS:
        return idx
    rng = np.random.default_rng([seed, k])
    return np.sort(rng.choice(idx, SPOT_CHECKS, replace=False))


def parseval_sum(spec: SyntheticSpectrum, p: RepParams, n: int, mode: str = "asymptotic", C: float | None = None) -> DyadicReport:
    """Block sums ``H_k = sum_{t_i in I_k} d_i H_{t_i}(w~_n)``.

    ``H_t(w~_n)`` is evaluated by its budget shape ``C((1+n)^{-1} t^{-1} +
    t^{-3})`` (``C t^{-3}`` past ``t = 4n``), i.e. the upper envelope the
    dyadic argument uses. In ``"oracle-spot-check"`` mode up to ten points per
    block are also evaluated exactly and the worst ratio exact/envelope is
    reported per block.
    """
    if mode not in ("asymptotic", "oracle-spot-check"):
        raise DomainError("mode must be 'asymptotic' or 'oracle-spot-check'")
    if n % 2 or n < 8:
        raise DomainError("n must be even and >= 8")
    C = calibration.TILDE_C if C is None else C
    S = p.S_cutoff
    k0 = dyadic_k0(S)
    A = spec.mv_const
    blocks_of = block_index(spec.t, k0)
    hvals = budget_values(p, spec.t, n, C)
    contrib = spec.d * hvals
    k_max = int(blocks_of.max()) if len(spec.t) else k0
    w = make_test_vector(n, "tilde")
    reports = []
    for k in range(k0, k_max + 1):
        sel = np.nonzero(blocks_of == k)[0]
        # fixed-order reduction keeps reports bit-stable
        H = float(math.fsum(contrib[sel]))
        M = block_M(k, n, C)
        rep = BlockReport(
            k=k,
            lo=0.0 if k == k0 else 2.0**k,
            hi=2.0 ** (k + 1),
            count=len(sel),
            mass=float(math.fsum(spec.d[sel])),
            H=H,
            M=M,
            bound=A * 4.0**k * M,
            bound_literal=A * 2.0**k * M,
        )
        if mode == "oracle-spot-check":
            cand = sel[spec.t[sel] >= S]
            pick = _spot_indices(cand, spec.seed, k)
            exact = ordered_map(lambda i: h_form(p, float(spec.t[i]), w), pick)
            ratios = [e / hvals[i] for e, i in zip(exact, pick)]
            rep.spot_points = [(float(spec.t[i]), e, float(hvals[i])) for e, i in zip(exact, pick)]
            rep.spot_max_ratio = max(ratios) if ratios else None
        reports.append(rep)
    low, rest = reports[0], reports[1:]
    tail = float(math.fsum(b.H for b in rest))
    return DyadicReport(n, mode, C, A, k0, low, rest, tail, A * C * 9.0, low.H + tail)


# --- low spectrum --------------------------------------------------------


@dataclass(frozen=True)
class LowSpectrumReport:
    proj_norm2: float
    bound: float
    C_R: float
    b_l1: float


def low_spectrum_bound(R_basis, b, weights=None, atol: float = 1e-8) -> LowSpectrumReport:
    """``||proj_R b||^2`` against the certificate ``||b||_{L^1}^2 C_R^2``.

    Parameters
    ----------
    R_basis : array_like, shape (m, N)
        Basis sampled at ``N`` points; must be orthonormal for the sample
        measure.
    b : array_like, shape (N,)
        Nonnegative samples.
    weights : array_like, optional
        Sample measure; uniform ``1/N`` by default.

    Notes
    -----
    On the sample set ``max_{||c||=1} |sum_j c_j r_j(x)| = ||(r_j(x))_j||``,
    so ``C_R`` is the largest column norm of the basis.
    """
    R = np.atleast_2d(np.asarray(R_basis, dtype=complex))
    b = np.asarray(b, dtype=float)
    N = R.shape[1]
    if b.shape != (N,):
        raise DomainError("b must be sampled on the same points as the basis")
    if np.any(b < 0):
        raise DomainError("b must be nonnegative")
    w = np.full(N, 1.0 / N) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (N,) or np.any(w < 0):
        raise DomainError("weights must be nonnegative, one per sample")
    gram = (R * w) @ R.conj().T
    if not np.allclose(gram, np.eye(R.shape[0]), atol=atol):
        raise ContractError("basis is not orthonormal for the sample measure")
    coef = (R.conj() * w) @ b
    proj = float(np.sum(np.abs(coef) ** 2))
    C_R = float(np.max(np.linalg.norm(R, axis=0))) if R.shape[0] else 0.0
    l1 = float(np.sum(w * b))
    bound = l1 * l1 * C_R * C_R
    if proj > bound * (1.0 + 1e-9) + 1e-15:
        raise ContractError(f"projection {proj} exceeds certificate {bound}")
    return LowSpectrumReport(proj, bound, C_R, l1)


# --- H profile and subconvexity extraction ---------------------------------


class HProfile:
    """``t -> H_t(w_n)`` for the plain vector, by series on a grid plus a spline.

    The complex value ``F_n(1)`` is splined (real and imaginary parts), then
    squared, which follows the oscillation of ``H`` far better than splining
    ``H`` itself.
    """

    def __init__(self, p: RepParams, n: int, t_lo: float, t_hi: float, dt: float = 0.25):
        if n % 2:
            raise DomainError("n must be even")
        if not 0 < t_lo < t_hi:
            raise DomainError("need 0 < t_lo < t_hi")
        self.p, self.n = p, n
        m = max(4, int(math.ceil((t_hi - t_lo) / dt)) + 1)
        self.grid = np.linspace(t_lo, t_hi, m)
        vals = np.array(ordered_map(lambda t: kseries.f_plain(p, float(t), n), self.grid))
        self.values = vals
        self._re = CubicSpline(self.grid, vals.real)
        self._im = CubicSpline(self.grid, vals.imag)

    def F(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.grid[0] - 1e-12) or np.any(t > self.grid[-1] + 1e-12):
            raise DomainError("t outside the profile range")
        return self._re(t) + 1j * self._im(t)

    def __call__(self, t):
        return np.abs(self.F(t)) ** 2


AIRY_CUT = 12.0  # Ai(12) ~ 1e-11 Ai(0): contributions beyond are dropped


@dataclass
class ExtractReport:
    T: float
    n: int
    window: tuple
    window_sum: float
    min_H: float
    h_delta: float
    certified_bound: float
    empty: bool

    @property
    def ok(self) -> bool:
        return self.empty or self.window_sum <= self.certified_bound * (1.0 + 1e-12)

    @property
    def normalized(self) -> float:
        return self.certified_bound / self.T ** (5.0 / 3.0)


def extract_n(T: float) -> int:
    """Weight of the peak vector for the window at ``T``: even ``n`` nearest ``T/2``."""
    return max(2, int(round(T / 4.0)) * 2)


PROFILE_T_LO = 0.05


def profile_range(T: float) -> tuple[float, float]:
    """``[0.05, t_hi]`` where ``t_hi`` is where the Airy argument passes ``AIRY_CUT``."""
    n = extract_n(T)
    hi = T
    while asympt.airy_argument(hi, n) < AIRY_CUT:
        hi += 1.0
    return PROFILE_T_LO, float(hi)


def extract_profile(p: RepParams, T: float, dt: float = 0.25) -> HProfile:
    """Profile for :func:`subconvexity_extract` at ``T``; reusable across spectra."""
    return HProfile(p, extract_n(T), *profile_range(T), dt=dt)


def subconvexity_extract(
    spec: SyntheticSpectrum, p: RepParams, T: float, b_window: float | None = None, profile: HProfile | None = None
) -> ExtractReport:
    """Window mass near ``T`` against ``H_Delta(w_T) / min_window H_t(w_T)``.

    ``w_T`` is the plain vector of weight ``n = extract_n(T)``. The window is
    ``|t - T| <= b_window T^{1/3} / 2``; ``H_Delta`` is the Parseval sum over
    the whole spectrum, ignoring points whose Airy argument exceeds
    ``AIRY_CUT`` (dropping nonnegative terms only lowers the certificate).
    """
    if T < 4.0 * p.S_cutoff:
        raise DomainError(f"T must be at least 4 S = {4.0 * p.S_cutoff}")
    b_window = asympt.window_half_width() if b_window is None else b_window
    n = extract_n(T)
    half = 0.5 * b_window * T ** (1.0 / 3.0)
    lo, hi = T - half, T + half
    if profile is None:
        profile = extract_profile(p, T)
    if profile.n != n or profile.p != p:
        raise DomainError("profile does not match the window weight or parameters")
    in_win = (spec.t >= lo) & (spec.t <= hi)
    window_sum = float(math.fsum(spec.d[in_win]))
    tw = np.linspace(max(lo, profile.grid[0]), min(hi, profile.grid[-1]), 65)
    min_H = float(np.min(profile(tw)))
    keep = spec.t <= profile.grid[-1]
    h_delta = float(math.fsum(spec.d[keep] * profile(np.maximum(spec.t[keep], profile.grid[0]))))
    empty = not in_win.any()
    cert = h_delta / min_H if min_H > 0 else math.inf
    rep = ExtractReport(float(T), n, (lo, hi), window_sum, min_H, h_delta, cert, empty)
    if not rep.ok:
        raise ContractError(f"window mass {window_sum} exceeds certificate {cert}")
    return rep


# --- files ---------------------------------------------------------------


def write_spectrum(spec: SyntheticSpectrum, path) -> tuple[Path, Path]:
    """CSV ``t,d`` plus a JSON sidecar ``<path>.json`` with the generator knobs."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "d"])
        for t, d in zip(spec.t, spec.d):
            wr.writerow([repr(float(t)), repr(float(d))])
    side = path.with_name(path.name + ".json")
    meta = {
        "schema_version": SCHEMA_VERSION,
        "kappa": spec.weyl_const,
        "A": spec.mv_const,
        "seed": spec.seed,
        "T_max": spec.T_max,
        "d_model": spec.d_model,
    }
    side.write_text(json.dumps(meta, indent=2) + "\n")
    return path, side


def read_spectrum(path) -> SyntheticSpectrum:
    path = Path(path)
    side = path.with_name(path.name + ".json")
    try:
        meta = json.loads(side.read_text())
        with path.open(newline="") as fh:
            rd = csv.reader(fh)
            header = next(rd)
            if [h.strip() for h in header] != ["t", "d"]:
                raise DomainError(f"{path}: expected header 't,d'")
            rows = [(float(a), float(b)) for a, b in rd]
        knobs = (float(meta["kappa"]), float(meta["A"]), int(meta["seed"]), float(meta["T_max"]), str(meta.get("d_model", "uniform")))
    except (OSError, ValueError, TypeError, KeyError, StopIteration, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read spectrum {path}: {exc!r}") from exc
    t = np.array([r[0] for r in rows], dtype=float)
    d = np.array([r[1] for r in rows], dtype=float)
    return SyntheticSpectrum(t, d, *knobs)
