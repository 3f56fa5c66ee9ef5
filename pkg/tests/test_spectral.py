import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triperiod import spectral
from triperiod.errors import ContractError, DomainError
from triperiod.experiments import random_orthonormal_basis


@pytest.fixture(scope="module")
def spec(p):
    return spectral.gen_spectrum(200.0, 1.0, 1.0, 11, "uniform", p.S_cutoff)


def test_weyl_count_example():
    s = spectral.gen_spectrum(100.0, 1.0, 1.0, 0)
    assert abs(len(s) - 10_000) <= 1


def test_deterministic():
    a = spectral.gen_spectrum(120.0, 1.0, 2.0, 42, "heavy-tail")
    b = spectral.gen_spectrum(120.0, 1.0, 2.0, 42, "heavy-tail")
    assert np.array_equal(a.t, b.t) and np.array_equal(a.d, b.d)
    c = spectral.gen_spectrum(120.0, 1.0, 2.0, 43, "heavy-tail")
    assert not np.array_equal(a.d, c.d)


@settings(max_examples=15)
@given(
    seed=st.integers(0, 2**31),
    model=st.sampled_from(spectral.D_MODELS),
    kappa=st.floats(0.2, 3.0),
    A=st.floats(0.1, 10.0),
    T_max=st.floats(12.0, 150.0),
)
def test_invariants_hold_by_construction(seed, model, kappa, A, T_max):
    s = spectral.gen_spectrum(T_max, kappa, A, seed, model, 3.0)
    audit = s.audit(3.0)
    assert audit["weyl_excess"] <= 0
    assert audit["mv_excess"] <= 0
    assert np.all(s.d >= 0) and np.all(np.diff(s.t) >= 0)


def test_heavy_tail_rescaled():
    s = spectral.gen_spectrum(300.0, 1.0, 1.0, 5, "heavy-tail", 3.0)
    T = np.linspace(3.0, 300.0, 400)
    assert all(s.mass(x) <= x * x for x in T)


@pytest.mark.parametrize(
    "kw",
    [dict(T_max=10.0, S=3.0), dict(d_model="gaussian"), dict(kappa=0.0), dict(A=-1.0)],
)
def test_gen_errors(kw):
    args = dict(T_max=100.0, kappa=1.0, A=1.0, seed=0, d_model="uniform", S=1.0)
    args.update(kw)
    with pytest.raises(DomainError):
        spectral.gen_spectrum(**args)


def test_spectrum_validation():
    with pytest.raises(DomainError):
        spectral.SyntheticSpectrum(np.array([2.0, 1.0]), np.array([1.0, 1.0]), 1.0, 1.0, 0, 10.0)
    with pytest.raises(DomainError):
        spectral.SyntheticSpectrum(np.array([1.0]), np.array([-1.0]), 1.0, 1.0, 0, 10.0)


@pytest.mark.parametrize("S, k0", [(1.0, 0), (3.0, 1), (4.0, 2), (7.9, 2)])
def test_dyadic_k0(S, k0):
    assert spectral.dyadic_k0(S) == k0


def test_block_M_branches():
    assert spectral.block_M(3, 8, 2.0) == pytest.approx(2.0 * (1 / 64 + 1 / 512))
    assert spectral.block_M(5, 8, 2.0) == pytest.approx(2.0 / 2**15)


@pytest.mark.parametrize("n", [6, 9, 31])
def test_parseval_n_checked(spec, p, n):
    with pytest.raises(DomainError):
        spectral.parseval_sum(spec, p, n)


def test_parseval_mode_checked(spec, p):
    with pytest.raises(DomainError):
        spectral.parseval_sum(spec, p, 8, "exact")


@pytest.mark.parametrize("n", [8, 32, 128])
def test_parseval_report_consistent(spec, p, n):
    rep = spectral.parseval_sum(spec, p, n)
    assert rep.total == pytest.approx(rep.low.H + sum(b.H for b in rep.blocks))
    assert sum(b.count for b in [rep.low, *rep.blocks]) == len(spec)
    assert rep.blocks_ok and rep.tail_ok
    assert rep.tail_bound == pytest.approx(rep.A * rep.C * 9)


def test_parseval_bit_stable(spec, p):
    a = spectral.parseval_sum(spec, p, 32)
    b = spectral.parseval_sum(spec, p, 32)
    assert a.rows() == b.rows() and a.total == b.total


def test_spot_checks_below_envelope(p):
    s = spectral.gen_spectrum(40.0, 1.0, 1.0, 3, "uniform", p.S_cutoff)
    rep = spectral.parseval_sum(s, p, 16, "oracle-spot-check")
    assert rep.spot_ok
    for b in [rep.low, *rep.blocks]:
        assert len(b.spot_points) <= spectral.SPOT_CHECKS


@settings(max_examples=20)
@given(seed=st.integers(0, 10**6), frac=st.floats(0.0, 0.9))
def test_bessel_direction(spec, p, seed, frac):
    rng = np.random.default_rng(seed)
    mask = rng.random(len(spec)) < frac
    full = spectral.parseval_sum(spec, p, 16).total
    part = spectral.parseval_sum(spec.without(mask), p, 16).total
    assert part <= full * (1 + 1e-12)


def test_low_spectrum_equality_case():
    N = 50
    rep = spectral.low_spectrum_bound(np.ones((1, N)), np.full(N, 2.0))
    assert rep.proj_norm2 == pytest.approx(4.0)
    assert rep.bound == pytest.approx(4.0)


def test_low_spectrum_zero():
    R = random_orthonormal_basis(np.random.default_rng(0), 5, 100, np.full(100, 0.01))
    rep = spectral.low_spectrum_bound(R, np.zeros(100))
    assert rep.proj_norm2 == 0 and rep.bound == 0


@settings(max_examples=100)
@given(seed=st.integers(0, 2**31), dim=st.integers(1, 5), sparsity=st.floats(0.05, 1.0))
def test_low_spectrum_random(seed, dim, sparsity):
    rng = np.random.default_rng(seed)
    N = 120
    w = rng.uniform(0.5, 1.5, N)
    w /= w.sum()
    R = random_orthonormal_basis(rng, dim, N, w)
    b = rng.exponential(1.0, N) * (rng.random(N) < sparsity)
    rep = spectral.low_spectrum_bound(R, b, w)
    assert rep.proj_norm2 <= rep.bound * (1 + 1e-9)


def test_low_spectrum_contracts():
    with pytest.raises(ContractError):
        spectral.low_spectrum_bound(np.ones((2, 10)), np.ones(10))
    with pytest.raises(DomainError):
        spectral.low_spectrum_bound(np.ones((1, 10)), -np.ones(10))


@pytest.fixture(scope="module")
def profile100(p):
    return spectral.extract_profile(p, 100.0)


def test_extract_window_and_certificate(spec, p, profile100):
    e = spectral.subconvexity_extract(spec, p, 100.0, profile=profile100)
    half = 0.5 * 0.759464503584661 * 100 ** (1 / 3)
    assert e.window == pytest.approx((100 - half, 100 + half))
    assert e.n == 50 and not e.empty
    assert e.window_sum <= e.certified_bound


def test_extract_zero_weights(spec, p, profile100):
    e = spectral.subconvexity_extract(spec.with_weights(np.zeros(len(spec))), p, 100.0, profile=profile100)
    assert e.window_sum == 0


def test_extract_profile_must_match(spec, p, profile100):
    with pytest.raises(DomainError):
        spectral.subconvexity_extract(spec, p, 140.0, profile=profile100)
    with pytest.raises(DomainError):
        spectral.subconvexity_extract(spec, p, 10.0)


def test_profile_tracks_series(p, profile100):
    from triperiod.kseries import f_plain

    for t in (37.3, 99.1, 101.6):
        assert profile100(t) == pytest.approx(abs(f_plain(p, t, 50)) ** 2, rel=5e-3)
    with pytest.raises(DomainError):
        profile100(profile100.grid[-1] + 1)


def test_io_roundtrip(tmp_path):
    s = spectral.gen_spectrum(30.0, 1.0, 1.5, 9, "heavy-tail")
    path, side = spectral.write_spectrum(s, tmp_path / "spec.csv")
    meta = json.loads(side.read_text())
    assert meta == {"schema_version": 1, "kappa": 1.0, "A": 1.5, "seed": 9, "T_max": 30.0, "d_model": "heavy-tail"}
    r = spectral.read_spectrum(path)
    assert np.array_equal(r.t, s.t) and np.array_equal(r.d, s.d)
    assert (r.weyl_const, r.mv_const, r.seed, r.T_max, r.d_model) == (1.0, 1.5, 9, 30.0, "heavy-tail")


@pytest.mark.parametrize(
    "csv_text, meta",
    [
        ("x,y\n1,2\n", {"kappa": 1, "A": 1, "seed": 0, "T_max": 5}),
        ("t,d\n1,oops\n", {"kappa": 1, "A": 1, "seed": 0, "T_max": 5}),
        ("t,d\n1,2\n", {"kappa": 1}),
        ("t,d\n2,1\n1,1\n", {"kappa": 1, "A": 1, "seed": 0, "T_max": 5}),
    ],
)
def test_read_errors(tmp_path, csv_text, meta):
    path = tmp_path / "s.csv"
    path.write_text(csv_text)
    (tmp_path / "s.csv.json").write_text(json.dumps(meta))
    with pytest.raises(DomainError):
        spectral.read_spectrum(path)


def test_read_missing_sidecar(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("t,d\n1,1\n")
    with pytest.raises(DomainError):
        spectral.read_spectrum(path)


def test_budget_values_clamped(p):
    v = spectral.budget_values(p, [0.5, 3.0], 8, 1.0)
    assert v[0] == v[1] == pytest.approx(1 / (9 * 3.0) + 3.0**-3)
    assert math.isfinite(v.sum())
