from dataclasses import replace

import numpy as np
import pytest

from twinbeam.errors import ConfigError
from twinbeam.sim import (
    SimConfig,
    generate_background,
    generate_coherent_pair,
    generate_pulse_pair,
    generate_pulse_pair_detailed,
    generate_sequence,
    ideal_noise_ratio,
    ou_series,
    transient_gain,
)
from twinbeam._rng import substream


def one_d_counting_oracle(gain, eta, n_seed, trials, rng):
    """Pure counting-statistics twin-beam model: no imaging, no geometry.

    Seed photons are Poisson; each seed photon spawns ``gain - 1`` pair
    photons (Poisson in total); detection is independent binomial thinning
    per beam.  Returns Var(probe - conj) / mean(probe + conj).
    """
    seed = rng.poisson(n_seed, size=trials)
    pairs = rng.poisson((gain - 1.0) * n_seed, size=trials)
    probe = rng.binomial(seed, eta) + rng.binomial(pairs, eta)
    conj = rng.binomial(pairs, eta)
    return np.var(probe - conj, ddof=1) / np.mean(probe + conj)


@pytest.mark.parametrize("gain", [2.0, 4.0, 8.0])
@pytest.mark.parametrize("eta", [1.0, 0.7, 0.5])
def test_loss_formula_against_1d_oracle(gain, eta):
    rng = np.random.default_rng(int(gain * 10 + eta * 100))
    trials = 6000
    measured = one_d_counting_oracle(gain, eta, 500.0, trials, rng)
    expected = ideal_noise_ratio(gain, eta)
    se = expected * np.sqrt(2.0 / (trials - 1))
    assert abs(measured - expected) <= 3.0 * se


def region_totals(cfg, shots, mode=None, frame_fn=None):
    cfg = replace(cfg, sampling=mode) if mode else cfg
    frame_fn = frame_fn or (lambda shot: generate_pulse_pair(cfg, shot=shot))
    reg_p = cfg.analysis_region("probe").slices()
    reg_c = cfg.analysis_region("conjugate").slices()
    tp, tc = [], []
    for shot in range(shots):
        p, c = frame_fn(shot)
        tp.append(p.counts[reg_p].sum())
        tc.append(c.counts[reg_c].sum())
    return np.array(tp), np.array(tc)


@pytest.mark.parametrize("mode", ["photon", "field"])
def test_photon_bookkeeping(mode):
    # eta = 1, no clipping: region means are gain*n_s (probe),
    # (gain-1)*n_s (conjugate), and the mean difference is n_s
    cfg = SimConfig(gain=4.0, qe=1.0, coherence_sigma=0.02, seed_photons=2.0e4,
                    sampling=mode, rng_seed=31)
    tp, tc = region_totals(cfg, 100)
    n_s = cfg.seed_photons
    for observed, expected, var_scale in (
        (tp, 4.0 * n_s, 7.0 * n_s),
        (tc, 3.0 * n_s, 7.0 * n_s),
        (tp - tc, n_s, n_s),
    ):
        se = np.sqrt(var_scale / len(tp))
        assert abs(observed.mean() - expected) <= 3.5 * se


def test_correlated_fraction_three_quarters():
    # at gain 4, pair photons are 3/4 of the probe photons in expectation
    cfg = SimConfig(gain=4.0, qe=1.0, coherence_sigma=0.02, seed_photons=5.0e4,
                    sampling="photon", rng_seed=32)
    tp, tc = region_totals(cfg, 60)
    assert np.mean(tc) / np.mean(tp) == pytest.approx(0.75, abs=0.01)


def test_gain_off_limit():
    cfg = SimConfig(gain=1.0, qe=1.0, seed_photons=3.0e4, sampling="photon", rng_seed=33)
    reg_c = cfg.analysis_region("conjugate").slices()
    sigmas = []
    for shot in range(80):
        p, c = generate_pulse_pair(cfg, shot=shot)
        assert c.counts[reg_c].sum() == 0.0
        sigmas.append(p.counts[cfg.analysis_region("probe").slices()].sum())
    # pure Poisson probe: variance equals mean
    ratio = np.var(sigmas, ddof=1) / np.mean(sigmas)
    assert abs(ratio - 1.0) <= 3.0 * np.sqrt(2.0 / (len(sigmas) - 1))


@pytest.mark.parametrize("mode", ["photon", "field"])
def test_difference_noise_matches_formula(mode):
    cfg = SimConfig(gain=4.0, qe=0.7, coherence_sigma=0.02, seed_photons=1.0e5,
                    sampling=mode, rng_seed=34)
    tp, tc = region_totals(cfg, 160)
    sigma = np.var(tp - tc, ddof=1) / np.mean(tp + tc)
    expected = ideal_noise_ratio(4.0, 0.7)
    assert abs(sigma - expected) <= 3.0 * expected * np.sqrt(2.0 / (len(tp) - 1))


def test_field_and_photon_modes_agree():
    base = SimConfig(gain=4.0, qe=0.7, coherence_sigma=3.0, seed_photons=2.0e5,
                     probe_fwhm=24.0, rng_seed=35)
    n = 100
    res = {}
    for mode in ("photon", "field"):
        tp, tc = region_totals(base, n, mode=mode)
        res[mode] = (np.mean(tp), np.mean(tc),
                     np.var(tp - tc, ddof=1) / np.mean(tp + tc))
    # marginals agree to a fraction of a percent (both are exact lattice
    # projections of the same continuous model)
    assert res["photon"][0] == pytest.approx(res["field"][0], rel=5e-3)
    assert res["photon"][1] == pytest.approx(res["field"][1], rel=5e-3)
    s1, s2 = res["photon"][2], res["field"][2]
    se = (s1 + s2) / 2 * np.sqrt(2.0 / (n - 1)) * np.sqrt(2.0)
    assert abs(s1 - s2) <= 3.5 * se


def test_em_excess_noise_doubles_coherent_ratio():
    shots = 200
    out = {}
    for em in (False, True):
        cfg = SimConfig(seed_photons=5.0e4, qe=1.0, em_excess_noise=em, rng_seed=36)
        tp, _ = region_totals(cfg, shots,
                              frame_fn=lambda shot: generate_coherent_pair(cfg, shot=shot))
        out[em] = np.var(tp, ddof=1) / np.mean(tp)
    se = out[True] * np.sqrt(2.0 / (shots - 1))
    assert abs(out[False] - 1.0) <= 3.0 * np.sqrt(2.0 / (shots - 1))
    assert abs(out[True] - 2.0) <= 3.5 * se


def test_sequence_determinism_bit_identical():
    cfg = SimConfig(seed_photons=1.0e5, tech_noise_amplitude=0.01, rng_seed=37)
    a = generate_sequence(cfg, 3, 63.0, shot=5)
    b = generate_sequence(cfg, 3, 63.0, shot=5)
    for s1, s2 in zip(a, b):
        for f1, f2 in zip(s1.frames, s2.frames):
            assert np.array_equal(f1.counts, f2.counts)
    c = generate_sequence(cfg, 3, 63.0, shot=6)
    assert not np.array_equal(a[0][0].counts, c[0][0].counts)


def test_sequence_seed_drift_cumulative():
    cfg = SimConfig(seed_photons=2.0e6, seed_drift=1.0 / 1.003, sampling="field",
                    rng_seed=38)
    pseq, _ = generate_sequence(cfg, 3, 63.0)
    reg = cfg.analysis_region("probe").slices()
    t0, t1, t2 = (f.counts[reg].sum() for f in pseq.frames)
    assert t0 / t1 == pytest.approx(1.003, abs=2e-3)
    assert t0 / t2 == pytest.approx(1.003 ** 2, abs=4e-3)


def test_ou_series_statistics():
    rng = substream(99, 0)
    n, dt, tau, amp = 20000, 63.0, 300.0, 0.01
    eps = ou_series(rng, n, dt, tau, amp)
    assert np.std(eps) == pytest.approx(amp, rel=0.05)
    lag1 = np.corrcoef(eps[:-1], eps[1:])[0, 1]
    assert lag1 == pytest.approx(np.exp(-dt / tau), abs=0.02)
    assert np.all(ou_series(rng, 10, 63.0, 300.0, 0.0) == 0.0)


def test_background_rate_and_poisson_stats():
    cfg = SimConfig(background_rate=4.0e5, background_excess=1.0, rng_seed=40)
    reg = cfg.analysis_region("probe").slices()
    totals = []
    for frame in range(40):
        pb, cb = generate_background(cfg, frame=frame)
        totals.append(pb.counts[reg].sum())
    mean = np.mean(totals)
    assert abs(mean - 4.0e5) <= 4.0 * np.sqrt(4.0e5 / 40)
    # background-only frames are shot-noise limited through the estimator
    var_ratio = np.var(totals, ddof=1) / mean
    assert abs(var_ratio - 1.0) <= 4.0 * np.sqrt(2.0 / 39)


def test_background_zero_rate():
    cfg = SimConfig(background_rate=0.0, rng_seed=41)
    pb, cb = generate_background(cfg)
    assert pb.counts.sum() == 0.0 and cb.counts.sum() == 0.0


def test_background_excess_variance():
    cfg = SimConfig(background_rate=2.0e5, background_excess=20.0, rng_seed=42)
    reg = cfg.analysis_region("probe").slices()
    totals = [generate_background(cfg, frame=k)[0].counts[reg].sum() for k in range(60)]
    var_ratio = np.var(totals, ddof=1) / np.mean(totals)
    assert 12.0 <= var_ratio <= 30.0


def test_transient_gain_shape():
    cfg = SimConfig(gain=4.0, transient_kappa=0.02)
    g0, ex0 = transient_gain(0.0, cfg)
    assert g0 == 1.0 and ex0 == pytest.approx(0.02)
    g1, _ = transient_gain(1.0, cfg)
    assert g1 == 1.0
    g6, ex6 = transient_gain(6.0, cfg)
    assert g6 == 4.0 and ex6 == 0.0
    g8, _ = transient_gain(8.0, cfg)
    assert g8 == 4.0
    gains = [transient_gain(a, cfg)[0] for a in np.linspace(0, 8, 33)]
    assert all(b >= a for a, b in zip(gains, gains[1:]))


def test_clip_warning_near_edge():
    cfg = SimConfig(probe_center=(3.0, 16.0), coherence_sigma=3.0, probe_fwhm=20.0,
                    seed_photons=2.0e4, sampling="photon", rng_seed=43)
    with pytest.warns(UserWarning, match="outside the frame"):
        p, c, info = generate_pulse_pair_detailed(cfg)
    assert info["clip_fraction"] > 0.01


def test_auto_sampling_switch():
    small = SimConfig(seed_photons=1.0e4, rng_seed=44)
    _, _, info = generate_pulse_pair_detailed(small)
    assert info["sampling"] == "photon"
    big = SimConfig(seed_photons=2.0e6, rng_seed=44)
    _, _, info = generate_pulse_pair_detailed(big)
    assert info["sampling"] == "field"


def test_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(gain=0.5)
    with pytest.raises(ConfigError):
        SimConfig(qe=1.5)
    with pytest.raises(ConfigError):
        SimConfig(coherence_sigma=0.0)
    with pytest.raises(ConfigError):
        SimConfig(sampling="magic")
    with pytest.raises(ConfigError):
        SimConfig(background_excess=0.5)
    with pytest.raises(ConfigError):
        generate_sequence(SimConfig(), 1, 63.0)


def test_exposure_from_pulse_timing():
    assert SimConfig(pulse_timing_us=(6.0, 1.0, 3.0)).exposure_us == 12.0
