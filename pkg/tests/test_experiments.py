"""Protocol layer: scans, windows, disorder ensembles, wavefronts."""

import os

import numpy as np
import pytest

from kitaevqfi import (
    ChainParams,
    Channel,
    DisorderSpec,
    TimeWindow,
    axis_asymmetry,
    build_bdg_spectrum,
    disorder_ensemble,
    encoding_site_scan,
    max_group_velocity,
    phase_diagram_scan,
    plateau_prediction,
    qfi_timeseries,
    spacetime_map,
    time_average_qfi,
    wavefront_velocity,
    window_average,
    zero_mode,
)
from kitaevqfi.experiments import WORKERS_ENV, FrontNotDetectedError

WINDOW = TimeWindow.with_spacing(150.0, 200.0)


def test_window_validation():
    with pytest.raises(ValueError):
        TimeWindow(5.0, 5.0, 10)
    with pytest.raises(ValueError):
        TimeWindow(0.0, 1.0, 1)


def test_window_halving():
    spec = build_bdg_spectrum(ChainParams(L=60, gamma=0.6, h=0.4))
    times = WINDOW.times()
    f = qfi_timeseries(spec, 1, 1, Channel.Y, 0.0, times)
    full, _ = window_average(f, times)
    mid = times.size // 2
    lo, _ = window_average(f[: mid + 1], times[: mid + 1])
    hi, _ = window_average(f[mid:], times[mid:])
    assert abs(0.5 * (lo + hi) - full) < 1e-12


def test_sweet_spot_mean():
    mean, std = time_average_qfi(
        ChainParams(L=50, gamma=1.0, h=0.0), 1, 1, Channel.Y, 0.0, WINDOW)
    assert abs(mean - 1.0) < 1e-10
    assert std < 1e-10


def test_topological_plateau_vs_prediction():
    p = ChainParams(L=100, gamma=0.3, h=0.5)
    mean, _ = time_average_qfi(p, 1, 1, Channel.Y, 0.0, WINDOW)
    pred = plateau_prediction(zero_mode(build_bdg_spectrum(p)), 1, 1)
    assert 0.8 * pred <= mean <= 1.3 * pred


def test_trivial_phase_mean_small():
    mean, _ = time_average_qfi(
        ChainParams(L=100, gamma=0.8, h=1.8), 1, 1, Channel.Y, 0.0, WINDOW)
    assert mean < 0.05


def test_early_window_warns():
    with pytest.warns(UserWarning):
        time_average_qfi(ChainParams(L=40, gamma=0.5, h=0.5), 1, 1,
                         Channel.Y, 0.0, TimeWindow(0.1, 1.0, 8))


def test_single_point_scan_matches_time_average():
    p = ChainParams(L=40, gamma=0.4, h=0.6)
    recs = phase_diagram_scan([0.6], [0.4], p, WINDOW)
    mean, std = time_average_qfi(p, 1, 1, Channel.Y, 0.0, WINDOW)
    assert recs[0]["mean_qfi"] == mean
    assert recs[0]["std_qfi"] == std
    assert recs[0]["error"] == ""


def test_scan_determinism_across_worker_counts():
    hs = [0.2, 0.8, 1.4]
    gs = [0.3, 0.9]
    p = ChainParams(L=30, gamma=1.0, h=0.5)
    w = TimeWindow.with_spacing(50.0, 60.0)
    old = os.environ.get(WORKERS_ENV)
    try:
        os.environ[WORKERS_ENV] = "1"
        serial = phase_diagram_scan(hs, gs, p, w)
        os.environ[WORKERS_ENV] = "4"
        threaded = phase_diagram_scan(hs, gs, p, w)
    finally:
        if old is None:
            os.environ.pop(WORKERS_ENV, None)
        else:
            os.environ[WORKERS_ENV] = old
    assert serial == threaded


def test_spacetime_t0_column():
    times = np.array([0.0, 1.0, 2.0])
    m = spacetime_map(ChainParams(L=20, gamma=0.7, h=0.4), 3, times)
    col0 = m.values[:, 0]
    assert abs(col0[2] - 1.0) < 1e-12
    assert np.max(np.abs(np.delete(col0, 2))) < 1e-12


def test_spacetime_matches_timeseries_row():
    p = ChainParams(L=24, gamma=0.6, h=0.8)
    times = np.linspace(0.0, 10.0, 11)
    m = spacetime_map(p, 1, times)
    spec = build_bdg_spectrum(p)
    for j in (1, 5, 24):
        row = qfi_timeseries(spec, j, 1, Channel.Y, 0.0, times)
        assert np.max(np.abs(m.values[j - 1] - row)) < 1e-12


def test_site_scan_k1_matches_time_average():
    p = ChainParams(L=60, gamma=1.0, h=0.3)
    recs, _ = encoding_site_scan(p, range(1, 4), WINDOW)
    mean, _ = time_average_qfi(p, 1, 1, Channel.Y, 0.0, WINDOW)
    assert recs[0]["mean_qfi"] == mean


def test_site_scan_slope_resolves_localization_length():
    p = ChainParams(L=100, gamma=1.0, h=0.1)
    _, slope = encoding_site_scan(p, range(1, 13), WINDOW)
    target = 2.0 * np.log(0.1)
    assert abs(slope - target) < 0.05 * abs(target)


def test_sweet_spot_k2_bond_oscillation():
    # At h=0, gamma=1 the k=2 encoding excites the dimerized bond fermion,
    # which oscillates at the single frequency 2J without dephasing, so the
    # window mean sits near 1/2 rather than decaying.
    p = ChainParams(L=40, gamma=1.0, h=0.0)
    recs, _ = encoding_site_scan(p, [1, 2], WINDOW)
    assert abs(recs[0]["mean_qfi"] - 1.0) < 1e-10
    assert 0.45 < recs[1]["mean_qfi"] < 0.55


def test_axis_asymmetry_topological_and_trivial():
    my, mx = axis_asymmetry(ChainParams(L=100, gamma=1.0, h=0.1), WINDOW)
    assert my > 0.9
    assert mx < 1e-3
    my_t, mx_t = axis_asymmetry(ChainParams(L=100, gamma=0.8, h=1.8), WINDOW)
    assert my_t < 0.05 and mx_t < 0.05
    assert abs(my_t - mx_t) < 0.02


def test_gamma_negation_swaps_asymmetry_outputs():
    w = TimeWindow.with_spacing(80.0, 100.0)
    my, mx = axis_asymmetry(ChainParams(L=60, gamma=0.6, h=0.4), w)
    my2, mx2 = axis_asymmetry(ChainParams(L=60, gamma=-0.6, h=0.4), w)
    assert abs(my - mx2) < 1e-10
    assert abs(mx - my2) < 1e-10


def test_disorder_w0_equals_clean():
    p = ChainParams(L=40, gamma=1.0, h=0.5)
    w = TimeWindow.with_spacing(80.0, 100.0)
    res = disorder_ensemble(p, DisorderSpec(W=0.0, n_realizations=4, seed=1),
                            w, Channel.Y)
    clean, _ = time_average_qfi(p, 1, 1, Channel.Y, 0.0, w)
    assert abs(res.mean - clean) < 1e-12
    assert res.std < 1e-12
    assert res.n_used == 4 and res.n_failed == 0


def test_disorder_determinism():
    p = ChainParams(L=30, gamma=1.0, h=0.5)
    w = TimeWindow.with_spacing(60.0, 80.0)
    spec = DisorderSpec(W=0.3, n_realizations=6, seed=42)
    a = disorder_ensemble(p, spec, w, Channel.Y)
    b = disorder_ensemble(p, spec, w, Channel.Y)
    assert np.array_equal(a.realization_means, b.realization_means)


def test_wavefront_velocity_matches_group_velocity():
    p = ChainParams(L=200, gamma=0.3, h=0.5)
    m = spacetime_map(p, 1, np.arange(0.5, 90.0, 0.5))
    v_ref = max_group_velocity(p)
    assert abs(wavefront_velocity(m) - v_ref) < 0.1 * v_ref


def test_wavefront_threshold_robustness():
    p = ChainParams(L=300, gamma=0.0, h=0.5)
    m = spacetime_map(p, 1, np.arange(0.5, 120.0, 0.25))
    slopes = [wavefront_velocity(m, threshold=th)
              for th in (0.01, 0.02, 0.05, 0.1)]
    assert max(slopes) - min(slopes) < 0.05 * 2.0
    for v in slopes:
        assert abs(v - 2.0) < 0.1 * 2.0


def test_wavefront_not_detected():
    # Flat-band sweet spot: nothing propagates, no front exists.
    p = ChainParams(L=60, gamma=1.0, h=0.0)
    m = spacetime_map(p, 1, np.arange(0.5, 30.0, 0.5))
    with pytest.raises(FrontNotDetectedError):
        wavefront_velocity(m)


def test_finite_size_revival_small_chain_only():
    small = ChainParams(L=20, gamma=1.0, h=0.6)
    spec = build_bdg_spectrum(small)
    mode = zero_mode(spec)
    plateau = plateau_prediction(mode, 1, 1)
    period = 2.0 * np.pi / mode.eps0
    times = np.arange(0.0, period, 0.25)
    f = qfi_timeseries(spec, 1, 1, Channel.Y, 0.0, times)
    assert f.min() < 0.1 * plateau

    big = ChainParams(L=100, gamma=1.0, h=0.6)
    spec_b = build_bdg_spectrum(big)
    plateau_b = plateau_prediction(zero_mode(spec_b), 1, 1)
    times_b = np.arange(0.0, 200.0 + 1e-9, 0.25)
    f_b = qfi_timeseries(spec_b, 1, 1, Channel.Y, 0.0, times_b)
    assert f_b.min() > 0.1 * plateau_b
