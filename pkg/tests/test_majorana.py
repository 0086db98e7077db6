"""Majorana envelope layer: roots, localization length, plateau formula."""

import math

import numpy as np
import pytest

from kitaevqfi import (
    ChainParams,
    build_bdg_spectrum,
    critical_scaling_fit,
    localization_length,
    plateau_prediction,
    zero_mode,
)
from kitaevqfi.majorana import DegenerateRecurrenceError, FitError


def test_roots_gamma_one():
    xi, rp, rm = localization_length(ChainParams(L=10, gamma=1.0, h=0.5))
    assert abs(rp - 0.5) < 1e-14
    assert abs(rm) < 1e-14
    assert abs(xi - 1.0 / math.log(2.0)) < 1e-14


def test_trivial_phase_flag():
    xi, rp, _ = localization_length(ChainParams(L=10, gamma=1.0, h=1.5))
    assert abs(abs(rp) - 1.5) < 1e-12
    assert math.isinf(xi)


def test_degenerate_recurrence():
    with pytest.raises(DegenerateRecurrenceError):
        localization_length(ChainParams(L=10, gamma=-1.0, h=0.3))


def test_envelope_decay_matches_analytic_xi():
    # Numerical left envelope decays at rate 1/xi = -ln|r_>| within 2%.
    p = ChainParams(L=200, gamma=0.3, h=0.5)
    xi, rp, rm = localization_length(p)
    assert max(abs(rp), abs(rm)) < 1.0
    mode = zero_mode(build_bdg_spectrum(p))
    amp = np.abs(mode.phi_L[:60])
    mask = amp > 1e-12
    ks = np.arange(60)[mask]
    slope = np.polyfit(ks, np.log(amp[mask]), 1)[0]
    assert abs(-slope - 1.0 / xi) < 0.02 / xi


def test_envelope_orthogonality_and_reconstruction():
    # xi ~ 9.5 here keeps exp(-L/xi) well above the double-precision floor,
    # where the analytic overlap bound is actually checkable.
    p = ChainParams(L=80, gamma=1.0, h=0.9)
    spec = build_bdg_spectrum(p)
    mode = zero_mode(spec)
    overlap = abs(float(mode.phi_L @ mode.phi_R))
    assert overlap <= 10.0 * math.exp(-p.L / mode.xi)
    u0 = (mode.phi_L + mode.phi_R) / np.sqrt(2.0)
    v0 = (mode.phi_L - mode.phi_R) / np.sqrt(2.0)
    assert np.max(np.abs(u0 - spec.u_modes[:, 0])) < 1e-12
    assert np.max(np.abs(v0 - spec.v_modes[:, 0])) < 1e-12


def test_envelope_gauge_and_normalization():
    for h in (0.0, 0.3, 0.6, 0.9):
        mode = zero_mode(build_bdg_spectrum(ChainParams(L=60, gamma=1.0, h=h)))
        assert mode.phi_L[0] >= 0.0
        assert abs(float(mode.phi_L @ mode.phi_L) - 0.5) < 1e-12
        assert abs(float(mode.phi_R @ mode.phi_R) - 0.5) < 1e-12
        assert mode.subgap


def test_plateau_symmetry():
    mode = zero_mode(build_bdg_spectrum(ChainParams(L=40, gamma=0.7, h=0.3)))
    assert plateau_prediction(mode, 1, 5) == plateau_prediction(mode, 5, 1)


def test_plateau_closed_form_gamma_one():
    # At gamma=1 the boundary envelope is geometric with ratio h/J, giving
    # plateau(1,1) = (1 - (h/J)^2)^2 exactly in the large-L limit.
    for h in (0.2, 0.5, 0.8):
        mode = zero_mode(build_bdg_spectrum(ChainParams(L=120, gamma=1.0, h=h)))
        assert abs(plateau_prediction(mode, 1, 1) - (1 - h * h) ** 2) < 1e-6


def test_envelope_scaling_fit_matches_closed_form():
    # Fitting ln plateau vs ln(1-h) on h in [0.5, 0.9] reflects the exact
    # form (1-h^2)^2 = (1-h)^2 (1+h)^2: the (1+h)^2 factor biases the
    # finite-window exponent below the asymptotic value 2, and the bias
    # shrinks as the window moves toward the transition.
    def fit(hs):
        pts = []
        for h in hs:
            mode = zero_mode(build_bdg_spectrum(
                ChainParams(L=400, gamma=1.0, h=h)))
            pts.append((h, plateau_prediction(mode, 1, 1)))
        return critical_scaling_fit(pts)[0]

    far = fit([0.5, 0.6, 0.7, 0.8, 0.9])
    near = fit([0.8, 0.85, 0.9, 0.95])
    exact = lambda hs: np.polyfit(np.log1p(-np.array(hs)),
                                  2 * np.log1p(-np.array(hs))
                                  + 2 * np.log1p(np.array(hs)), 1)[0]
    assert abs(far - exact([0.5, 0.6, 0.7, 0.8, 0.9])) < 0.01
    assert abs(near - exact([0.8, 0.85, 0.9, 0.95])) < 0.01
    assert far < near < 2.0


def test_fit_validation():
    with pytest.raises(FitError):
        critical_scaling_fit([(0.5, 1.0), (0.6, 0.9)])
    with pytest.raises(FitError):
        critical_scaling_fit([(0.5, 1.0), (0.6, 0.9), (0.7, -0.1), (0.8, 0.2)])
    with pytest.raises(FitError):
        critical_scaling_fit([(1.5, 1.0), (0.6, 0.9), (0.7, 0.1), (0.8, 0.2)])
