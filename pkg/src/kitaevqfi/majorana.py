"""Majorana zero-mode extraction, localization length, plateau prediction.

The lowest open-chain BdG mode (u_0, v_0) splits into two Majorana envelopes
phi_L = (u_0 + v_0)/sqrt(2) and phi_R = (u_0 - v_0)/sqrt(2), localized at
opposite ends in the topological phase.  The envelope decay is governed by
the characteristic roots of the bulk recurrence

    (J + Delta) phi_{j+1} + mu phi_j + (J - Delta) phi_{j-1} = 0,

with Delta = J*gamma, mu = -2h, giving the localization length
xi = -1 / ln |r_>|.  The long-time boundary QFI plateau equals the zero-mode
term 4 |phi_L(j) phi_L(k)|^2 and scales as |h - J|^2 near the transition.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .bdg import BdgSpectrum, ChainParams


class FitError(ValueError):
    """Raised when a scaling fit is fed degenerate or nonpositive data."""


class DegenerateRecurrenceError(ValueError):
    """Raised when J + Delta = 0 and the envelope recurrence degenerates."""


@dataclasses.dataclass
class MajoranaMode:
    """Lowest BdG mode viewed as a pair of Majorana envelopes.

    eps0 is the mode energy, phi_L / phi_R the left/right envelopes
    (each normalized to sum phi^2 = 1/2), xi the analytic localization
    length (inf in the trivial phase), roots the characteristic roots,
    and subgap flags whether eps0 sits below half the next energy.
    """

    eps0: float
    phi_L: np.ndarray
    phi_R: np.ndarray
    xi: float
    roots: tuple[complex, complex]
    subgap: bool


def localization_length(params: ChainParams) -> tuple[float, complex, complex]:
    """Analytic (xi, r_plus, r_minus) from the envelope recurrence.

    In the trivial phase |r_>| >= 1 the mode is not normalizable and
    xi = inf is returned.
    """
    if not params.uniform:
        raise ValueError("analytic localization length requires a uniform field")
    J = params.J
    delta = J * params.gamma
    if J + delta == 0.0:
        raise DegenerateRecurrenceError("J + Delta = 0: recurrence degenerates")
    mu = -2.0 * params.h
    disc = complex(mu * mu - 4.0 * (J * J - delta * delta))
    sq = np.sqrt(disc)
    r_plus = (-mu + sq) / (2.0 * (J + delta))
    r_minus = (-mu - sq) / (2.0 * (J + delta))
    r_big = max(abs(r_plus), abs(r_minus))
    if r_big >= 1.0 or r_big == 0.0:
        xi = math.inf
    else:
        xi = -1.0 / math.log(r_big)
    return xi, complex(r_plus), complex(r_minus)


def zero_mode(spec: BdgSpectrum) -> MajoranaMode:
    """Majorana envelopes of the minimal-energy mode.

    Works in either phase: in the trivial phase the returned envelopes are
    delocalized and `subgap` is False.  The analytic xi and roots are
    attached for uniform-field chains, xi = inf otherwise.
    """
    u0 = spec.u_modes[:, 0]
    v0 = spec.v_modes[:, 0]
    phi_L = (u0 + v0) / np.sqrt(2.0)
    phi_R = (u0 - v0) / np.sqrt(2.0)
    eps0 = float(spec.energies[0])
    gap = float(spec.energies[1]) if spec.energies.size > 1 else 0.0
    if spec.params.uniform:
        xi, r_plus, r_minus = localization_length(spec.params)
    else:
        xi, r_plus, r_minus = math.inf, complex(np.nan), complex(np.nan)
    return MajoranaMode(
        eps0=eps0,
        phi_L=phi_L,
        phi_R=phi_R,
        xi=xi,
        roots=(r_plus, r_minus),
        subgap=eps0 < gap / 2.0,
    )


def plateau_prediction(mode: MajoranaMode, j: int, k: int) -> float:
    """Zero-mode term of the time-averaged boundary QFI, 4 phi_L(j)^2 phi_L(k)^2.

    Sites are 1-based.
    """
    pl = mode.phi_L
    return 4.0 * pl[j - 1] ** 2 * pl[k - 1] ** 2


def critical_scaling_fit(points, J: float = 1.0) -> tuple[float, float, float]:
    """Power-law fit of the plateau against the distance to the transition.

    Least-squares fit of ln(mean_qfi) against ln(1 - h/J) over (h, mean_qfi)
    pairs with 0 < h < J.  Returns (exponent, amplitude, rms_residual) where
    amplitude is the intercept exp-factor.
    """
    pts = [(float(h), float(f)) for h, f in points]
    if len(pts) < 4:
        raise FitError(f"need >= 4 points, got {len(pts)}")
    for h, f in pts:
        if not 0.0 < h < J:
            raise FitError(f"h = {h} outside (0, J)")
        if not f > 0.0:
            raise FitError(f"nonpositive mean QFI {f} at h = {h}")
    x = np.log(1.0 - np.array([h for h, _ in pts]) / J)
    y = np.log([f for _, f in pts])
    if np.ptp(x) < 1e-14:
        raise FitError("degenerate abscissae")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return float(slope), float(np.exp(intercept)), rms
