"""Single-site quantum Fisher information from Bogoliubov propagators.

The reduced state of one site is a qubit 1/2 (1 + m.sigma).  Its Bloch vector
after encoding an angle theta at site k and evolving for time t is fixed by
four propagator-derived quantities: the combined propagator W_{jk} (U+V for
y-axis encoding, U-V for x-axis), the occupation difference
Delta p = |U_{jk}|^2 - |V_{jk}|^2, the vacuum filling S_j = sum_l |V_{jl}|^2,
and Z0 = 1 - 2 S_j - Delta p.  The QFI follows from the qubit formula

    F_Q = |dm|^2 + (m . dm)^2 / (1 - |m|^2),

either applied to the assembled Bloch vector or through the equivalent closed
form; both code paths are kept so they can check each other.  At theta0 = 0
the closed form collapses to |W_{jk}(t)|^2.
"""

from __future__ import annotations

import dataclasses
import enum

import numpy as np

from .bdg import BdgSpectrum, PropagatorPair, propagators

# Pure-state guard: the mixed-state term is 0/0 for radial derivatives of a
# pure state; it is dropped when numerator and denominator both vanish below
# this scale.
PURE_STATE_EPS = 1e-12


class InvalidStateError(ValueError):
    """Raised when a Bloch vector leaves the unit ball beyond tolerance."""


class Channel(enum.Enum):
    """Rotation axis of the encoding pulse; selects the combined propagator."""

    Y = "y"   # W = U + V
    X = "x"   # W = U - V

    @property
    def sign(self) -> int:
        return 1 if self is Channel.Y else -1


@dataclasses.dataclass
class QfiInputs:
    """Propagator-level inputs of the single-site QFI at one (j, k, t)."""

    W: complex
    delta_p: float
    S_j: float
    Z0: float
    theta0: float = 0.0


@dataclasses.dataclass
class BlochVector:
    """Bloch vector m and its theta-derivative at the operating point."""

    m: np.ndarray
    dm: np.ndarray


def _check_sites(L: int, *sites: int):
    for s in sites:
        if not 1 <= s <= L:
            raise IndexError(f"site index {s} outside chain 1..{L}")


def qfi_inputs(
    pp: PropagatorPair, j: int, k: int, channel: Channel, theta0: float = 0.0
) -> QfiInputs:
    """Extract (W, Delta p, S_j, Z0) from a propagator pair.  Sites are 1-based."""
    L = pp.U.shape[0]
    _check_sites(L, j, k)
    ji, ki = j - 1, k - 1
    U_jk = pp.U[ji, ki]
    V_jk = pp.V[ji, ki]
    W = U_jk + channel.sign * V_jk
    delta_p = abs(U_jk) ** 2 - abs(V_jk) ** 2
    S_j = float(np.sum(np.abs(pp.V[ji, :]) ** 2))
    Z0 = 1.0 - 2.0 * S_j - delta_p
    return QfiInputs(W=complex(W), delta_p=delta_p, S_j=S_j, Z0=Z0, theta0=theta0)


def bloch_vector(inp: QfiInputs, theta: float) -> BlochVector:
    """Bloch vector and its derivative at angle theta.

    m = (-sin(theta) Re W, -sin(theta) Im W, Z0 + Delta p cos(theta)).
    """
    st, ct = np.sin(theta), np.cos(theta)
    w = inp.W
    m = np.array([-st * w.real, -st * w.imag, inp.Z0 + inp.delta_p * ct])
    dm = np.array([-ct * w.real, -ct * w.imag, -inp.delta_p * st])
    return BlochVector(m=m, dm=dm)


def qfi_qubit(b: BlochVector) -> float:
    """Qubit QFI from a Bloch vector and its parameter derivative."""
    m2 = float(b.m @ b.m)
    if m2 > 1.0 + 1e-10:
        raise InvalidStateError(f"|m|^2 = {m2} exceeds 1")
    dm2 = float(b.dm @ b.dm)
    mdm = float(b.m @ b.dm)
    den = 1.0 - m2
    if den < PURE_STATE_EPS:
        if abs(mdm) < np.sqrt(PURE_STATE_EPS):
            return dm2
        den = PURE_STATE_EPS
    return dm2 + mdm * mdm / den


def qfi_closed_form(inp: QfiInputs) -> float:
    """Closed-form single-site QFI at the operating angle inp.theta0.

    Independent evaluation of the same algebra as qfi_qubit(bloch_vector(.));
    the two must agree to 1e-12.
    """
    th = inp.theta0
    st, ct = np.sin(th), np.cos(th)
    w2 = abs(inp.W) ** 2
    dp = inp.delta_p
    first = w2 * ct * ct + dp * dp * st * st
    num = st * st * (ct * (w2 - dp * dp) - dp * inp.Z0) ** 2
    den = 1.0 - w2 * st * st - (inp.Z0 + dp * ct) ** 2
    if den < -1e-10:
        raise InvalidStateError(
            f"purity denominator {den} < 0; propagator invariants broken"
        )
    if den < PURE_STATE_EPS:
        if num < PURE_STATE_EPS:
            return first
        den = PURE_STATE_EPS
    return first + num / den


def qfi_optimal(pp: PropagatorPair, j: int, k: int, channel: Channel) -> float:
    """QFI at the optimal operating point theta0 = 0, equal to |W_{jk}(t)|^2."""
    L = pp.U.shape[0]
    _check_sites(L, j, k)
    ji, ki = j - 1, k - 1
    W = pp.U[ji, ki] + channel.sign * pp.V[ji, ki]
    return abs(W) ** 2


# ---------------------------------------------------------------------------
# Vectorized evaluation over time grids.  Scans only ever need one (j, k)
# pair, so these paths avoid building full LxL propagators per time step.

def w_timeseries(
    spec: BdgSpectrum, j: int, k: int, channel: Channel, times: np.ndarray
) -> np.ndarray:
    """Combined propagator W_{jk}(t) on a time grid (complex array)."""
    _check_sites(spec.params.L, j, k)
    ji, ki = j - 1, k - 1
    u, v = spec.u_modes, spec.v_modes
    em = np.exp(-1j * np.outer(times, spec.energies))
    ep = em.conj()
    U_t = em @ (u[ji] * u[ki]) + ep @ (v[ji] * v[ki])
    V_t = em @ (u[ji] * v[ki]) + ep @ (v[ji] * u[ki])
    return U_t + channel.sign * V_t


def qfi_timeseries(
    spec: BdgSpectrum,
    j: int,
    k: int,
    channel: Channel,
    theta0: float,
    times: np.ndarray,
) -> np.ndarray:
    """Single-site QFI F_Q^{(j)}(t) on a time grid.

    For theta0 = 0 this is |W_{jk}(t)|^2; otherwise the closed form is
    evaluated per sample, which additionally needs S_j(t) from row j of V(t).
    """
    times = np.asarray(times, dtype=float)
    w = w_timeseries(spec, j, k, channel, times)
    if theta0 == 0.0:
        return np.abs(w) ** 2

    ji, ki = j - 1, k - 1
    u, v = spec.u_modes, spec.v_modes
    em = np.exp(-1j * np.outer(times, spec.energies))
    ep = em.conj()
    U_jk = em @ (u[ji] * u[ki]) + ep @ (v[ji] * v[ki])
    V_jk = em @ (u[ji] * v[ki]) + ep @ (v[ji] * u[ki])
    V_row = (em * u[ji]) @ v.T + (ep * v[ji]) @ u.T        # (T, L)
    S_j = np.sum(np.abs(V_row) ** 2, axis=1)
    delta_p = np.abs(U_jk) ** 2 - np.abs(V_jk) ** 2
    Z0 = 1.0 - 2.0 * S_j - delta_p

    out = np.empty(times.size)
    for i in range(times.size):
        inp = QfiInputs(
            W=complex(w[i]), delta_p=float(delta_p[i]), S_j=float(S_j[i]),
            Z0=float(Z0[i]), theta0=theta0,
        )
        out[i] = qfi_closed_form(inp)
    return out


def qfi_at_time(
    params_spec: BdgSpectrum,
    j: int,
    k: int,
    channel: Channel,
    theta0: float,
    t: float,
) -> float:
    """Single-time QFI through the full propagator pair (reference path)."""
    pp = propagators(params_spec, t)
    return qfi_closed_form(qfi_inputs(pp, j, k, channel, theta0=theta0))
