"""Exact statevector simulation of the spin chain, free or interacting.

Serves two purposes: an independent verification oracle for the propagator
route at delta = 0, and the production engine for the interacting-regime
boundary QFI.  The basis packs site 1 into the lowest bit, with bit value 0
for spin-down and 1 for spin-up; the all-down product state is index 0.

The encoded state is held as two evolved branches,

    |Psi(theta)> = cos(theta/2) A - sin(theta/2) B,

with A the evolved vacuum and B the evolved single-flip state (an extra -i
for x-axis encoding).  All theta-dependence is trigonometric in the branch
decomposition, so the reduced qubit and its derivative are assembled exactly,
without finite differences.

The single-site reduced state is read through the fermionic qubit operators
X_j = c_j + c_j^dag, Y_j = -i(c_j - c_j^dag), Z_j = 1 - 2 n_j, which carry
the Jordan-Wigner string for j > 1.  At the boundary j = 1 the string is
absent and these are plain Pauli measurements up to sign.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bdg import ChainParams
from .qfi import Channel

MAX_SITES = 24        # 2^24 amplitudes; hard memory guard
DENSE_EIGH_MAX = 12   # full eigendecomposition below this, Krylov stepping above
NORM_TOL = 1e-10
ENERGY_TOL = 1e-8


class SimulationSizeError(ValueError):
    """Raised when a requested chain exceeds the statevector cap."""


@dataclasses.dataclass
class ManyBodyParams:
    """Chain parameters plus a nearest-neighbor Ising coupling delta."""

    chain: ChainParams
    delta: float = 0.0

    def __post_init__(self):
        if self.chain.L > MAX_SITES:
            raise SimulationSizeError(
                f"L={self.chain.L} exceeds statevector cap {MAX_SITES}"
            )


@dataclasses.dataclass
class SpinState:
    """Statevector over 2^L spin configurations (site 1 in the lowest bit)."""

    amplitudes: np.ndarray
    L: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclasses.dataclass
class ReducedQubit:
    """2x2 reduced density matrix and its exact theta-derivative."""

    rho: np.ndarray
    drho: np.ndarray


def _parity_of_low_bits(n: np.ndarray, j: int) -> np.ndarray:
    """(-1)^(number of up spins on sites 1..j-1) for each basis index."""
    mask = (1 << (j - 1)) - 1
    masked = n & mask
    c = masked.astype(np.uint64)
    # fold parity of up to 24 bits
    c ^= c >> 16
    c ^= c >> 8
    c ^= c >> 4
    c ^= c >> 2
    c ^= c >> 1
    return 1.0 - 2.0 * (c & 1).astype(float)


def build_hamiltonian(params: ManyBodyParams) -> sp.csr_matrix:
    """Sparse XY + transverse-field + Ising Hamiltonian in the spin basis.

    H = -J/2 sum_j [(1+g) XX + (1-g) YY] - sum_j h_j Z_j
        + delta/2 sum_j Z_j Z_{j+1}

    The Ising coupling carries the same 1/2 normalization as the XY bond
    terms; with this convention the boundary QFI retains ~70% of its
    free value at delta = 0.8 J on the sweet spot, as reported.  The XY
    bond term only connects configurations differing by a double flip;
    the matrix element is -J*g when the two flipped bits were equal and
    -J when they differed.
    """
    L = params.chain.L
    J, g = params.chain.J, params.chain.gamma
    fields = params.chain.fields()
    dim = 1 << L
    n = np.arange(dim, dtype=np.int64)

    z = np.empty((L, dim))
    for j in range(L):
        z[j] = np.where(n & (1 << j), 1.0, -1.0)

    diag = -fields @ z
    for j in range(L - 1):
        diag += 0.5 * params.delta * z[j] * z[j + 1]

    rows = [n]
    cols = [n]
    vals = [diag]
    for j in range(L - 1):
        flip = (1 << j) | (1 << (j + 1))
        equal = z[j] * z[j + 1] > 0
        coeff = np.where(equal, -J * g, -J)
        rows.append(n ^ flip)
        cols.append(n)
        vals.append(coeff)

    H = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return H


class ManyBodyEvolver:
    """Time evolution engine for one (chain, delta) Hamiltonian.

    Uses the full eigendecomposition for L <= 12 (exact at any time) and
    Krylov-based `expm_multiply` stepping above, which holds norm and energy
    drift well below the module tolerances.
    """

    def __init__(self, params: ManyBodyParams):
        self.params = params
        self.L = params.chain.L
        self.H = build_hamiltonian(params)
        self._eig = None
        if self.L <= DENSE_EIGH_MAX:
            energies, modes = np.linalg.eigh(self.H.toarray())
            self._eig = (energies, modes)

    def evolve(self, psi0: np.ndarray, t: float) -> np.ndarray:
        psi0 = np.asarray(psi0, dtype=complex)
        if self._eig is not None:
            energies, modes = self._eig
            return modes @ (np.exp(-1j * energies * t) * (modes.conj().T @ psi0))
        if t == 0.0:
            return psi0.copy()
        return spla.expm_multiply(-1j * t * self.H, psi0)

    def evolve_series(self, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
        """States at each time in a uniform ascending grid; shape (T, 2^L)."""
        times = np.asarray(times, dtype=float)
        psi0 = np.asarray(psi0, dtype=complex)
        if self._eig is not None:
            energies, modes = self._eig
            coeff = modes.conj().T @ psi0
            phases = np.exp(-1j * np.outer(times, energies))
            return (phases * coeff) @ modes.T
        steps = np.diff(times)
        if times.size > 1 and not np.allclose(steps, steps[0], rtol=1e-12, atol=1e-12):
            raise ValueError("Krylov series evolution needs a uniform time grid")
        out = np.empty((times.size, psi0.size), dtype=complex)
        psi = self.evolve(psi0, times[0])
        out[0] = psi
        if times.size > 1:
            dt = steps[0]
            op = -1j * dt * self.H
            for i in range(1, times.size):
                psi = spla.expm_multiply(op, psi)
                out[i] = psi
        return out

    def energy(self, psi: np.ndarray) -> float:
        return float(np.real(np.vdot(psi, self.H @ psi)))


def _check_drift(evolver: ManyBodyEvolver, psi0: np.ndarray, psi_t: np.ndarray):
    J = evolver.params.chain.J
    if abs(np.linalg.norm(psi_t) - 1.0) > NORM_TOL:
        raise RuntimeError("norm drift exceeded tolerance during evolution")
    if abs(evolver.energy(psi_t) - evolver.energy(psi0)) > ENERGY_TOL * J:
        raise RuntimeError("energy drift exceeded tolerance during evolution")


def initial_branches(L: int, k: int, axis: Channel) -> tuple[np.ndarray, np.ndarray]:
    """Unevolved branch states: vacuum and the site-k flip with channel phase."""
    dim = 1 << L
    a = np.zeros(dim, dtype=complex)
    a[0] = 1.0
    b = np.zeros(dim, dtype=complex)
    b[1 << (k - 1)] = 1.0 if axis is Channel.Y else -1j
    return a, b


def evolve_two_branches(
    params: ManyBodyParams, k: int, axis: Channel, t: float,
    evolver: ManyBodyEvolver | None = None,
) -> tuple[SpinState, SpinState]:
    """Evolve the vacuum branch and the single-flip branch to time t."""
    L = params.chain.L
    if not 1 <= k <= L:
        raise IndexError(f"encoding site {k} outside chain 1..{L}")
    if evolver is None:
        evolver = ManyBodyEvolver(params)
    a0, b0 = initial_branches(L, k, axis)
    a_t = evolver.evolve(a0, t)
    b_t = evolver.evolve(b0, t)
    _check_drift(evolver, a0, a_t)
    _check_drift(evolver, b0, b_t)
    return SpinState(a_t, L), SpinState(b_t, L)


# -- string-dressed fermionic single-site operators --------------------------

def apply_fermion_x(psi: np.ndarray, j: int, L: int) -> np.ndarray:
    """(c_j + c_j^dag) psi, Jordan-Wigner string included."""
    n = np.arange(psi.size, dtype=np.int64)
    chi = _parity_of_low_bits(n, j)
    return chi * psi[n ^ (1 << (j - 1))]


def apply_fermion_y(psi: np.ndarray, j: int, L: int) -> np.ndarray:
    """-i (c_j - c_j^dag) psi, Jordan-Wigner string included."""
    n = np.arange(psi.size, dtype=np.int64)
    bit = 1 << (j - 1)
    chi = _parity_of_low_bits(n, j)
    sign = np.where(n & bit, -1.0, 1.0)
    return -1j * chi * sign * psi[n ^ bit]


def apply_fermion_z(psi: np.ndarray, j: int, L: int) -> np.ndarray:
    """(1 - 2 n_j) psi."""
    n = np.arange(psi.size, dtype=np.int64)
    sign = np.where(n & (1 << (j - 1)), -1.0, 1.0)
    return sign * psi


_PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def reduced_qubit_from_branches(
    A: SpinState, B: SpinState, theta0: float, j: int
) -> ReducedQubit:
    """Exact reduced qubit (rho, d rho / d theta) of fermionic site j.

    The Bloch components are expectation values of the string-dressed
    operators (X_j, Y_j, Z_j); their theta-dependence is assembled from the
    branch matrix elements analytically.
    """
    if A.L != B.L:
        raise ValueError("branch states live on different chains")
    if not 1 <= j <= A.L:
        raise IndexError(f"readout site {j} outside chain 1..{A.L}")
    a_vec, b_vec = A.amplitudes, B.amplitudes
    c = np.cos(theta0 / 2.0)
    s = -np.sin(theta0 / 2.0)
    dc = -np.sin(theta0 / 2.0) / 2.0
    ds = -np.cos(theta0 / 2.0) / 2.0

    m = np.empty(3)
    dm = np.empty(3)
    for i, apply in enumerate((apply_fermion_x, apply_fermion_y, apply_fermion_z)):
        ob = apply(b_vec, j, A.L)
        aa = float(np.real(np.vdot(a_vec, apply(a_vec, j, A.L))))
        bb = float(np.real(np.vdot(b_vec, ob)))
        ab = complex(np.vdot(a_vec, ob))
        m[i] = c * c * aa + s * s * bb + 2.0 * c * s * ab.real
        dm[i] = 2.0 * c * dc * aa + 2.0 * s * ds * bb \
            + 2.0 * (dc * s + c * ds) * ab.real

    eye = np.eye(2, dtype=complex)
    rho = 0.5 * (eye + sum(m[i] * _PAULI[i] for i in range(3)))
    drho = 0.5 * sum(dm[i] * _PAULI[i] for i in range(3))
    return ReducedQubit(rho=rho, drho=drho)


def qfi_spectral(rq: ReducedQubit) -> float:
    """QFI from the eigendecomposition of the reduced density matrix.

    F = sum_{n,m} 2 |<n| drho |m>|^2 / (lam_n + lam_m), restricted to
    lam_n + lam_m > 1e-12.
    """
    lam, vecs = np.linalg.eigh(rq.rho)
    d = vecs.conj().T @ rq.drho @ vecs
    total = 0.0
    for n in range(2):
        for mth in range(2):
            denom = lam[n] + lam[mth]
            if denom > 1e-12:
                total += 2.0 * abs(d[n, mth]) ** 2 / denom
    return float(total)


def parity_expectation(state: SpinState) -> float:
    """<prod_j sigma^z_j>, conserved by the dynamics."""
    n = np.arange(state.amplitudes.size, dtype=np.int64)
    chi = _parity_of_low_bits(n, state.L + 1)
    return float(np.real(np.sum(chi * np.abs(state.amplitudes) ** 2)))


def boundary_qfi_series(
    params: ManyBodyParams,
    k: int,
    channel: Channel,
    theta0: float,
    times: np.ndarray,
    j: int = 1,
) -> np.ndarray:
    """Exact single-site QFI at readout site j over a uniform time grid."""
    evolver = ManyBodyEvolver(params)
    a0, b0 = initial_branches(params.chain.L, k, channel)
    a_series = evolver.evolve_series(a0, times)
    b_series = evolver.evolve_series(b0, times)
    _check_drift(evolver, a0, a_series[-1])
    _check_drift(evolver, b0, b_series[-1])
    out = np.empty(len(times))
    for i in range(len(times)):
        rq = reduced_qubit_from_branches(
            SpinState(a_series[i], params.chain.L),
            SpinState(b_series[i], params.chain.L),
            theta0, j,
        )
        out[i] = qfi_spectral(rq)
    return out


def interaction_scan(base, window, j: int = 1, k: int = 1,
                     channel: Channel = Channel.Y, theta0: float = 0.0):
    """Window-averaged boundary QFI for a list of ManyBodyParams.

    Returns one record dict per entry with the full parameter echo.
    """
    records = []
    for params in base:
        times = window.times()
        f = boundary_qfi_series(params, k, channel, theta0, times)
        mean = float(np.trapezoid(f, times) / (times[-1] - times[0]))
        std = float(np.sqrt(
            np.trapezoid((f - mean) ** 2, times) / (times[-1] - times[0])
        ))
        records.append({
            "L": params.chain.L,
            "J": params.chain.J,
            "gamma": params.chain.gamma,
            "h": params.chain.h,
            "delta": params.delta,
            "j": j,
            "k": k,
            "channel": channel.value,
            "theta0": theta0,
            "t_min": times[0],
            "t_max": times[-1],
            "mean_qfi": mean,
            "std_qfi": std,
        })
    return records
