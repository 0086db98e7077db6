"""Self-contained numerical invariant gates.

Each gate checks an exact identity of the implementation at machine-level
tolerance.  `run_all_gates` returns (name, passed, detail) triples; the
command-line `verify` subcommand prints them and exits nonzero on failure.
"""

from __future__ import annotations

import numpy as np

from .bdg import ChainParams, build_bdg_spectrum, propagators
from .manybody import (
    ManyBodyParams,
    evolve_two_branches,
    qfi_spectral,
    reduced_qubit_from_branches,
)
from .qfi import (
    Channel,
    bloch_vector,
    qfi_at_time,
    qfi_closed_form,
    qfi_inputs,
    qfi_qubit,
)


def gate_propagator_unitarity(seed: int) -> tuple[bool, str]:
    """U U^dag + V V^dag = 1 and U V^T + V U^T = 0 for random parameters."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        L = int(rng.integers(2, 30))
        p = ChainParams(L=L, gamma=rng.uniform(-1.5, 1.5),
                        h=rng.uniform(-2.0, 2.0))
        pp = propagators(build_bdg_spectrum(p), rng.uniform(0.0, 20.0))
        U, V = pp.U, pp.V
        worst = max(
            worst,
            float(np.max(np.abs(U @ U.conj().T + V @ V.conj().T - np.eye(L)))),
            float(np.max(np.abs(U @ V.T + V @ U.T))),
        )
    return worst < 1e-11, f"max deviation {worst:.2e} (tol 1e-11)"


def gate_sweet_spot_identity(seed: int) -> tuple[bool, str]:
    """At gamma = 1, h = 0 the boundary element W_11(t) equals 1 for all t."""
    rng = np.random.default_rng(seed + 1)
    spec = build_bdg_spectrum(ChainParams(L=40, gamma=1.0, h=0.0))
    worst = 0.0
    for t in rng.uniform(0.0, 100.0, size=25):
        pp = propagators(spec, float(t))
        w = pp.U[0, 0] + pp.V[0, 0]
        worst = max(worst, abs(w - 1.0))
    return worst < 1e-10, f"max |W_11 - 1| = {worst:.2e} (tol 1e-10)"


def gate_two_path_agreement(seed: int) -> tuple[bool, str]:
    """Qubit-model QFI and the closed-form expression must coincide."""
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(25):
        L = int(rng.integers(2, 16))
        p = ChainParams(L=L, gamma=rng.uniform(-1.2, 1.2),
                        h=rng.uniform(-1.5, 1.5))
        pp = propagators(build_bdg_spectrum(p), rng.uniform(0.0, 10.0))
        j = int(rng.integers(1, L + 1))
        k = int(rng.integers(1, L + 1))
        theta0 = float(rng.uniform(0.0, np.pi))
        ch = Channel.Y if rng.random() < 0.5 else Channel.X
        inp = qfi_inputs(pp, j, k, ch, theta0=theta0)
        f_qubit = qfi_qubit(bloch_vector(inp, theta0))
        worst = max(worst, abs(f_qubit - qfi_closed_form(inp)))
    return worst < 1e-11, f"max |qubit - closed form| = {worst:.2e} (tol 1e-11)"


def gate_free_fermion_equivalence(seed: int) -> tuple[bool, str]:
    """Quadratic-theory QFI must match the exact-statevector value at delta=0."""
    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for _ in range(12):
        L = int(rng.choice([4, 6, 8]))
        p = ChainParams(L=L, gamma=rng.uniform(-1.2, 1.2),
                        h=rng.uniform(-1.5, 1.5))
        spec = build_bdg_spectrum(p)
        t = float(rng.uniform(0.0, 8.0))
        j = int(rng.integers(1, L + 1))
        k = int(rng.integers(1, L + 1))
        theta0 = float(rng.choice([0.0, 0.4, 1.2]))
        ch = Channel.Y if rng.random() < 0.5 else Channel.X
        f_engine = qfi_at_time(spec, j, k, ch, theta0, t)
        A, B = evolve_two_branches(ManyBodyParams(chain=p), k, ch, t)
        f_exact = qfi_spectral(reduced_qubit_from_branches(A, B, theta0, j))
        worst = max(worst, abs(f_engine - f_exact))
    return worst < 1e-9, f"max |engine - statevector| = {worst:.2e} (tol 1e-9)"


GATES = (
    ("propagator-unitarity", gate_propagator_unitarity),
    ("sweet-spot-identity", gate_sweet_spot_identity),
    ("two-path-agreement", gate_two_path_agreement),
    ("free-fermion-equivalence", gate_free_fermion_equivalence),
)


def run_all_gates(seed: int = 0):
    """Run every gate; returns a list of (name, passed, detail)."""
    return [(name, *fn(seed)) for name, fn in GATES]
