"""Boundary QFI plateau across the phase diagram.

Computes the window-averaged boundary quantum Fisher information on a small
(h, gamma) grid and compares the topological-phase values against the
Majorana zero-mode prediction 4 phi_L(1)^4.  Inside the topological region
(|h| < J, gamma != 0) the time average settles on a nonzero plateau fixed by
the edge-mode envelope; outside it dephases to an O(1/L) remnant.

Run:  python3 demos/boundary_plateau.py
"""

import numpy as np

from kitaevqfi import (
    ChainParams,
    Channel,
    TimeWindow,
    build_bdg_spectrum,
    plateau_prediction,
    time_average_qfi,
    zero_mode,
)

L = 100
window = TimeWindow.with_spacing(150.0, 200.0)

print(f"L = {L}, averaging window tJ in [{window.t_min:g}, {window.t_max:g}]")
print(f"{'h':>5} {'gamma':>6} {'<F_Q>':>10} {'zero-mode':>10} {'phase':>12}")

for gamma in (0.3, 1.0):
    for h in (0.2, 0.5, 0.8, 1.2, 1.8):
        p = ChainParams(L=L, gamma=gamma, h=h)
        mean, _ = time_average_qfi(p, 1, 1, Channel.Y, 0.0, window)
        mode = zero_mode(build_bdg_spectrum(p))
        pred = plateau_prediction(mode, 1, 1) if mode.subgap else 0.0
        phase = "topological" if h < 1.0 else "trivial"
        print(f"{h:5.1f} {gamma:6.1f} {mean:10.4f} {pred:10.4f} {phase:>12}")

print()
print("The plateau tracks the envelope prediction in the topological phase")
print("and collapses to a small dephasing remnant in the trivial phase.")
