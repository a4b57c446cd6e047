"""
From cycle-test results to a PWA wear map
=========================================

Capacity fade measured at a few depths of discharge and two currents is
turned into side currents per SoC band, then into a size-independent map
and finally into a handful of planes.
"""

import numpy as np

import degmap
from degmap.io import parse_cycle_csv
from pathlib import Path

here = Path(__file__).parent

# one row per cycle test: current, capacity, DoD, cycles, capacity lost
rows = parse_cycle_csv((here / "wang.csv").read_text())

# five SoC bands at the high current, three at the low one
sets = degmap.cycle_test_sets(rows, [5, 3])
systems = [degmap.build_pattern_system(s) for s in sets]
for s, system in zip(sets, systems):
    print(f"I = {s.i_bat} A, pattern matrix (Ah per A of side current):")
    print(np.array2string(system.matrix, precision=1, suppress_small=True))
    print("rows departing from plain DoD coverage:", system.divergent_rows)

# both currents together form a block-diagonal system
full = degmap.assemble_multirate(systems)
dmap = degmap.solve_map(full)
print("side current (A), bands x rates:")
print(np.array2string(dmap.side_current, precision=4))

# J/C_E on a (SoE, P/C_E) grid; the mean OCV cancels out
nmap = degmap.normalize_map(dmap, v_oc_mean=3.7)

# lower convex hull as max of planes
pwa = degmap.lower_convex_hull_pwa(nmap)
err = degmap.pwa_fit_error(nmap, pwa)
print(f"{len(pwa)} planes, nrmse {err.nrmse:.1%}")

# the identified side current is not monotone in current at mid SoC, so the
# hull is flat in power there and the gap to the map is large
for e in (0.1, 0.5, 0.9):
    row = [degmap.eval_pwa(pwa, p, e, 1.0).value for p in (-3.5, 0.0, 3.5)]
    print(f"E_n = {e}: J/C_E at P/C_E = -3.5, 0, 3.5:", np.array2string(np.array(row), precision=3))
