"""
Discretizing an analytic wear law
=================================

A polynomial in current and open-circuit voltage is sampled on SoC bands
and current rates. The coefficients shipped here are placeholders chosen
only to give a plausible shape.
"""

import json
import warnings
from pathlib import Path

import numpy as np

import degmap
from degmap.io import fn_from_dict, parse_ocv_csv

here = Path(__file__).parent
fn = fn_from_dict(json.loads((here / "lfp_placeholder_fn.json").read_text()))
ocv = parse_ocv_csv((here / "lfp_placeholder_ocv.csv").read_text())

soc = degmap.uniform_soc_grid(20)
rates = degmap.CurrentGrid((0.5, 1.0, 2.3, 4.6, 9.2))

# negative polynomial values are clamped to zero with a warning
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    result = degmap.discretize(fn, ocv, soc, rates, c_q=2.3)
print(f"clamped samples: {result.clamped}, warnings: {len(caught)}")

nmap = degmap.normalize_map(result.map, v_oc_mean=3.3)
pwa = degmap.lower_convex_hull_pwa(nmap)
print(f"{len(pwa)} planes, nrmse {degmap.pwa_fit_error(nmap, pwa).nrmse:.2%}")

# a 100-string, 20-parallel pack of these cells
cfg = degmap.BatteryConfig(n_parallel=20, n_series=100, mean_ocv_v=3.3, cell_capacity_ah=2.3)
c_e = degmap.energy_capacity(cfg)
for p_kw in np.linspace(-c_e, c_e, 5):
    loss = degmap.eval_pwa(pwa, p_kw, 0.5 * c_e, c_e).value
    print(f"P = {p_kw:7.2f} kW: {loss:.3e} kWh of capacity per hour")

# grid dump for an external plotter
dump = degmap.dump_surface(pwa, 11, 11, power_limit=float(nmap.power_axis[-1]))
(here / "analytic_surface.dat").write_text(dump.to_gnuplot())
