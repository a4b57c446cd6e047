"""
Price arbitrage with a wear cost
================================

A day of hourly prices, one battery, and the PWA wear surface entered
through its epigraph. Raising the price put on lost capacity makes the
schedule trade less.
"""

from pathlib import Path

import numpy as np

import degmap
from degmap.io import parse_prices_csv, read_config

here = Path(__file__).parent
t_h, prices = parse_prices_csv((here / "prices.csv").read_text())
cfg = read_config(here / "config.json")
c_e = degmap.energy_capacity(cfg)
pwa = degmap.load_reference("NMC_LMO").pwa

for deg_price in (0.0, 50.0, 500.0, 5000.0):
    prob = degmap.DispatchProblem(
        prices=prices, dt=1.0, p_min=-c_e, p_max=c_e, e0=0.5 * c_e, c_e=c_e,
        eta_c=0.95, eta_d=0.95, pwa=pwa, degradation_price=deg_price,
    )
    sol = degmap.dispatch(prob)
    throughput = np.sum(np.abs(sol.power))
    wear = np.sum(sol.deg_cost_rate)
    print(f"wear price {deg_price:6.0f}: objective {sol.objective:9.4f}, "
          f"throughput {throughput:7.2f} kWh, wear {wear:.3e} kWh")

# at a positive wear price the epigraph variables sit on the surface
gap = degmap.epigraph_gap(prob, sol)
print("largest epigraph gap:", float(np.max(np.abs(gap))))
