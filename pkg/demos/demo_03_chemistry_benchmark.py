"""
Comparing three published chemistries
=====================================

The same schedule is run through the bundled plane tables. Each table
gives wear per hour relative to capacity, so one system configuration
serves all three.
"""

import warnings
from pathlib import Path

import degmap
from degmap.io import parse_schedule_csv, read_config

here = Path(__file__).parent
schedule = parse_schedule_csv((here / "schedule.csv").read_text())
cfg = read_config(here / "config.json")
c_e = degmap.energy_capacity(cfg)

chems = [degmap.load_reference(c) for c in ("LFP", "NMC_LMO", "LCO")]
for chem in chems:
    print(f"{chem.id:8s} {len(chem.pwa):2d} planes, sign pairs: {degmap.has_sign_pairs(chem.pwa)}")

# the LFP surface dips below zero near rest at low SoE; that is reported, not hidden
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    fades = degmap.compare_chemistries([(c, cfg) for c in chems], schedule)
for msg in caught:
    print("warning:", msg.message)

for key, fade in sorted(fades.items(), key=lambda kv: kv[1]):
    print(f"{key:8s} {fade:.4e} kWh ({fade / c_e:.5%} of capacity)")

# which input drives wear more within |P/C_E| <= 1; the NMC planes that
# depend on power only take over beyond that range
for chem in chems:
    d = degmap.sensitivity_diagnostic(chem.pwa)
    print(f"{chem.id:8s} |dJ/dP| {d['mean_abs_dpower']:.2e}  |dJ/dE| {d['mean_abs_dsoe']:.2e}")
