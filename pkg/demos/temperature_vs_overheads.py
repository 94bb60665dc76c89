"""
How ambient temperature shapes the cost of serving a fixed load
===============================================================

A site's chillers get less efficient as outside air warms up. We sweep
ambient temperature for one site running a constant IT load and watch
the cooling overhead, total energy, and cooling-tower water move.
"""

import numpy as np

from thermosched.energy import site_energy_breakdown
from thermosched.environment import CopCurve, WaterParams, cop_at
from thermosched.water_carbon import site_water_breakdown

# The default efficiency curve is anchored at two operating points:
# partial PUE 1.05 at -3.9 degC and 1.30 at 35 degC, interpolated
# linearly and clamped outside. CoP = 3 / (pPUE - 1), so cold air means
# dramatically cheaper heat rejection.
curve = CopCurve()
water = WaterParams()  # 0.68 kWh absorbed per liter evaporated, 20% blowdown

E_IT = 10.0  # kWh of IT energy per epoch, held fixed across the sweep

print(f"{'temp_C':>7} {'CoP':>7} {'e_total_kwh':>12} {'overhead_%':>11} {'water_l':>9}")
for temp in np.linspace(-5.0, 40.0, 10):
    cop = cop_at(curve, float(temp))
    b = site_energy_breakdown("site", 0, E_IT, cop)
    w = site_water_breakdown("site", 0, E_IT, b.e_total, water,
                             water_intensity_l_per_kwh=0.2)
    overhead = 100.0 * (b.e_total - b.e_it) / b.e_it
    print(
        f"{temp:>7.1f} {cop:>7.2f} {b.e_total:>12.3f} {overhead:>11.1f}"
        f" {w.w_evap_l + w.w_blowdown_l + w.w_grid_l:>9.2f}"
    )

# The overhead floor is the 13% power-conditioning loss; everything above
# that is cooling. Between the two anchor temperatures the cooling term
# grows roughly six-fold, which is exactly the signal a
# temperature-aware scheduler exploits by preferring cold sites.
