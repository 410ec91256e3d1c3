"""Reaction potential along the z axis for a charge near the boundary.

The point method degrades as the charge approaches the surface; the panel
method does not, since its entries are exact integrals.
"""
import numpy as np

from solvbem import run_line_potential_study

for zc in (4.5, 5.5):
    s = run_line_potential_study(charge_z=zc, level=3, z_samples=np.linspace(-5.0, 5.0, 11))
    print(f"charge at z = {zc}")
    print("     z     series      panel      point")
    for z, a, b, c in zip(s.z, s.psi_series, s.psi_panel, s.psi_point):
        print(f"{z:6.1f} {a:10.3f} {b:10.3f} {c:10.3f}")
    print(f"max point error off the charge and surface: {s.max_point_error():.3f} kcal/mol/e\n")
