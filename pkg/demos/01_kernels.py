"""Panel integrals versus point kernels on one triangle.

Shows the analytic single-layer integral approaching the point (monopole)
kernel as the observer moves away, the solid-angle flux summing to -1 over a
closed surface, and the per-entry flop ratio that the work-precision study
charges for a panel entry relative to a point entry.
"""
import numpy as np

from solvbem import Panel, coulomb_kernel, generate_icosphere, measured_panel_point_ratio, panel_geometry
from solvbem import single_layer_panel_potential
from solvbem.kernels import panel_flux_matrix

tri = Panel.from_corners((0.0, 0, 0), (1.0, 0, 0), (0, 1.0, 0))
print("distance  analytic          area * point kernel   rel. diff")
for d in (0.5, 2.0, 8.0, 32.0):
    x = tri.centroid + [0.0, 0.0, d]
    exact = single_layer_panel_potential(tri, x)
    point = tri.area * coulomb_kernel(tri.centroid, x)
    print(f"{d:8.1f}  {exact:.10e}  {point:.10e}    {abs(point / exact - 1):.2e}")

corners = panel_geometry(generate_icosphere(6.0, 2)).corners
inside = np.array([[0.0, 0, 0], [3.0, -2.0, 1.0]])
print("\nflux closure from interior points:", panel_flux_matrix(corners, inside).sum(axis=0))
print("flux closure from an exterior point:", panel_flux_matrix(corners, [[0, 0, 9.0]]).sum())
print(f"\npanel / point flop ratio N_p = {measured_panel_point_ratio():.2f}")
