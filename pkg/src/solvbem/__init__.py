"""Boundary-element solvation electrostatics with panel and point discretizations.

Typical use::

    from solvbem import generate_icosphere, panel_geometry, sample_grid_charges
    from solvbem import DielectricConfig, compute_energy

    mesh = generate_icosphere(6.0, 3)
    charges = sample_grid_charges(6.0, 1.0, 10, seed=42)
    result = compute_energy(panel_geometry(mesh), charges, DielectricConfig())
"""
from .bench import (
    StudyConfig,
    StudyResult,
    StudyRow,
    detect_crossover,
    observed_order,
    richardson_reference,
    run_convergence_study,
    run_line_potential_study,
    run_work_precision_study,
)
from .kernels import (
    FlopCount,
    FlopLedger,
    Panel,
    adaptive_triangle_quadrature,
    coulomb_kernel,
    measured_panel_point_ratio,
    normal_field_kernel,
    panel_flux,
    single_layer_panel_potential,
    triangle_solid_angle,
)
from .kirkwood import born_energy, kirkwood_energy, kirkwood_potentials, series_coefficients
from .operators import (
    DenseMatrix,
    DielectricConfig,
    assemble_A,
    assemble_B,
    assemble_C,
    eval_reaction_potential,
)
from .solver import compute_energy, gmres_solve, lu_solve, reaction_matrix, solvation_energy
from .surface import (
    ChargeSet,
    PanelSet,
    PointCloud,
    TriangleMesh,
    generate_icosphere,
    load_msms_mesh,
    load_pqr,
    panel_geometry,
    sample_grid_charges,
    vertex_quadrature,
)
from .units import COULOMB_KCAL

__version__ = "0.1.0"
