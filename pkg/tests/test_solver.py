import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from solvbem.kernels import FlopLedger
from solvbem.kirkwood import born_energy
from solvbem.operators import DielectricConfig, assemble_A, assemble_B, assemble_C
from solvbem.solver import (
    ConvergenceError,
    SingularMatrixError,
    compute_energy,
    gmres_solve,
    lu_solve,
    reaction_matrix,
    solvation_energy,
)
from solvbem.surface import ChargeSet, generate_icosphere, panel_geometry, sample_grid_charges, vertex_quadrature

WATER = DielectricConfig()


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_lu_small_cases():
    assert np.allclose(lu_solve(np.eye(3), np.arange(3.0)), np.arange(3.0))
    assert np.allclose(lu_solve(np.array([[2.0, 0], [0, 4]]), np.array([2.0, 8])), [1, 2])
    with pytest.raises(SingularMatrixError):
        lu_solve(np.array([[1.0, 2], [2, 4]]), np.ones(2))


def test_lu_residual_and_flops(rng):
    A = rng.normal(size=(50, 50)) + 50 * np.eye(50)
    rhs = rng.normal(size=(50, 3))
    ledger = FlopLedger()
    X = lu_solve(A, rhs, ledger)
    assert np.linalg.norm(A @ X - rhs) / np.linalg.norm(rhs) <= 1e-10
    assert ledger.total == 2 * 50**3 // 3 + 2 * 50 * 50 * 3


def test_gmres_identity_and_agreement(rng):
    x, rep = gmres_solve(np.eye(5), np.arange(1.0, 6.0))
    assert rep.iterations == 1 and np.allclose(x, np.arange(1.0, 6.0))
    A = rng.normal(size=(40, 40)) + 20 * np.eye(40)
    b = rng.normal(size=40)
    x, rep = gmres_solve(A, b, 1e-12)
    assert np.allclose(x, np.linalg.solve(A, b), rtol=1e-10)
    assert rep.residual_norm <= 1e-12 and rep.flops > 0


def test_gmres_nonconvergence_carries_iterate(rng):
    A = rng.normal(size=(30, 30))
    b = rng.normal(size=30)
    with pytest.raises(ConvergenceError) as info:
        gmres_solve(A, b, 1e-12, max_iter=3)
    assert info.value.x.shape == (30,)
    assert info.value.report.iterations == 3


def test_zero_rhs_and_no_contrast():
    A = assemble_A(panel_geometry(generate_icosphere(6.0, 1)), DielectricConfig(4.0, 4.0))
    assert np.all(gmres_solve(A, np.zeros(A.rows))[0] == 0.0)
    disc = panel_geometry(generate_icosphere(6.0, 1))
    res = compute_energy(disc, sample_grid_charges(6.0, 1.0, 4, 0), DielectricConfig(4.0, 4.0))
    assert res.energy == 0.0 and np.all(res.sigma == 0.0)


@pytest.mark.parametrize("level", [2, 3])
def test_reaction_matrix_nearly_symmetric(level):
    q = sample_grid_charges(6.0, 1.0, 10, 42)
    for disc in (panel_geometry(generate_icosphere(6.0, level)), vertex_quadrature(generate_icosphere(6.0, level))):
        A, B, C = assemble_A(disc, WATER), assemble_B(disc, q, WATER), assemble_C(disc, q.positions)
        L, _, _ = reaction_matrix(C, A, B)
        assert np.linalg.norm(L - L.T) / np.linalg.norm(L) <= 0.05


def test_energy_bilinear_and_nonpositive():
    disc = panel_geometry(generate_icosphere(6.0, 2))
    q = sample_grid_charges(6.0, 1.0, 10, 5)
    A, B, C = assemble_A(disc, WATER), assemble_B(disc, q, WATER), assemble_C(disc, q.positions)
    L, _, _ = reaction_matrix(C, A, B)
    e = solvation_energy(L, q.charges)
    assert solvation_energy(L, 2 * q.charges) == pytest.approx(4 * e)
    assert solvation_energy(L, np.zeros(10)) == 0.0
    assert e < 0


@pytest.mark.parametrize("seed", range(6))
def test_energy_negative_for_random_sets(seed):
    q = sample_grid_charges(6.0, 1.0, 1 + seed, seed)
    for disc in (panel_geometry(generate_icosphere(6.0, 2)), vertex_quadrature(generate_icosphere(6.0, 2))):
        assert compute_energy(disc, q, WATER).energy < 0


def test_born_energy_and_potentials():
    res = compute_energy(panel_geometry(generate_icosphere(6.0, 3)), ChargeSet([[0.0, 0, 0]], [1.0]), WATER)
    exact = born_energy(1.0, 6.0, 4.0, 80.0)
    assert abs(res.energy - exact) / abs(exact) < 5e-3
    assert res.energy == pytest.approx(0.5 * res.potentials[0])


def test_lu_gmres_agree():
    q = sample_grid_charges(6.0, 1.0, 10, 42)
    for disc in (panel_geometry(generate_icosphere(6.0, 3)), vertex_quadrature(generate_icosphere(6.0, 3))):
        e_lu = compute_energy(disc, q, WATER, "lu").energy
        res = compute_energy(disc, q, WATER, "gmres", 1e-10)
        assert res.energy == pytest.approx(e_lu, rel=1e-8)
        assert res.iterations > 0


def test_rotation_invariance():
    mesh = generate_icosphere(6.0, 2)
    q = sample_grid_charges(6.0, 1.0, 10, 42)
    R = Rotation.random(random_state=7).as_matrix()
    for make in (panel_geometry, vertex_quadrature):
        e0 = compute_energy(make(mesh), q, WATER).energy
        e1 = compute_energy(make(mesh.transformed(R)), q.transformed(R), WATER).energy
        assert e1 == pytest.approx(e0, rel=1e-9)


def test_flop_split():
    disc = panel_geometry(generate_icosphere(6.0, 1))
    q = sample_grid_charges(6.0, 1.0, 3, 1)
    res = compute_energy(disc, q, WATER)
    A = assemble_A(disc, WATER)
    assert res.flops_A == A.flops.total
    assert res.flops_total > res.flops_A
    assert res.csv_row().startswith("PAN,80,")
