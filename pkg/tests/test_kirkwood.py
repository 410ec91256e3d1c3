import numpy as np
import pytest
from scipy.spatial.transform import Rotation
from scipy.special import lpmv

from solvbem.kirkwood import (
    associated_legendre,
    born_energy,
    charge_moments,
    factorial_ratio_table,
    kirkwood_energy,
    kirkwood_potentials,
    legendre_table,
    reaction_coefficients,
    series_coefficients,
    series_reaction_potential,
)
from solvbem.surface import ChargeSet, sample_grid_charges
from solvbem.units import COULOMB_KCAL

CENTRAL = ChargeSet([[0.0, 0.0, 0.0]], [1.0])


def test_legendre_small_cases():
    assert associated_legendre(1, 0, 0.3) == pytest.approx(0.3)
    assert associated_legendre(2, 0, 0.5) == pytest.approx(-0.125)
    assert associated_legendre(1, 1, 0.0) == 1.0
    with pytest.raises(ValueError):
        associated_legendre(2, 0, 1.5)
    with pytest.raises(ValueError):
        associated_legendre(65, 0, 0.1)


def test_legendre_matches_scipy_without_phase():
    x = np.linspace(-1, 1, 41)
    P = legendre_table(25, x)
    for n in range(26):
        for m in range(n + 1):
            ref = (-1) ** m * lpmv(m, n, x)
            assert np.allclose(P[n, m], ref, rtol=1e-11, atol=1e-11 * np.abs(ref).max())


def test_factorial_ratios():
    from math import factorial

    R = factorial_ratio_table(25)
    for n in (0, 5, 25):
        for m in range(n + 1):
            assert R[n, m] == pytest.approx(factorial(n - m) / factorial(n + m), rel=1e-13)


def test_moments_of_central_charge():
    E = charge_moments(CENTRAL, 6)
    assert E[0, 6] == 1.0
    E[0, 6] = 0.0
    assert np.all(E == 0.0)


def test_mirrored_dipole_moments():
    q = ChargeSet([[0, 0, 1.0], [0, 0, -1.0]], [1.0, -1.0])
    E = charge_moments(q, 4)
    assert E[0, 4] == 0.0
    assert E[1, 4] != 0.0


def test_moments_additive_and_conjugate(rng):
    pos = rng.uniform(-2, 2, size=(4, 3))
    q = rng.normal(size=4)
    whole = charge_moments(ChargeSet(pos, q), 8)
    parts = charge_moments(ChargeSet(pos[:2], q[:2]), 8) + charge_moments(ChargeSet(pos[2:], q[2:]), 8)
    assert np.allclose(whole, parts, atol=1e-13)
    for n in range(9):
        for m in range(1, n + 1):
            assert whole[n, 8 - m] == pytest.approx(np.conj(whole[n, 8 + m]))


def test_reaction_coefficients():
    E = charge_moments(CENTRAL, 3)
    B = reaction_coefficients(E, 6.0, 4.0, 80.0)
    assert B[0, 3] == pytest.approx((4.0 - 80.0) / (4.0 * 80.0 * 6.0))
    assert np.all(reaction_coefficients(E, 6.0, 4.0, 4.0) == 0.0)
    assert reaction_coefficients(E, 12.0, 4.0, 80.0)[0, 3] == pytest.approx(B[0, 3] / 2)


def test_born_limit():
    psi = kirkwood_potentials(CENTRAL, 6.0, 4.0, 80.0)
    assert psi[0] / COULOMB_KCAL == pytest.approx(-0.0395833333333, rel=1e-12)
    assert psi[0] == pytest.approx(-13.144, abs=1e-3)
    assert kirkwood_energy(CENTRAL, 6.0, 4.0, 80.0) == pytest.approx(born_energy(1.0, 6.0, 4.0, 80.0), rel=1e-14)
    assert born_energy(1.0, 6.0, 4.0, 80.0) == pytest.approx(-6.572092, abs=1e-6)


def test_central_charge_gives_constant_potential():
    coeffs = series_coefficients(CENTRAL, 6.0, 4.0, 80.0, 10)
    pts = [[0, 0, 1.0], [2.0, 1.0, -3.0], [0, 0, 0]]
    psi = series_reaction_potential(coeffs, pts)
    assert np.allclose(psi, psi[0], rtol=1e-14)


def test_equal_permittivity_gives_zero():
    q = sample_grid_charges(6.0, 1.0, 10, 3)
    assert kirkwood_energy(q, 6.0, 4.0, 4.0) == 0.0


def test_interior_only():
    with pytest.raises(ValueError):
        series_coefficients(ChargeSet([[0, 0, 6.0]], [1.0]), 6.0, 4.0, 80.0)
    coeffs = series_coefficients(CENTRAL, 6.0, 4.0, 80.0, 4)
    with pytest.raises(ValueError):
        series_reaction_potential(coeffs, [[7.0, 0, 0]])


def test_rotation_invariance():
    q = sample_grid_charges(6.0, 1.0, 10, 42)
    E0 = kirkwood_energy(q, 6.0, 4.0, 80.0)
    for seed in range(3):
        R = Rotation.random(random_state=seed).as_matrix()
        assert kirkwood_energy(q.transformed(R), 6.0, 4.0, 80.0) == pytest.approx(E0, rel=1e-10)


def test_image_charge_limit_for_conductor():
    # eps_out -> infinity: Kelvin image q' = -q b/r at b^2/r gives psi at the
    # charge of -q b / (b^2 - r^2) / eps_in (Gaussian units)
    b, r = 6.0, 3.0
    q = ChargeSet([[0, 0, r]], [1.0])
    coeffs = series_coefficients(q, b, 1.0, 1e12, 60)
    psi = series_reaction_potential(coeffs, [[0, 0, r]])[0]
    assert psi == pytest.approx(-b / (b * b - r * r), rel=1e-9)


def test_truncation_decays_geometrically():
    # charges sit at |r| <= 5 inside R = 6; the tail beyond order n shrinks like (25/36)^n
    q = sample_grid_charges(6.0, 1.0, 10, 42)
    ref = kirkwood_energy(q, 6.0, 4.0, 80.0, 60)
    errs = [abs(kirkwood_energy(q, 6.0, 4.0, 80.0, n) - ref) for n in (10, 20, 30, 40)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[1] / errs[0] < 3 * (25 / 36) ** 10
    assert errs[1] / abs(ref) < 1e-3


def test_order_25_against_40():
    # the series tail is set by the charge pair with the largest r_j r_k / b^2;
    # here that is 25/36, so 1e-8 agreement needs order ~50, not 25
    q = sample_grid_charges(6.0, 1.0, 10, 42)
    e25 = kirkwood_energy(q, 6.0, 4.0, 80.0, 25)
    e40 = kirkwood_energy(q, 6.0, 4.0, 80.0, 40)
    e64 = kirkwood_energy(q, 6.0, 4.0, 80.0, 64)
    assert abs(e25 - e40) / abs(e40) < 1e-4
    assert abs(e40 - e64) / abs(e64) < 1e-6


def test_coefficient_csv():
    text = series_coefficients(CENTRAL, 6.0, 4.0, 80.0, 2).to_csv()
    lines = text.splitlines()
    assert lines[0] == "n,m,E_re,E_im,B_re,B_im"
    assert len(lines) == 1 + 9
