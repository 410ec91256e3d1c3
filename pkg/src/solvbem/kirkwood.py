"""Reaction field of point charges inside a dielectric sphere (Kirkwood series).

The series is written in the Gaussian convention, potential = q / (eps r),
so a potential from here becomes kcal/mol/e after multiplying by
:data:`~solvbem.units.COULOMB_KCAL` alone (the boundary-element code carries
an extra ``4 pi``).

Associated Legendre functions are unnormalized and carry no Condon-Shortley
phase; ``P_1^1(0) = 1``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .surface import ChargeSet
from .units import COULOMB_KCAL

__all__ = [
    "SeriesCoefficients",
    "associated_legendre",
    "legendre_table",
    "factorial_ratio_table",
    "charge_moments",
    "reaction_coefficients",
    "series_coefficients",
    "series_reaction_potential",
    "kirkwood_potentials",
    "kirkwood_energy",
    "born_energy",
]

MAX_DEGREE = 64
REALNESS_TOL = 1e-10


def associated_legendre(n: int, m: int, x: float) -> float:
    """``P_n^m(x)`` without the Condon-Shortley phase, for ``0 <= m <= n <= 64``."""
    if not 0 <= m <= n <= MAX_DEGREE:
        raise ValueError(f"need 0 <= m <= n <= {MAX_DEGREE}, got n={n}, m={m}")
    if abs(x) > 1.0:
        raise ValueError(f"x={x} outside [-1, 1]")
    return float(legendre_table(n, np.array([x]))[n, m, 0])


def legendre_table(n_max: int, x) -> np.ndarray:
    """All ``P_n^m(x)`` for ``0 <= m <= n <= n_max``; shape ``(n_max+1, n_max+1, len(x))``.

    Upward recurrence in ``n`` at fixed ``m`` starting from
    ``P_m^m = (2m-1)!! (1 - x^2)^(m/2)``. Entries with ``m > n`` are zero.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) > 1.0):
        raise ValueError("argument outside [-1, 1]")
    if n_max > MAX_DEGREE:
        raise ValueError(f"degree {n_max} exceeds {MAX_DEGREE}")
    P = np.zeros((n_max + 1, n_max + 1, x.size))
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pmm = np.ones_like(x)
    for m in range(n_max + 1):
        if m > 0:
            pmm = pmm * (2 * m - 1) * s
        P[m, m] = pmm
        if m + 1 <= n_max:
            P[m + 1, m] = (2 * m + 1) * x * pmm
        for n in range(m + 2, n_max + 1):
            P[n, m] = ((2 * n - 1) * x * P[n - 1, m] - (n + m - 1) * P[n - 2, m]) / (n - m)
    return P


def factorial_ratio_table(n_max: int) -> np.ndarray:
    """``(n - m)! / (n + m)!`` for ``0 <= m <= n``, built multiplicatively."""
    R = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        r = 1.0
        R[n, 0] = r
        for m in range(1, n + 1):
            # (n-m)!/(n+m)! = (n-m+1)!/(n+m-1)! / ((n-m+1)(n+m))
            r /= (n - m + 1) * (n + m)
            R[n, m] = r
    return R


def _spherical(points):
    p = np.asarray(points, dtype=float).reshape(-1, 3)
    r = np.linalg.norm(p, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_t = np.where(r > 0.0, p[:, 2] / np.where(r > 0.0, r, 1.0), 1.0)
    cos_t = np.clip(cos_t, -1.0, 1.0)
    phi = np.arctan2(p[:, 1], p[:, 0])
    return r, cos_t, phi


def charge_moments(charges: ChargeSet, n_max: int) -> np.ndarray:
    """Multipole moments ``E[n, m + n_max]`` of a charge set about the origin.

    ``E_nm = sum_k q_k r_k^n (n-|m|)!/(n+|m|)! P_n^|m|(cos theta_k) exp(-i m phi_k)``;
    entries with ``|m| > n`` are zero.
    """
    r, cos_t, phi = _spherical(charges.positions)
    P = legendre_table(n_max, cos_t)
    ratio = factorial_ratio_table(n_max)
    E = np.zeros((n_max + 1, 2 * n_max + 1), dtype=complex)
    q = charges.charges
    for n in range(n_max + 1):
        rn = q * r**n  # 0**0 == 1 keeps a charge at the origin in the monopole
        for m in range(-n, n + 1):
            am = abs(m)
            E[n, m + n_max] = ratio[n, am] * np.sum(rn * P[n, am] * np.exp(-1j * m * phi))
    return E


def reaction_coefficients(E: np.ndarray, b: float, eps_1: float, eps_2: float) -> np.ndarray:
    """``B_nm = (eps_1 - eps_2)(n+1) / (eps_1 b^(2n+1) (eps_1 n + eps_2 (n+1))) E_nm``.

    ``eps_1`` is the sphere interior, ``eps_2`` the exterior.
    """
    if not b > 0:
        raise ValueError("radius must be positive")
    b = float(b)
    n = np.arange(E.shape[0], dtype=float)[:, None]
    factor = (eps_1 - eps_2) * (n + 1) / (eps_1 * b ** (2 * n + 1) * (eps_1 * n + eps_2 * (n + 1)))
    return factor * E


@dataclass(frozen=True)
class SeriesCoefficients:
    """Moment and reaction tables of one charge set in one sphere."""

    n_max: int
    E: np.ndarray
    B: np.ndarray
    radius: float
    eps_1: float
    eps_2: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,m,E_re,E_im,B_re,B_im\n")
        for n in range(self.n_max + 1):
            for m in range(-n, n + 1):
                e = self.E[n, m + self.n_max]
                b = self.B[n, m + self.n_max]
                buf.write(f"{n},{m},{e.real!r},{e.imag!r},{b.real!r},{b.imag!r}\n")
        return buf.getvalue()


def series_coefficients(charges: ChargeSet, radius, eps_in, eps_out, n_max=25) -> SeriesCoefficients:
    r = np.linalg.norm(charges.positions, axis=1)
    if np.any(r >= radius):
        raise ValueError("all charges must lie strictly inside the sphere")
    E = charge_moments(charges, n_max)
    return SeriesCoefficients(n_max, E, reaction_coefficients(E, radius, eps_in, eps_out), radius, eps_in, eps_out)


def series_reaction_potential(coeffs: SeriesCoefficients, points) -> np.ndarray:
    """Reaction potential ``sum B_nm r^n P_n^|m|(cos theta) exp(i m phi)`` at interior points.

    Gaussian-convention units (``e / Angstrom`` per unit permittivity).
    """
    r, cos_t, phi = _spherical(points)
    if np.any(r >= coeffs.radius):
        raise ValueError("evaluation points must lie strictly inside the sphere")
    n_max = coeffs.n_max
    P = legendre_table(n_max, cos_t)
    psi = np.zeros(len(r), dtype=complex)
    for n in range(n_max + 1):
        rn = r**n
        for m in range(-n, n + 1):
            psi += coeffs.B[n, m + n_max] * rn * P[n, abs(m)] * np.exp(1j * m * phi)
    scale = np.maximum(np.abs(psi.real), np.finfo(float).tiny)
    if np.any(np.abs(psi.imag) > REALNESS_TOL * scale + 1e-300):
        raise ArithmeticError("reaction potential has a non-negligible imaginary part")
    return psi.real


def kirkwood_potentials(charges: ChargeSet, radius, eps_in, eps_out, n_max=25, points=None):
    """Reaction potential in kcal/mol/e at `points` (default: the charge sites)."""
    coeffs = series_coefficients(charges, radius, eps_in, eps_out, n_max)
    where = charges.positions if points is None else points
    return COULOMB_KCAL * series_reaction_potential(coeffs, where)


def kirkwood_energy(charges: ChargeSet, radius, eps_in, eps_out, n_max=25) -> float:
    """Solvation energy ``1/2 sum_k q_k psi(r_k)`` in kcal/mol."""
    if len(charges) == 0:
        return 0.0
    psi = kirkwood_potentials(charges, radius, eps_in, eps_out, n_max)
    return float(0.5 * np.dot(charges.charges, psi))


def born_energy(charge, radius, eps_in, eps_out) -> float:
    """Born ion: ``1/2 K q^2 (1/eps_out - 1/eps_in) / R`` in kcal/mol."""
    return 0.5 * COULOMB_KCAL * charge**2 * (1.0 / eps_out - 1.0 / eps_in) / radius
