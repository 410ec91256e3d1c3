"""Linear solves, the reaction-potential matrix and solvation energies.

The solvation energy of charges ``q`` is ``E = 1/2 * 4 pi K * q^T C A^-1 B q``,
``K`` being the Coulomb constant in kcal*Angstrom/(mol*e^2). The ``4 pi``
undoes the ``1/(4 pi)`` in the kernels, the ``1/2`` is the linear-response
factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .kernels import FlopLedger
from .operators import (
    DenseMatrix,
    DielectricConfig,
    assemble_A,
    assemble_B,
    assemble_C,
    method_label,
)
from .surface import ChargeSet
from .units import COULOMB_KCAL

__all__ = [
    "SingularMatrixError",
    "ConvergenceError",
    "SolveReport",
    "EnergyResult",
    "ENERGY_SCALE",
    "lu_solve",
    "gmres_solve",
    "solve_density",
    "reaction_matrix",
    "solvation_energy",
    "compute_energy",
    "ENERGY_CSV_HEADER",
]

ENERGY_SCALE = 4.0 * np.pi * COULOMB_KCAL
PIVOT_TOL = 1e-14
DEFAULT_TOL = 1e-10
ENERGY_CSV_HEADER = "method,N,E_kcal,flops_total,flops_A,iters"


class SingularMatrixError(np.linalg.LinAlgError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, x, report):
        super().__init__(message)
        self.x = x
        self.report = report


@dataclass
class SolveReport:
    method: str
    iterations: int
    residual_norm: float
    flops: int


@dataclass
class EnergyResult:
    """Energy of one charge set on one discretization.

    ``flops_total`` covers assembly of A, B, C plus the solve and the
    reduction to ``L``; ``flops_A`` is the assembly ledger of ``A`` alone.
    """

    method: str
    n: int
    energy: float
    potentials: np.ndarray
    flops_total: int
    flops_A: int
    iterations: int = 0
    sigma: Optional[np.ndarray] = field(default=None, repr=False)

    def csv_row(self) -> str:
        return f"{self.method},{self.n},{self.energy!r},{self.flops_total},{self.flops_A},{self.iterations}"


def _array(M):
    return M.data if isinstance(M, DenseMatrix) else np.asarray(M, dtype=float)


def lu_solve(A, rhs, ledger: Optional[FlopLedger] = None) -> np.ndarray:
    """Solve ``A X = rhs`` by partially pivoted LU.

    Charges ``2/3 N^3 + 2 N^2 ncols`` flops, split evenly between additions
    and multiplications.
    """
    A = _array(A)
    rhs = _array(rhs)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"A must be square, got {A.shape}")
    if rhs.shape[0] != n:
        raise ValueError(f"rhs has {rhs.shape[0]} rows, A has {n}")
    lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    amax = np.abs(A).max() if A.size else 0.0
    if n and np.abs(np.diag(lu)).min() < PIVOT_TOL * amax:
        raise SingularMatrixError("pivot below 1e-14 * max|A|")
    X = scipy.linalg.lu_solve((lu, piv), rhs)
    if ledger is not None:
        ncols = 1 if rhs.ndim == 1 else rhs.shape[1]
        work = 2 * n**3 // 3 + 2 * n * n * ncols
        ledger.charge_ops(add=work // 2, mul=work - work // 2)
    return X


def gmres_solve(A, b, rel_tol=DEFAULT_TOL, max_iter=None, ledger: Optional[FlopLedger] = None):
    """Unrestarted GMRES from a zero initial guess.

    Arnoldi with modified Gram-Schmidt; the least-squares problem is updated
    with Givens rotations. Iteration stops when the true relative residual
    ``|A x - b| / |b|`` is at most `rel_tol`.

    Returns
    -------
    x : ndarray
    report : SolveReport

    Raises
    ------
    ConvergenceError
        After `max_iter` iterations; carries the best iterate.
    """
    A = _array(A)
    b = np.asarray(b, dtype=float).ravel()
    n = A.shape[0]
    if A.shape != (n, n) or b.shape != (n,):
        raise ValueError("A must be square and conform with b")
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")
    max_iter = n if max_iter is None else int(max_iter)
    local = FlopLedger()

    beta = float(np.linalg.norm(b))
    local.charge_ops(add=n - 1, mul=n, sqrt=1)
    if beta == 0.0:
        if ledger is not None:
            ledger.merge(local)
        return np.zeros(n), SolveReport("gmres", 0, 0.0, local.total)

    V = np.zeros((max_iter + 1, n))
    H = np.zeros((max_iter + 1, max_iter))
    cs = np.zeros(max_iter)
    sn = np.zeros(max_iter)
    g = np.zeros(max_iter + 1)
    g[0] = beta
    V[0] = b / beta
    local.charge_ops(div=n)

    x = np.zeros(n)
    rel = 1.0
    for k in range(max_iter):
        w = A @ V[k]
        local.charge_ops(add=n * (n - 1), mul=n * n)
        for j in range(k + 1):
            H[j, k] = V[j] @ w
            w -= H[j, k] * V[j]
        local.charge_ops(add=(k + 1) * (2 * n - 1), mul=(k + 1) * 2 * n)
        H[k + 1, k] = np.linalg.norm(w)
        local.charge_ops(add=n - 1, mul=n, sqrt=1)
        breakdown = H[k + 1, k] == 0.0
        if not breakdown:
            V[k + 1] = w / H[k + 1, k]
            local.charge_ops(div=n)
        for j in range(k):
            hj = cs[j] * H[j, k] + sn[j] * H[j + 1, k]
            H[j + 1, k] = -sn[j] * H[j, k] + cs[j] * H[j + 1, k]
            H[j, k] = hj
        local.charge_ops(add=2 * k, mul=4 * k)
        denom = np.hypot(H[k, k], H[k + 1, k])
        cs[k], sn[k] = H[k, k] / denom, H[k + 1, k] / denom
        H[k, k] = denom
        H[k + 1, k] = 0.0
        g[k + 1] = -sn[k] * g[k]
        g[k] = cs[k] * g[k]
        local.charge_ops(add=1, mul=4, div=2, sqrt=1)
        if abs(g[k + 1]) <= rel_tol * beta or breakdown:
            # the recurrence residual can run ahead of the true one; confirm
            x, rel = _gmres_update(A, b, V, H, g, k + 1, beta, local)
            if rel <= rel_tol or breakdown:
                break
    else:
        k = max_iter - 1
        x, rel = _gmres_update(A, b, V, H, g, max_iter, beta, local)

    report = SolveReport("gmres", k + 1, rel, local.total)
    if ledger is not None:
        ledger.merge(local)
    if rel > rel_tol:
        raise ConvergenceError(
            f"GMRES stopped after {report.iterations} iterations at relative residual {rel:.3e}", x, report
        )
    return x, report


def _gmres_update(A, b, V, H, g, k, beta, ledger):
    n = len(b)
    y = scipy.linalg.solve_triangular(H[:k, :k], g[:k])
    x = V[:k].T @ y
    r = b - A @ x
    ledger.charge_ops(add=k * (k - 1) // 2 + n * (k - 1) + n * (n - 1) + n, mul=k * (k + 1) // 2 + n * k + n * n, div=k)
    rel = float(np.linalg.norm(r)) / beta
    ledger.charge_ops(add=n - 1, mul=n, sqrt=1, div=1)
    return x, rel


def solve_density(A, rhs, solve="lu", tol=DEFAULT_TOL, ledger: Optional[FlopLedger] = None):
    """``A^-1 rhs`` column by column; returns ``(X, max GMRES iterations)``."""
    A = _array(A)
    rhs = _array(rhs)
    if solve == "lu":
        return lu_solve(A, rhs, ledger), 0
    if solve != "gmres":
        raise ValueError(f"unknown solve mode {solve!r}")
    cols = rhs.reshape(len(rhs), -1)
    X = np.empty_like(cols)
    iters = 0
    for c in range(cols.shape[1]):
        X[:, c], rep = gmres_solve(A, cols[:, c], tol, ledger=ledger)
        iters = max(iters, rep.iterations)
    return X.reshape(rhs.shape), iters


def reaction_matrix(C, A, B, solve="lu", tol=DEFAULT_TOL, ledger: Optional[FlopLedger] = None):
    """``L = C (A^-1 B)`` with one factorization (or one GMRES per column of ``B``).

    Returns ``(L, X, iterations)`` where ``X = A^-1 B``.
    """
    C = _array(C)
    B = _array(B)
    if C.shape[1] != B.shape[0]:
        raise ValueError(f"C {C.shape} and B {B.shape} do not conform")
    X, iters = solve_density(A, B, solve, tol, ledger)
    L = C @ X
    if ledger is not None:
        q, n = C.shape
        m = X.shape[1]
        ledger.charge_ops(add=q * m * max(n - 1, 0), mul=q * m * n)
    return L, X, iters


def solvation_energy(L, q) -> float:
    """``1/2 * 4 pi K * q^T L q`` in kcal/mol."""
    L = _array(L)
    q = np.asarray(q, dtype=float)
    if L.shape != (len(q), len(q)):
        raise ValueError(f"L has shape {L.shape} for {len(q)} charges")
    return 0.5 * ENERGY_SCALE * float(q @ L @ q)


def compute_energy(disc, charges: ChargeSet, cfg: DielectricConfig, solve="lu", tol=DEFAULT_TOL) -> EnergyResult:
    """Assemble, solve and reduce to the solvation energy of `charges`."""
    A = assemble_A(disc, cfg)
    B = assemble_B(disc, charges, cfg)
    C = assemble_C(disc, charges.positions)
    ledger = A.flops + B.flops + C.flops
    L, X, iters = reaction_matrix(C, A, B, solve, tol, ledger)
    q = charges.charges
    psi = ENERGY_SCALE * (L @ q)
    ledger.charge_ops(add=len(q) * max(len(q) - 1, 0), mul=len(q) * len(q) + len(q))
    return EnergyResult(
        method=method_label(disc),
        n=len(disc),
        energy=0.5 * float(q @ psi),
        potentials=psi,
        flops_total=ledger.total,
        flops_A=A.flops.total,
        iterations=iters,
        sigma=X @ q,
    )
