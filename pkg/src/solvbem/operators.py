"""Discrete operators of the induced-surface-charge equation.

Both discretizations solve ``A sigma = B q`` for the apparent surface charge
density and map it back to potentials with ``C``:

* panel (qualocation): one constant density per flat triangle; the outer
  integral over the test panel is done analytically (solid angle), the inner
  one by the centroid rule;
* point (Nystrom): one density per mesh vertex with one-third-area weights;
  the self term is dropped.

Conventions: ``eps_hat = 2 (eps_solute - eps_solvent) / (eps_solute + eps_solvent)``,
the source field in ``B`` carries ``1/eps_solute`` and ``C`` carries no
permittivity, so ``C sigma`` is the reaction potential in units where the
Coulomb kernel is ``1/(4 pi r)``.
"""
from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass, field
from typing import IO, Union

import numpy as np
from scipy.spatial import cKDTree

from .kernels import (
    FlopCount,
    FlopLedger,
    NORMAL_FIELD_COST,
    SingularityError,
    coulomb_kernel,
    panel_flux_matrix,
    point_triangle_distance,
    single_layer_matrix,
)
from .surface import ChargeSet, MeshError, PanelSet, PointCloud
from .units import DEFAULT_EPS_SOLUTE, DEFAULT_EPS_SOLVENT

__all__ = [
    "DielectricConfig",
    "DenseMatrix",
    "GeometryError",
    "assemble_A",
    "assemble_A_panel",
    "assemble_A_point",
    "assemble_B",
    "assemble_C",
    "eval_reaction_potential",
    "method_label",
]

ON_SURFACE_TOL = 1e-10  # Angstrom
_ROWS = 1 << 20  # kernel pairs per vectorized block


class GeometryError(MeshError):
    """Coincident unknowns or a charge/evaluation point on the surface."""


@dataclass(frozen=True)
class DielectricConfig:
    eps_solvent: float = DEFAULT_EPS_SOLVENT
    eps_solute: float = DEFAULT_EPS_SOLUTE

    def __post_init__(self):
        if not (self.eps_solvent > 0 and self.eps_solute > 0):
            raise ValueError("permittivities must be positive")

    @property
    def eps_hat(self) -> float:
        return 2.0 * (self.eps_solute - self.eps_solvent) / (self.eps_solute + self.eps_solvent)


@dataclass
class DenseMatrix:
    """Row-major real matrix with the ledger of the work that produced it."""

    data: np.ndarray
    flops: FlopLedger = field(default_factory=FlopLedger)

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=float)
        if self.data.ndim != 2:
            raise ValueError("DenseMatrix needs a 2-D array")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("matrix has non-finite entries")

    @property
    def shape(self):
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def to_bytes(self) -> bytes:
        """Two little-endian uint64 dimensions followed by float64 entries, row-major."""
        r, c = self.data.shape
        return struct.pack("<QQ", r, c) + self.data.astype("<f8").tobytes(order="C")

    @classmethod
    def from_bytes(cls, raw: bytes) -> "DenseMatrix":
        r, c = struct.unpack_from("<QQ", raw, 0)
        body = np.frombuffer(raw, dtype="<f8", offset=16)
        if body.size != r * c:
            raise ValueError(f"expected {r * c} entries, found {body.size}")
        return cls(body.reshape(r, c).astype(float))

    def save(self, path: Union[str, os.PathLike]) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path: Union[str, os.PathLike]) -> "DenseMatrix":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def to_csv(self, out: Union[str, os.PathLike, IO[str], None] = None):
        buf = io.StringIO()
        for row in self.data:
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        text = buf.getvalue()
        if out is None:
            return text
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", encoding="ascii", newline="\n") as fh:
                fh.write(text)
        return None


def method_label(disc) -> str:
    if isinstance(disc, PanelSet):
        return "PAN"
    if isinstance(disc, PointCloud):
        return "SRF"
    raise TypeError(f"unknown discretization {type(disc).__name__}")


def _check_distinct(points, what):
    tree = cKDTree(points)
    pairs = tree.query_pairs(r=ON_SURFACE_TOL, output_type="ndarray")
    if len(pairs):
        i, j = pairs[0]
        raise GeometryError(f"{what} {i} and {j} coincide")


# ---------------------------------------------------------------------------
# A
# ---------------------------------------------------------------------------


def assemble_A_panel(panels: PanelSet, cfg: DielectricConfig) -> DenseMatrix:
    """Qualocation matrix ``A_ij = a_i delta_ij + eps_hat a_j flux(panel_i, c_j)``.

    Row ``i`` is the equation tested against the indicator of panel ``i``;
    the self-panel flux is the flat principal value, zero.
    """
    n = len(panels)
    if n < 4:
        raise GeometryError("need at least 4 panels")
    _check_distinct(panels.centroids, "centroids of panels")
    ledger = FlopLedger()
    F = panel_flux_matrix(panels.corners, panels.centroids, ledger, skip_diagonal=True)
    A = (cfg.eps_hat * F) * panels.areas[None, :]
    A[np.diag_indices(n)] = panels.areas
    ledger.charge(FlopCount(mul=2), n * (n - 1))
    return DenseMatrix(A, ledger)


def _normal_field_block(sources, targets, normals):
    d = targets[:, None, :] - sources[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", d, d)
    dn = np.einsum("ijk,ik->ij", d, normals)
    with np.errstate(divide="ignore", invalid="ignore"):
        return -dn / (4.0 * np.pi * r2 * np.sqrt(r2))


def assemble_A_point(cloud: PointCloud, cfg: DielectricConfig) -> DenseMatrix:
    """Nystrom matrix ``A_ij = delta_ij + eps_hat w_j K(r_j -> r_i, n_i)``, ``K_ii = 0``."""
    n = len(cloud)
    if n < 4:
        raise GeometryError("need at least 4 points")
    _check_distinct(cloud.points, "points")
    ledger = FlopLedger()
    A = np.empty((n, n))
    step = max(1, _ROWS // n)
    for lo in range(0, n, step):
        hi = min(lo + step, n)
        A[lo:hi] = _normal_field_block(cloud.points, cloud.points[lo:hi], cloud.normals[lo:hi])
    np.fill_diagonal(A, 0.0)
    A *= cfg.eps_hat * cloud.weights[None, :]
    A[np.diag_indices(n)] = 1.0
    ledger.charge(NORMAL_FIELD_COST + FlopCount(mul=2), n * (n - 1))
    return DenseMatrix(A, ledger)


def assemble_A(disc, cfg: DielectricConfig) -> DenseMatrix:
    if isinstance(disc, PanelSet):
        return assemble_A_panel(disc, cfg)
    if isinstance(disc, PointCloud):
        return assemble_A_point(disc, cfg)
    raise TypeError(f"unknown discretization {type(disc).__name__}")


# ---------------------------------------------------------------------------
# B and C
# ---------------------------------------------------------------------------


def assemble_B(disc, charges: ChargeSet, cfg: DielectricConfig) -> DenseMatrix:
    """Normal field of unit charges: ``B_ik = -(eps_hat / eps_solute) * flux``.

    Panel rows integrate the flux over panel ``i``; point rows evaluate it at
    vertex ``i`` along its normal.
    """
    ledger = FlopLedger()
    pos = charges.positions
    scale = -cfg.eps_hat / cfg.eps_solute
    if isinstance(disc, PanelSet):
        if len(pos):
            dist = point_triangle_distance(disc.corners, pos)
            if dist.min() < ON_SURFACE_TOL:
                k = int(np.argmin(dist.min(axis=0)))
                raise SingularityError(f"charge {k} lies on the surface")
        F = panel_flux_matrix(disc.corners, pos, ledger)
    elif isinstance(disc, PointCloud):
        F = np.empty((len(disc), len(pos)))
        if len(pos):
            if cKDTree(disc.points).query(pos)[0].min() < ON_SURFACE_TOL:
                raise SingularityError("a charge coincides with a collocation point")
            F = _normal_field_block(pos, disc.points, disc.normals)
        ledger.charge(NORMAL_FIELD_COST, F.size)
    else:
        raise TypeError(f"unknown discretization {type(disc).__name__}")
    ledger.charge(FlopCount(mul=1), F.size)
    return DenseMatrix(scale * F, ledger)


def assemble_C(disc, eval_points) -> DenseMatrix:
    """Potential at `eval_points` of unit density on each unknown.

    Panel entries are the analytic single-layer integral over the panel (valid
    arbitrarily close to the surface); point entries are ``w_j / (4 pi |r_j - p|)``.
    """
    pts = np.asarray(eval_points, dtype=float).reshape(-1, 3)
    ledger = FlopLedger()
    if isinstance(disc, PanelSet):
        C = single_layer_matrix(disc.corners, pts, ledger)
    elif isinstance(disc, PointCloud):
        if len(pts) and cKDTree(disc.points).query(pts)[0].min() < ON_SURFACE_TOL:
            raise SingularityError("evaluation point coincides with a collocation point")
        C = coulomb_kernel(disc.points[None, :, :], pts[:, None, :], ledger) * disc.weights[None, :]
        ledger.charge(FlopCount(mul=1), C.size)
    else:
        raise TypeError(f"unknown discretization {type(disc).__name__}")
    return DenseMatrix(C.reshape(len(pts), len(disc)), ledger)


def eval_reaction_potential(disc, sigma, eval_points) -> np.ndarray:
    """``C sigma`` at arbitrary points (internal units, no ``4 pi K`` factor)."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (len(disc),):
        raise ValueError(f"sigma has shape {sigma.shape}, expected ({len(disc)},)")
    C = assemble_C(disc, eval_points)
    return C.data @ sigma
