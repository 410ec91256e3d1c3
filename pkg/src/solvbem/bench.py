"""Mesh-convergence, work-precision and line-potential studies.

Every study emits CSV. Convergence rows carry
``method,N,energy_kcal,error_kcal,flops_total,flops_A,iters``; the error of a
row is measured against exactly one reference, which is named in the CSV
header: the Kirkwood series for spheres, or Richardson extrapolation of the
two finest panel energies for arbitrary meshes.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .kirkwood import kirkwood_energy, kirkwood_potentials
from .operators import DielectricConfig, assemble_A, assemble_B, assemble_C
from .solver import ENERGY_SCALE, compute_energy, solve_density
from .surface import (
    ChargeSet,
    TriangleMesh,
    generate_icosphere,
    load_msms_mesh,
    load_pqr,
    panel_geometry,
    sample_grid_charges,
    vertex_quadrature,
)
from .units import DEFAULT_EPS_SOLUTE, DEFAULT_EPS_SOLVENT

__all__ = [
    "StudyConfig",
    "StudyRow",
    "StudyResult",
    "Crossover",
    "ConfigError",
    "METHODS",
    "CONVERGENCE_HEADER",
    "LINE_HEADER",
    "richardson_reference",
    "observed_order",
    "order_per_unknown",
    "detect_crossover",
    "pareto_frontier",
    "log_cost_to_reach",
    "run_convergence_study",
    "run_work_precision_study",
    "run_line_potential_study",
]

METHODS = ("PAN", "SRF")
CONVERGENCE_HEADER = "method,N,energy_kcal,error_kcal,flops_total,flops_A,iters"
LINE_HEADER = "z,psi_series,psi_panel,psi_point"
SURFACE_SKIP = 1e-6  # Angstrom


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# extrapolation and rates
# ---------------------------------------------------------------------------


def richardson_reference(E_coarse, E_fine, N_coarse, N_fine, order=1.0) -> float:
    """Extrapolate two surface-mesh energies assuming ``E(h) = E* + c h^p``.

    ``h`` scales like ``N^(-1/2)``, so the refinement ratio is
    ``rho = sqrt(N_fine / N_coarse)`` and ``E* = E_fine + (E_fine - E_coarse) / (rho^p - 1)``.
    """
    if not order > 0:
        raise ValueError("order must be positive")
    rho = math.sqrt(N_fine / N_coarse)
    if rho <= 1.0:
        raise ValueError(f"N_fine ({N_fine}) must exceed N_coarse ({N_coarse})")
    return E_fine + (E_fine - E_coarse) / (rho**order - 1.0)


def _slope(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def _check_errors(errors, Ns):
    e = np.asarray(errors, dtype=float)
    n = np.asarray(Ns, dtype=float)
    if e.shape != n.shape or e.size < 2:
        raise ValueError("need at least two (error, N) pairs")
    if np.any(e <= 0.0):
        raise ValueError("errors must be positive (reference coincides with a sample)")
    if len(np.unique(n)) < 2:
        raise ValueError("need at least two distinct resolutions")
    return e, n


def observed_order(errors: Sequence[float], Ns: Sequence[int]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)`` with ``h = N^(-1/2)``."""
    e, n = _check_errors(errors, Ns)
    return _slope(-0.5 * np.log(n), np.log(e))


def order_per_unknown(errors: Sequence[float], Ns: Sequence[int]) -> float:
    """Slope of ``log(error)`` against ``log(1/N)``; half of :func:`observed_order`."""
    e, n = _check_errors(errors, Ns)
    return _slope(-np.log(n), np.log(e))


# ---------------------------------------------------------------------------
# configuration and rows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StudyConfig:
    """What to run.

    Geometry is either icosphere ``levels`` of a sphere of ``radius`` or a
    list of ``(vert, face)`` mesh files; charges come from ``charges``, a PQR
    file, or a grid sample ``(radius, h, Q, seed)``.
    """

    radius: float = 6.0
    h: float = 1.0
    Q: int = 10
    seed: int = 42
    levels: Tuple[int, ...] = (1, 2, 3, 4)
    meshes: Tuple[Tuple[str, str], ...] = ()
    pqr: Optional[str] = None
    charges: Optional[ChargeSet] = None
    eps_solute: float = DEFAULT_EPS_SOLUTE
    eps_solvent: float = DEFAULT_EPS_SOLVENT
    methods: Tuple[str, ...] = METHODS
    solve: str = "lu"
    tol: float = 1e-10
    reference: Optional[str] = None
    n_max: int = 25
    richardson_order: float = 1.0

    @property
    def dielectric(self) -> DielectricConfig:
        return DielectricConfig(eps_solvent=self.eps_solvent, eps_solute=self.eps_solute)

    @property
    def sphere(self) -> bool:
        return not self.meshes

    @property
    def reference_mode(self) -> str:
        if self.reference is not None:
            return self.reference
        return "kirkwood" if self.sphere else "richardson"

    def validate(self) -> "StudyConfig":
        n_geom = len(self.levels) if self.sphere else len(self.meshes)
        if n_geom < 2:
            raise ConfigError("a convergence study needs at least two resolutions")
        if self.reference_mode not in ("kirkwood", "richardson"):
            raise ConfigError(f"unknown reference {self.reference_mode!r}")
        if self.reference_mode == "kirkwood" and not self.sphere:
            raise ConfigError("kirkwood reference requires sphere geometry, not mesh files")
        if self.reference_mode == "richardson" and "PAN" not in self.methods:
            raise ConfigError("richardson reference needs the panel method")
        bad = set(self.methods) - set(METHODS)
        if bad or not self.methods:
            raise ConfigError(f"methods must be drawn from {METHODS}, got {self.methods}")
        if self.solve not in ("lu", "gmres"):
            raise ConfigError(f"unknown solve mode {self.solve!r}")
        return self

    def geometries(self) -> List[TriangleMesh]:
        if self.sphere:
            return [generate_icosphere(self.radius, lvl) for lvl in self.levels]
        return [load_msms_mesh(v, f) for v, f in self.meshes]

    def charge_set(self) -> ChargeSet:
        if self.charges is not None:
            return self.charges
        if self.pqr is not None:
            return load_pqr(self.pqr)
        return sample_grid_charges(self.radius, self.h, self.Q, self.seed)


@dataclass
class StudyRow:
    method: str
    n: int
    energy: float
    error: float = float("nan")
    flops_total: int = 0
    flops_A: int = 0
    iterations: int = 0
    failure: Optional[str] = None

    def csv(self) -> str:
        if self.failure is not None:
            return f"{self.method},{self.n},nan,nan,0,0,0"
        return (
            f"{self.method},{self.n},{self.energy!r},{self.error!r},"
            f"{self.flops_total},{self.flops_A},{self.iterations}"
        )


@dataclass
class Crossover:
    """Error level below which the panel method is the cheaper way to reach it."""

    metric: str
    error: float
    looser: Tuple[str, int, float]
    tighter: Tuple[str, int, float]

    def csv(self) -> str:
        lo = f"{self.tighter[0]}:N={self.tighter[1]}:err={self.tighter[2]!r}"
        hi = f"{self.looser[0]}:N={self.looser[1]}:err={self.looser[2]!r}"
        return f"crossover_{self.metric}_kcal={self.error!r} bracket={lo};{hi}"


@dataclass
class StudyResult:
    kind: str
    reference_mode: str
    reference: float
    rows: List[StudyRow]
    orders: dict = field(default_factory=dict)
    orders_per_unknown: dict = field(default_factory=dict)
    crossovers: dict = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def rows_for(self, method) -> List[StudyRow]:
        return [r for r in self.rows if r.method == method and r.failure is None]

    def to_csv(self, timestamp: Optional[str] = None) -> str:
        buf = io.StringIO()
        if timestamp is not None:
            buf.write(f"# generated {timestamp}\n")
        buf.write(f"# study={self.kind} reference={self.reference_mode} reference_kcal={self.reference!r}\n")
        for note in self.notes:
            buf.write(f"# {note}\n")
        buf.write(CONVERGENCE_HEADER + "\n")
        for row in self.rows:
            buf.write(row.csv() + "\n")
        for row in self.rows:
            if row.failure is not None:
                buf.write(f"# failed {row.method} N={row.n}: {row.failure}\n")
        for m in METHODS:
            if m in self.orders:
                buf.write(f"order={self.orders[m]!r} method={m}\n")
        for m in METHODS:
            if m in self.orders_per_unknown:
                buf.write(f"order_per_unknown={self.orders_per_unknown[m]!r} method={m}\n")
        for metric in ("total", "A"):
            if metric in self.crossovers:
                x = self.crossovers[metric]
                buf.write((x.csv() if x is not None else f"crossover_{metric}_kcal=none") + "\n")
        return buf.getvalue()


# ---------------------------------------------------------------------------
# studies
# ---------------------------------------------------------------------------


def _discretize(method, mesh):
    return panel_geometry(mesh) if method == "PAN" else vertex_quadrature(mesh)


def _run_rows(cfg: StudyConfig, charges: ChargeSet) -> List[StudyRow]:
    rows = []
    diel = cfg.dielectric
    for mesh in cfg.geometries():
        for method in cfg.methods:
            n = mesh.n_faces if method == "PAN" else mesh.n_vertices
            try:
                disc = _discretize(method, mesh)
                res = compute_energy(disc, charges, diel, cfg.solve, cfg.tol)
            except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
                rows.append(StudyRow(method, n, float("nan"), failure=f"{type(exc).__name__}: {exc}"))
                continue
            rows.append(
                StudyRow(method, res.n, res.energy, float("nan"), res.flops_total, res.flops_A, res.iterations)
            )
    rows.sort(key=lambda r: (METHODS.index(r.method), r.n))
    return rows


def _reference(cfg: StudyConfig, charges: ChargeSet, rows: List[StudyRow]) -> float:
    if cfg.reference_mode == "kirkwood":
        return kirkwood_energy(charges, cfg.radius, cfg.eps_solute, cfg.eps_solvent, cfg.n_max)
    pan = [r for r in rows if r.method == "PAN" and r.failure is None]
    if len(pan) < 2:
        raise ConfigError("richardson reference needs two successful panel energies")
    coarse, fine = pan[-2], pan[-1]
    return richardson_reference(coarse.energy, fine.energy, coarse.n, fine.n, cfg.richardson_order)


def run_convergence_study(cfg: StudyConfig, finest: int = 3) -> StudyResult:
    """Energies and errors per method and resolution, plus observed orders.

    Orders are fitted over the `finest` resolutions of each method.
    """
    cfg.validate()
    charges = cfg.charge_set()
    rows = _run_rows(cfg, charges)
    ref = _reference(cfg, charges, rows)
    for r in rows:
        if r.failure is None:
            r.error = abs(r.energy - ref)
    result = StudyResult("convergence", cfg.reference_mode, ref, rows)
    for m in cfg.methods:
        ok = [r for r in result.rows_for(m) if r.error > 0.0][-finest:]
        if len(ok) >= 2:
            errs, ns = [r.error for r in ok], [r.n for r in ok]
            result.orders[m] = observed_order(errs, ns)
            result.orders_per_unknown[m] = order_per_unknown(errs, ns)
    if cfg.reference_mode == "richardson":
        result.notes.append(
            "finest PAN row is one of the two energies defining the reference; its error is the extrapolation gap"
        )
    return result


# -- crossover ----------------------------------------------------------------


def pareto_frontier(samples):
    """Pareto-optimal samples (cheapest first, strictly improving error)."""
    best = math.inf
    keep = []
    for s in sorted(samples, key=lambda s: (s[1], s[0])):
        if s[0] < best:
            keep.append(s)
            best = s[0]
    return keep


def log_cost_to_reach(front, e):
    """log flops needed to reach error <= e: interpolated in log-log inside the sampled
    range, the cheapest sample's cost above it, unreachable (inf) below it."""
    errs = [s[0] for s in front]
    logf = [math.log(s[1]) for s in front]
    if e >= errs[0]:
        return logf[0]
    if e < errs[-1]:
        return math.inf
    for k in range(len(front) - 1):
        e_hi, e_lo = errs[k], errs[k + 1]
        if e_lo <= e <= e_hi:
            t = (math.log(e_hi) - math.log(e)) / (math.log(e_hi) - math.log(e_lo))
            return logf[k] + t * (logf[k + 1] - logf[k])
    return logf[-1]


def detect_crossover(panel, point, metric="total") -> Optional[Crossover]:
    """Largest error ``e*`` such that the panel method is cheaper for every error below it.

    `panel` and `point` are sequences of ``(error, flops, N)``. Each method's
    cost-to-accuracy curve is piecewise linear in log-log between its Pareto
    samples, flat above its loosest sample and unreachable below its tightest.
    Scanning from the tightest sampled error upwards, the first place where the
    point curve becomes at least as cheap is reported, with the two samples
    that bracket it. Returns None when the panel method never loses (or never
    wins) over the sampled range.
    """
    if not panel or not point:
        return None
    fp, fq = pareto_frontier(panel), pareto_frontier(point)
    samples = sorted(
        [("PAN", s) for s in fp] + [("SRF", s) for s in fq], key=lambda x: x[1][0]
    )
    grid = [s[0] for _, s in samples]

    def gap(e):
        return log_cost_to_reach(fp, e) - log_cost_to_reach(fq, e)

    if not gap(grid[0]) < 0.0:
        return None
    for k in range(len(grid) - 1):
        e0, e1 = grid[k], grid[k + 1]
        d0, d1 = gap(e0), gap(e1)
        if d0 < 0.0 <= d1:
            if math.isinf(d0) or e1 == e0:
                e_star = e1
            else:
                t = d0 / (d0 - d1)
                e_star = math.exp(math.log(e0) + t * (math.log(e1) - math.log(e0)))
            lo = samples[k]
            hi = samples[k + 1]
            return Crossover(metric, e_star, (hi[0], hi[1][2], hi[1][0]), (lo[0], lo[1][2], lo[1][0]))
    return None


def run_work_precision_study(cfg: StudyConfig, finest: int = 3) -> StudyResult:
    """Convergence rows plus panel/point crossovers for total and A-only flops."""
    result = run_convergence_study(cfg, finest)
    result.kind = "work-precision"
    pan = [(r.error, r.flops_total, r.n) for r in result.rows_for("PAN") if r.error > 0]
    srf = [(r.error, r.flops_total, r.n) for r in result.rows_for("SRF") if r.error > 0]
    result.crossovers["total"] = detect_crossover(pan, srf, "total")
    pan_a = [(r.error, r.flops_A, r.n) for r in result.rows_for("PAN") if r.error > 0]
    srf_a = [(r.error, r.flops_A, r.n) for r in result.rows_for("SRF") if r.error > 0]
    result.crossovers["A"] = detect_crossover(pan_a, srf_a, "A")
    return result


# -- line potential -------------------------------------------------------------


@dataclass
class LineStudy:
    z: np.ndarray
    psi_series: np.ndarray
    psi_panel: np.ndarray
    psi_point: np.ndarray
    skipped: List[float]
    charge_z: float
    radius: float

    def max_point_error(self, window=1.0) -> float:
        """Largest ``|psi_point - psi_series|`` away from the charge and the surface."""
        mask = (np.abs(self.z - self.charge_z) >= window) & (np.abs(self.z) <= self.radius - window)
        return float(np.max(np.abs(self.psi_point[mask] - self.psi_series[mask])))

    def max_panel_error(self, window=1.0) -> float:
        mask = (np.abs(self.z - self.charge_z) >= window) & (np.abs(self.z) <= self.radius - window)
        return float(np.max(np.abs(self.psi_panel[mask] - self.psi_series[mask])))

    def to_csv(self, timestamp: Optional[str] = None) -> str:
        buf = io.StringIO()
        if timestamp is not None:
            buf.write(f"# generated {timestamp}\n")
        buf.write(f"# study=line-potential charge_z={self.charge_z!r} radius={self.radius!r} units=kcal/mol/e\n")
        buf.write(LINE_HEADER + "\n")
        for z, s, p, q in zip(self.z, self.psi_series, self.psi_panel, self.psi_point):
            buf.write(f"{z!r},{s!r},{p!r},{q!r}\n")
        for z in self.skipped:
            buf.write(f"# skipped z={z!r}: within {SURFACE_SKIP} A of the surface\n")
        return buf.getvalue()


def run_line_potential_study(
    radius=6.0,
    charge_z=4.5,
    level=3,
    eps_solute=DEFAULT_EPS_SOLUTE,
    eps_solvent=DEFAULT_EPS_SOLVENT,
    z_samples=None,
    n_max=25,
    solve="lu",
    tol=1e-10,
) -> LineStudy:
    """Reaction potential of a unit charge at ``(0, 0, charge_z)`` along the z axis.

    Values are kcal/mol/e from the series and from both discretizations of an
    icosphere at `level`. Samples within 1e-6 A of the sphere are skipped.
    """
    if not abs(charge_z) < radius:
        raise ConfigError("charge must lie inside the sphere")
    if z_samples is None:
        z_samples = np.linspace(-radius, radius, 241)
    z = np.asarray(z_samples, dtype=float)
    keep = np.abs(z) < radius - SURFACE_SKIP
    skipped = [float(v) for v in z[~keep]]
    z = z[keep]
    pts = np.column_stack([np.zeros_like(z), np.zeros_like(z), z])
    charges = ChargeSet([[0.0, 0.0, charge_z]], [1.0])
    cfg = DielectricConfig(eps_solvent=eps_solvent, eps_solute=eps_solute)

    series = kirkwood_potentials(charges, radius, eps_solute, eps_solvent, n_max, points=pts)
    mesh = generate_icosphere(radius, level)
    values = []
    for disc in (panel_geometry(mesh), vertex_quadrature(mesh)):
        A = assemble_A(disc, cfg)
        B = assemble_B(disc, charges, cfg)
        sigma, _ = solve_density(A, B.data[:, 0], solve, tol)
        values.append(ENERGY_SCALE * (assemble_C(disc, pts).data @ sigma))
    return LineStudy(z, series, values[0], values[1], skipped, float(charge_z), float(radius))


def with_levels(cfg: StudyConfig, levels) -> StudyConfig:
    return replace(cfg, levels=tuple(levels))
