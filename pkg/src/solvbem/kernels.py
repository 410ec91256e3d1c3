"""Laplace kernels, flat-triangle layer integrals and flop accounting.

Every routine accepts an optional :class:`FlopLedger`. Costs are charged per
evaluation from fixed operation tallies of the formulas below (one flop for
each ``+ - * /``, square root and transcendental call), so a ledger is a pure
function of the inputs' shapes and never of wall-clock behaviour.

All kernels include the ``1/(4 pi)`` of the free-space Green's function.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Callable, Optional

import numpy as np

__all__ = [
    "FlopCount",
    "FlopLedger",
    "Panel",
    "SingularityError",
    "NearSingularError",
    "AccuracyError",
    "COULOMB_COST",
    "NORMAL_FIELD_COST",
    "SOLID_ANGLE_COST",
    "PANEL_FLUX_COST",
    "SINGLE_LAYER_COST",
    "coulomb_kernel",
    "normal_field_kernel",
    "solid_angles",
    "triangle_solid_angle",
    "panel_flux",
    "panel_flux_matrix",
    "single_layer_panel_potential",
    "single_layer_matrix",
    "adaptive_triangle_quadrature",
    "measured_panel_point_ratio",
    "point_triangle_distance",
]

FOUR_PI = 4.0 * np.pi
INV_FOUR_PI = 1.0 / FOUR_PI

# fixed relative thresholds, far below any mesh scale used in the studies
NEAR_SINGULAR_SOLID_ANGLE = 1e-12
NEAR_SINGULAR_SINGLE_LAYER = 1e-10

_CHUNK = 1 << 21  # pair evaluations per vectorized block


class SingularityError(ValueError):
    """Kernel evaluated at coincident source and target."""


class NearSingularError(ValueError):
    """Viewpoint lies (numerically) on the panel itself."""


class AccuracyError(RuntimeError):
    """Adaptive quadrature hit its depth limit; ``estimate`` holds the best value."""

    def __init__(self, message, estimate, evaluations=0):
        super().__init__(message)
        self.estimate = estimate
        self.evaluations = evaluations


# ---------------------------------------------------------------------------
# flop accounting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlopCount:
    """Operation tally of one evaluation of some formula."""

    add: int = 0
    mul: int = 0
    div: int = 0
    sqrt: int = 0
    trans: int = 0

    def __add__(self, other: "FlopCount") -> "FlopCount":
        return FlopCount(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def __mul__(self, k: int) -> "FlopCount":
        return FlopCount(*(getattr(self, f.name) * k for f in fields(self)))

    __rmul__ = __mul__

    @property
    def total(self) -> int:
        return self.add + self.mul + self.div + self.sqrt + self.trans


class FlopLedger:
    """Monotone operation counters.

    Ledgers are owned by one computation at a time; independent ledgers are
    combined with ``+`` or :meth:`merge`. ``fallbacks`` counts near-field
    quadrature fallbacks of the single-layer integral and is not a flop.
    """

    __slots__ = ("add", "mul", "div", "sqrt", "trans", "fallbacks")

    def __init__(self, add=0, mul=0, div=0, sqrt=0, trans=0, fallbacks=0):
        self.add = int(add)
        self.mul = int(mul)
        self.div = int(div)
        self.sqrt = int(sqrt)
        self.trans = int(trans)
        self.fallbacks = int(fallbacks)

    def charge(self, cost: FlopCount, times=1) -> None:
        times = int(times)
        if times < 0:
            raise ValueError("cannot charge a negative number of evaluations")
        self.add += cost.add * times
        self.mul += cost.mul * times
        self.div += cost.div * times
        self.sqrt += cost.sqrt * times
        self.trans += cost.trans * times

    def charge_ops(self, add=0, mul=0, div=0, sqrt=0, trans=0) -> None:
        """Charge closed-form operation counts (e.g. of a factorization)."""
        self.charge(FlopCount(int(add), int(mul), int(div), int(sqrt), int(trans)))

    def merge(self, other: "FlopLedger") -> "FlopLedger":
        for name in self.__slots__:
            setattr(self, name, getattr(self, name) + getattr(other, name))
        return self

    def copy(self) -> "FlopLedger":
        return FlopLedger(*(getattr(self, n) for n in self.__slots__))

    def __add__(self, other: "FlopLedger") -> "FlopLedger":
        return self.copy().merge(other)

    def __eq__(self, other):
        if not isinstance(other, FlopLedger):
            return NotImplemented
        return all(getattr(self, n) == getattr(other, n) for n in self.__slots__)

    @property
    def total(self) -> int:
        return self.add + self.mul + self.div + self.sqrt + self.trans

    def as_dict(self) -> dict:
        d = {n: getattr(self, n) for n in self.__slots__}
        d["total"] = self.total
        return d

    def __repr__(self):
        return (
            f"FlopLedger(total={self.total}, add={self.add}, mul={self.mul}, div={self.div}, "
            f"sqrt={self.sqrt}, trans={self.trans}, fallbacks={self.fallbacks})"
        )


def _charge(ledger, cost, times):
    if ledger is not None:
        ledger.charge(cost, times)


# d = t - s (3 add); |d|^2 (3 mul, 2 add); sqrt; 4*pi*r (1 mul); 1/(...) (1 div)
COULOMB_COST = FlopCount(add=5, mul=4, div=1, sqrt=1)
# d (3 add); |d|^2 (3 mul 2 add); sqrt; r^3 (1 mul); d.n (3 mul 2 add);
# 4*pi*r^3 (1 mul); -dn/den (1 div)
NORMAL_FIELD_COST = FlopCount(add=7, mul=8, div=1, sqrt=1)
# R1..R3 (9 add); three norms (9 mul 6 add 3 sqrt); R2xR3 (6 mul 3 add);
# triple product (3 mul 2 add); three dots (9 mul 6 add);
# denominator (5 mul 3 add); atan2; doubling (1 mul)
SOLID_ANGLE_COST = FlopCount(add=29, mul=33, sqrt=3, trans=1)
# -omega/(4 pi)
PANEL_FLUX_COST = SOLID_ANGLE_COST + FlopCount(mul=1)
# solid angle; plane distance (3 mul 2 add); per edge three dots
# (9 mul 6 add), log ratio (2 add 1 div 1 log) and p0*log (1 mul);
# edge sum (2 add); h*omega and sum (1 mul 1 add); 1/(4 pi) (1 mul)
SINGLE_LAYER_COST = SOLID_ANGLE_COST + FlopCount(add=2 + 24 + 2 + 1, mul=3 + 30 + 1 + 1, div=3, trans=3)


# ---------------------------------------------------------------------------
# panels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Panel:
    """One flat triangle: corners ``(3, 3)`` in counter-clockwise order about `normal`."""

    corners: np.ndarray
    normal: np.ndarray
    area: float
    centroid: np.ndarray
    diameter: float

    @classmethod
    def from_corners(cls, a, b, c) -> "Panel":
        corners = np.array([a, b, c], dtype=float)
        cross = np.cross(corners[1] - corners[0], corners[2] - corners[0])
        twice = float(np.linalg.norm(cross))
        if twice <= 0.0:
            raise ValueError("degenerate panel")
        diam = max(
            float(np.linalg.norm(corners[1] - corners[0])),
            float(np.linalg.norm(corners[2] - corners[1])),
            float(np.linalg.norm(corners[0] - corners[2])),
        )
        return cls(corners, cross / twice, 0.5 * twice, corners.mean(axis=0), diam)


def _edge_frames(corners, normals):
    """Unit edge tangents and outward in-plane edge normals, shape (..., 3, 3)."""
    nxt = np.roll(corners, -1, axis=-2)
    edge = nxt - corners
    t = edge / np.linalg.norm(edge, axis=-1, keepdims=True)
    m = np.cross(t, normals[..., None, :])
    return t, m


# ---------------------------------------------------------------------------
# point kernels
# ---------------------------------------------------------------------------


def coulomb_kernel(source, target, ledger: Optional[FlopLedger] = None):
    """``1 / (4 pi |target - source|)``, broadcasting over leading axes."""
    d = np.asarray(target, dtype=float) - np.asarray(source, dtype=float)
    r = np.sqrt(np.einsum("...i,...i->...", d, d))
    if np.any(r == 0.0):
        raise SingularityError("coincident source and target")
    _charge(ledger, COULOMB_COST, r.size)
    return 1.0 / (FOUR_PI * r)


def normal_field_kernel(source, target, normal_at_target, ledger: Optional[FlopLedger] = None):
    """Normal derivative at the target of the unit-charge Green's function.

    ``d/dn(target) 1/(4 pi |target - source|) = -((target - source) . n) / (4 pi |target - source|^3)``
    """
    d = np.asarray(target, dtype=float) - np.asarray(source, dtype=float)
    r2 = np.einsum("...i,...i->...", d, d)
    if np.any(r2 == 0.0):
        raise SingularityError("coincident source and target")
    r = np.sqrt(r2)
    dn = np.einsum("...i,...i->...", d, np.asarray(normal_at_target, dtype=float))
    _charge(ledger, NORMAL_FIELD_COST, r.size)
    return -dn / (FOUR_PI * (r2 * r))


# ---------------------------------------------------------------------------
# solid angle and flux
# ---------------------------------------------------------------------------


def solid_angles(corners, points, ledger: Optional[FlopLedger] = None):
    """Signed solid angles of triangles seen from points (van Oosterom-Strackee).

    ``corners`` has shape ``(..., 3, 3)`` and ``points`` ``(..., 3)``; leading
    axes broadcast. The sign is that of ``integral (r - x) . n / |r - x|^3 dA``:
    positive when the viewpoint is behind the triangle, i.e. on the side its
    normal points away from. No near-singularity checks are made here.
    """
    corners = np.asarray(corners, dtype=float)
    x = np.asarray(points, dtype=float)[..., None, :]
    R = corners - x
    r = np.sqrt(np.einsum("...i,...i->...", R, R))
    R1, R2, R3 = R[..., 0, :], R[..., 1, :], R[..., 2, :]
    r1, r2, r3 = r[..., 0], r[..., 1], r[..., 2]
    num = np.einsum("...i,...i->...", R1, np.cross(R2, R3))
    den = (
        r1 * r2 * r3
        + np.einsum("...i,...i->...", R1, R2) * r3
        + np.einsum("...i,...i->...", R2, R3) * r1
        + np.einsum("...i,...i->...", R3, R1) * r2
    )
    _charge(ledger, SOLID_ANGLE_COST, num.size)
    return 2.0 * np.arctan2(num, den)


def _on_panel(panel: Panel, x, rel):
    """True when `x` is within ``rel * diameter`` of the closed triangle."""
    tol = rel * panel.diameter
    h = float(np.dot(x - panel.corners[0], panel.normal))
    if abs(h) > tol:
        return False
    rho = x - h * panel.normal
    return _dist_to_triangle_in_plane(panel, rho) <= tol


def _dist_to_triangle_in_plane(panel: Panel, rho):
    t, m = _edge_frames(panel.corners, panel.normal)
    inside = all(np.dot(panel.corners[k] - rho, m[k]) >= 0.0 for k in range(3))
    if inside:
        return 0.0
    best = np.inf
    for k in range(3):
        a = panel.corners[k]
        b = panel.corners[(k + 1) % 3]
        s = np.clip(np.dot(rho - a, b - a) / np.dot(b - a, b - a), 0.0, 1.0)
        best = min(best, float(np.linalg.norm(rho - (a + s * (b - a)))))
    return best


def triangle_solid_angle(panel: Panel, viewpoint, ledger: Optional[FlopLedger] = None) -> float:
    """Signed solid angle of one panel; see :func:`solid_angles` for the sign.

    Raises
    ------
    NearSingularError
        If the viewpoint lies within ``1e-12 * diameter`` of the panel.
    """
    x = np.asarray(viewpoint, dtype=float)
    if _on_panel(panel, x, NEAR_SINGULAR_SOLID_ANGLE):
        raise NearSingularError("viewpoint on the panel; solid angle undefined")
    return float(solid_angles(panel.corners, x, ledger))


def panel_flux(panel: Panel, source, ledger: Optional[FlopLedger] = None, *, self_panel=False) -> float:
    """``integral_panel d/dn(r) 1/(4 pi |r - source|) dA(r)`` = ``-omega / (4 pi)``.

    With ``self_panel=True`` the source is the panel's own centroid and the
    flat-panel principal value, exactly zero, is returned.
    """
    if self_panel:
        return 0.0
    omega = triangle_solid_angle(panel, source, ledger)
    _charge(ledger, FlopCount(mul=1), 1)  # scaling by -1/(4 pi)
    return -omega * INV_FOUR_PI


def panel_flux_matrix(corners, points, ledger: Optional[FlopLedger] = None, *, skip_diagonal=False):
    """Flux of every panel from every point: ``F[i, k] = panel_flux(panel_i, point_k)``.

    With ``skip_diagonal`` the point set is the panel centroids and the
    diagonal is the self-panel value 0 (not charged).
    """
    corners = np.asarray(corners, dtype=float)
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    n_panel, n_point = len(corners), len(points)
    out = np.empty((n_panel, n_point))
    step = max(1, _CHUNK // max(n_point, 1))
    for lo in range(0, n_panel, step):
        hi = min(lo + step, n_panel)
        out[lo:hi] = solid_angles(corners[lo:hi, None], points[None, :])
    out *= -INV_FOUR_PI
    evaluations = n_panel * n_point
    if skip_diagonal:
        np.fill_diagonal(out, 0.0)
        evaluations -= min(n_panel, n_point)
    _charge(ledger, PANEL_FLUX_COST, evaluations)
    return out


def point_triangle_distance(corners, points) -> np.ndarray:
    """Euclidean distance from every point to every closed triangle, shape ``(m, k)``."""
    corners = np.asarray(corners, dtype=float)
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    out = np.empty((len(corners), len(points)))
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    normals = cross / np.linalg.norm(cross, axis=1)[:, None]
    t, m = _edge_frames(corners, normals)
    step = max(1, _CHUNK // max(len(points), 1))
    for lo in range(0, len(corners), step):
        hi = min(lo + step, len(corners))
        R = corners[lo:hi, None] - points[None, :, None, :]  # (m, k, 3 corners, 3)
        h = np.einsum("mki,mi->mk", R[:, :, 0], normals[lo:hi])
        p0 = np.einsum("mkvi,mvi->mkv", R, m[lo:hi])
        inside = np.all(p0 >= 0.0, axis=-1)
        edge = np.roll(corners[lo:hi], -1, axis=1) - corners[lo:hi]
        elen2 = np.einsum("mvi,mvi->mv", edge, edge)
        s = np.clip(np.einsum("mkvi,mvi->mkv", -R, edge) / elen2[:, None, :], 0.0, 1.0)
        nearest = corners[lo:hi, None] + s[..., None] * edge[:, None]
        d_edge = np.linalg.norm(points[None, :, None, :] - nearest, axis=-1).min(axis=-1)
        out[lo:hi] = np.where(inside, np.abs(h), d_edge)
    return out


# ---------------------------------------------------------------------------
# single layer
# ---------------------------------------------------------------------------


def _single_layer_closed_form(corners, normals, t, m, x):
    """Vectorized ``integral 1/|r - x| dA`` (no 1/(4 pi)); broadcasting like solid_angles."""
    R = corners - x[..., None, :]
    r = np.sqrt(np.einsum("...i,...i->...", R, R))
    R1, R2, R3 = R[..., 0, :], R[..., 1, :], R[..., 2, :]
    r1, r2, r3 = r[..., 0], r[..., 1], r[..., 2]
    num = np.einsum("...i,...i->...", R1, np.cross(R2, R3))
    den = (
        r1 * r2 * r3
        + np.einsum("...i,...i->...", R1, R2) * r3
        + np.einsum("...i,...i->...", R2, R3) * r1
        + np.einsum("...i,...i->...", R3, R1) * r2
    )
    omega = 2.0 * np.arctan2(num, den)
    h = -np.einsum("...i,...i->...", R1, normals)

    Rb = np.roll(R, -1, axis=-2)
    rb = np.roll(r, -1, axis=-1)
    s_a = np.einsum("...ki,...ki->...k", R, t)
    s_b = np.einsum("...ki,...ki->...k", Rb, t)
    p0 = np.einsum("...ki,...ki->...k", R, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        # R^2 - s^2 is the same at both ends, so the ratio has two equal forms;
        # take the one without cancellation
        forward = (rb + s_b) / (r + s_a)
        backward = (r - s_a) / (rb - s_b)
        ratio = np.where(s_a + s_b >= 0.0, forward, backward)
        logs = p0 * np.log(ratio)
    return logs.sum(axis=-1) + h * omega, h


def _near_edge(corners, normals, t, m, x, diam, rel):
    """Mask of points within ``rel * diam`` of the panel boundary in and near its plane."""
    tol = rel * diam
    R = corners - x[..., None, :]
    h = -np.einsum("...i,...i->...", R[..., 0, :], normals)
    p0 = np.einsum("...ki,...ki->...k", R, m)
    s_a = np.einsum("...ki,...ki->...k", R, t)
    edge_len = np.linalg.norm(np.roll(corners, -1, axis=-2) - corners, axis=-1)
    along = np.clip(-s_a, 0.0, edge_len)
    dist = np.sqrt(p0**2 + (-s_a - along) ** 2)
    return (np.abs(h) < tol) & (dist.min(axis=-1) < tol)


def single_layer_panel_potential(panel: Panel, eval_point, ledger: Optional[FlopLedger] = None) -> float:
    """``integral_panel dA' / (4 pi |eval - r'|)`` for unit density.

    Edge-decomposition closed form: per-edge logarithms plus the signed plane
    distance times the solid angle. Points lying on the panel boundary fall
    back to adaptive quadrature (counted in ``ledger.fallbacks``).
    """
    return float(single_layer_matrix(panel.corners[None], np.atleast_2d(eval_point), ledger)[0, 0])


def single_layer_matrix(corners, points, ledger: Optional[FlopLedger] = None):
    """``S[e, j]`` = unit-density single-layer potential of panel ``j`` at point ``e``."""
    corners = np.asarray(corners, dtype=float)
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    normals = cross / np.linalg.norm(cross, axis=1)[:, None]
    t, m = _edge_frames(corners, normals)
    diam = np.linalg.norm(np.roll(corners, -1, axis=1) - corners, axis=2).max(axis=1)

    n_eval, n_panel = len(points), len(corners)
    out = np.empty((n_eval, n_panel))
    step = max(1, _CHUNK // max(n_panel, 1))
    for lo in range(0, n_eval, step):
        hi = min(lo + step, n_eval)
        x = points[lo:hi, None, :]
        val, _ = _single_layer_closed_form(corners[None], normals[None], t[None], m[None], x)
        bad = _near_edge(corners[None], normals[None], t[None], m[None], x, diam[None], NEAR_SINGULAR_SINGLE_LAYER)
        bad |= ~np.isfinite(val)
        for e, j in zip(*np.nonzero(bad)):
            val[e, j] = _single_layer_fallback(corners[j], points[lo + e], ledger)
        out[lo:hi] = val
    out *= INV_FOUR_PI
    _charge(ledger, SINGLE_LAYER_COST, n_eval * n_panel)
    return out


def _single_layer_fallback(corners, x, ledger):
    def integrand(r):
        d = r - x
        return 1.0 / np.sqrt(np.einsum("ij,ij->i", d, d))

    try:
        value, n_eval = _adaptive(integrand, corners, 1e-10)
    except AccuracyError as exc:
        value, n_eval = exc.estimate, exc.evaluations
    if ledger is not None:
        ledger.fallbacks += 1
        ledger.charge(COULOMB_COST, n_eval)
    return value


# ---------------------------------------------------------------------------
# adaptive quadrature oracle
# ---------------------------------------------------------------------------

# symmetric 7-point rule, exact for polynomials of degree 5
_A1 = (6.0 - np.sqrt(15.0)) / 21.0
_A2 = (6.0 + np.sqrt(15.0)) / 21.0
_BARY = np.array(
    [
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        [_A1, _A1, 1.0 - 2.0 * _A1],
        [_A1, 1.0 - 2.0 * _A1, _A1],
        [1.0 - 2.0 * _A1, _A1, _A1],
        [_A2, _A2, 1.0 - 2.0 * _A2],
        [_A2, 1.0 - 2.0 * _A2, _A2],
        [1.0 - 2.0 * _A2, _A2, _A2],
    ]
)
_W = np.array(
    [9.0 / 40.0]
    + [(155.0 - np.sqrt(15.0)) / 1200.0] * 3
    + [(155.0 + np.sqrt(15.0)) / 1200.0] * 3
)
MAX_DEPTH = 20
MAX_ACTIVE = 1 << 18  # live sub-triangles per level; bounds memory for unreachable tolerances


def _rule(f, tris):
    """Degree-5 estimates on a batch of triangles ``(k, 3, 3)``."""
    pts = np.einsum("qv,kvi->kqi", _BARY, tris).reshape(-1, 3)
    vals = np.asarray(f(pts), dtype=float).reshape(len(tris), len(_W))
    area = 0.5 * np.linalg.norm(np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0]), axis=1)
    return area * (vals @ _W)


def _split(tris):
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    kids = np.stack(
        [
            np.stack([a, ab, ca], axis=1),
            np.stack([ab, b, bc], axis=1),
            np.stack([ca, bc, c], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ],
        axis=1,
    )
    return kids.reshape(-1, 3, 3)


def _adaptive(f, corners, rel_tol):
    root = np.asarray(corners, dtype=float).reshape(1, 3, 3)
    parent = _rule(f, root)
    n_eval = len(_W)
    scale = abs(parent[0])
    total_area = 0.5 * np.linalg.norm(np.cross(root[0, 1] - root[0, 0], root[0, 2] - root[0, 0]))
    done = 0.0
    tris = root
    for _depth in range(MAX_DEPTH):
        kids = _split(tris)
        est = _rule(f, kids)
        n_eval += len(kids) * len(_W)
        child_sum = est.reshape(-1, 4).sum(axis=1)
        area = 0.5 * np.linalg.norm(np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0]), axis=1)
        tol = rel_tol * np.maximum(np.abs(child_sum), scale * area / total_area)
        ok = np.abs(child_sum - parent) <= tol
        done += child_sum[ok].sum()
        if ok.all():
            return done, n_eval
        keep = np.repeat(~ok, 4)
        tris = kids[keep]
        parent = est[keep]
        scale = max(scale, abs(done + child_sum[~ok].sum()))
        if len(tris) > MAX_ACTIVE:
            break
    best = done + parent.sum()
    raise AccuracyError(
        f"adaptive quadrature did not reach rel_tol={rel_tol} within its depth/size budget",
        float(best),
        n_eval,
    )


def adaptive_triangle_quadrature(
    integrand: Callable[[np.ndarray], np.ndarray],
    panel,
    rel_tol: float = 1e-10,
    ledger: Optional[FlopLedger] = None,
) -> float:
    """Integrate `integrand` over a triangle by recursive 4-way subdivision.

    Parameters
    ----------
    integrand : callable
        Maps an ``(k, 3)`` array of points to ``k`` values.
    panel : Panel or (3, 3) array of corners
    rel_tol : float
        A sub-triangle is accepted when its four children agree with it to
        within `rel_tol` (relative to the larger of the local value and its
        area share of the whole integral).

    Raises
    ------
    AccuracyError
        After 20 subdivision levels (or once more than ``MAX_ACTIVE``
        sub-triangles are still unresolved); ``exc.estimate`` is the best
        value found.
    """
    corners = panel.corners if isinstance(panel, Panel) else panel
    value, n_eval = _adaptive(integrand, corners, rel_tol)
    # one weighted accumulate per rule point; integrand cost is the caller's
    if ledger is not None:
        ledger.charge(FlopCount(add=1, mul=1), n_eval)
    return float(value)


def measured_panel_point_ratio() -> float:
    """Flops of one analytic panel flux over flops of one point-kernel evaluation.

    Measured by running both routines on a ledger rather than read off the
    cost tables, so it tracks the implementation.
    """
    panel = Panel.from_corners((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    panel_ledger, point_ledger = FlopLedger(), FlopLedger()
    panel_flux_matrix(panel.corners[None], np.zeros((1, 3)), panel_ledger)
    normal_field_kernel(np.zeros(3), panel.centroid, panel.normal, point_ledger)
    return panel_ledger.total / point_ledger.total
