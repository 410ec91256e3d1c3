"""Surface meshes, point charges and the two discretizations built on them.

A closed, outward-oriented triangle mesh is the common input of both
boundary-element variants. The panel variant uses one unknown per face
(:class:`PanelSet`); the point variant uses one unknown per vertex, each
vertex receiving a third of the area of every incident face
(:class:`PointCloud`).

Lengths are in Angstrom, charges in units of the elementary charge.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import IO, Optional, Union

import numpy as np

__all__ = [
    "MeshError",
    "MeshParseError",
    "MalformedFaceError",
    "OrientationError",
    "DegeneratePanelError",
    "DegenerateNormalError",
    "CapacityError",
    "TriangleMesh",
    "PanelSet",
    "PointCloud",
    "ChargeSet",
    "check_closed",
    "load_msms_mesh",
    "read_msms",
    "write_msms",
    "generate_icosphere",
    "panel_geometry",
    "vertex_quadrature",
    "load_pqr",
    "read_pqr",
    "sample_grid_charges",
    "splitmix64",
    "winding_number",
    "write_xyz_csv",
]

PathOrStream = Union[str, os.PathLike, IO[str]]


class MeshError(ValueError):
    """Base class for invalid geometry."""


class MeshParseError(MeshError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class MalformedFaceError(MeshError):
    pass


class OrientationError(MeshError):
    pass


class DegeneratePanelError(MeshError):
    def __init__(self, face):
        self.face = int(face)
        super().__init__(f"face {self.face} has zero area")


class DegenerateNormalError(MeshError):
    pass


class CapacityError(ValueError):
    def __init__(self, requested, available):
        self.requested = requested
        self.available = available
        super().__init__(
            f"requested {requested} grid charges but only {available} candidates exist"
        )


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriangleMesh:
    """Closed triangulated surface.

    Attributes
    ----------
    vertices : (n, 3) float array
    faces : (m, 3) int array
        0-based vertex indices, counter-clockwise seen from outside.
    normals : (n, 3) float array or None
        Unit per-vertex normals, if the source provided them.
    """

    vertices: np.ndarray
    faces: np.ndarray
    normals: Optional[np.ndarray] = None

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        f = np.ascontiguousarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError(f"vertices must have shape (n, 3), got {v.shape}")
        if f.ndim != 2 or f.shape[1] != 3:
            raise MeshError(f"faces must have shape (m, 3), got {f.shape}")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        if self.normals is not None:
            nrm = np.ascontiguousarray(self.normals, dtype=float)
            if nrm.shape != v.shape:
                raise MeshError("normals must match vertices in shape")
            object.__setattr__(self, "normals", nrm)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def face_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.faces[:, k]] for k in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def area(self) -> float:
        return float(self.face_areas().sum())

    def volume(self) -> float:
        """Signed enclosed volume; positive for outward orientation."""
        a, b, c = (self.vertices[self.faces[:, k]] for k in range(3))
        return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)

    def transformed(self, rotation=None, shift=None) -> "TriangleMesh":
        """Rigidly moved copy: ``x -> rotation @ x + shift``."""
        rot = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        t = np.zeros(3) if shift is None else np.asarray(shift, dtype=float)
        normals = None if self.normals is None else self.normals @ rot.T
        return TriangleMesh(self.vertices @ rot.T + t, self.faces, normals)


@dataclass(frozen=True)
class PanelSet:
    """Flat constant-density panels, one per mesh face."""

    corners: np.ndarray  # (m, 3, 3): panel, vertex, xyz
    areas: np.ndarray
    centroids: np.ndarray
    normals: np.ndarray
    diameters: np.ndarray

    def __len__(self):
        return len(self.areas)

    @property
    def size(self) -> int:
        return len(self.areas)

    @property
    def weights(self) -> np.ndarray:
        """Area of each unknown's support, for total-charge sums."""
        return self.areas

    def panel(self, j):
        from .kernels import Panel

        return Panel(
            self.corners[j].copy(),
            self.normals[j].copy(),
            float(self.areas[j]),
            self.centroids[j].copy(),
            float(self.diameters[j]),
        )


@dataclass(frozen=True)
class PointCloud:
    """Vertex collocation points with one-third-area quadrature weights."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    @property
    def size(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class ChargeSet:
    """Point charges inside the solute. ``radii`` is kept for diagnostics only."""

    positions: np.ndarray
    charges: np.ndarray
    radii: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        q = np.asarray(self.charges, dtype=float).reshape(-1)
        if len(pos) != len(q):
            raise ValueError("positions and charges differ in length")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "charges", q)
        if self.radii is not None:
            object.__setattr__(self, "radii", np.asarray(self.radii, dtype=float).reshape(-1))

    def __len__(self):
        return len(self.charges)

    @property
    def count(self) -> int:
        return len(self.charges)

    def transformed(self, rotation=None, shift=None) -> "ChargeSet":
        rot = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        t = np.zeros(3) if shift is None else np.asarray(shift, dtype=float)
        return ChargeSet(self.positions @ rot.T + t, self.charges, self.radii)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def check_closed(mesh: TriangleMesh) -> None:
    """Raise unless `mesh` is a closed, consistently and outwardly oriented surface.

    Every directed edge must occur exactly once and its reverse exactly once,
    every vertex must be used, and the enclosed signed volume must be positive.
    """
    n = mesh.n_vertices
    f = mesh.faces
    if f.size and (f.min() < 0 or f.max() >= n):
        raise MalformedFaceError("face index out of range")
    used = np.zeros(n, dtype=bool)
    used[f.ravel()] = True
    if not used.all():
        raise MeshError(f"vertex {int(np.flatnonzero(~used)[0])} is not referenced by any face")
    if np.any((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])):
        raise MalformedFaceError("face with repeated vertex index")

    tail = f.ravel()
    head = f[:, [1, 2, 0]].ravel()
    directed = tail * n + head
    uniq, counts = np.unique(directed, return_counts=True)
    if np.any(counts > 1):
        bad = int(uniq[counts > 1][0])
        raise OrientationError(
            f"directed edge ({bad // n}, {bad % n}) traversed twice; inconsistent orientation"
        )
    reverse = head * n + tail
    paired = np.isin(reverse, uniq, assume_unique=False)
    if not paired.all():
        k = int(np.flatnonzero(~paired)[0])
        raise OrientationError(f"edge ({tail[k]}, {head[k]}) has no opposite half-edge; surface is open")
    if mesh.volume() <= 0.0:
        raise OrientationError("faces are oriented inward (non-positive enclosed volume)")


# ---------------------------------------------------------------------------
# MSMS files
# ---------------------------------------------------------------------------


def _lines(src: PathOrStream):
    if hasattr(src, "read"):
        return src.read().splitlines()
    with open(src, "r", encoding="ascii", errors="replace") as fh:
        return fh.read().splitlines()


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def _is_float(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _parse_vert(lines):
    pos, nrm = [], []
    header_seen = False
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        if not header_seen and not pos:
            header_seen = True
            # count header: "nvert nsphere density probe" or a bare integer line
            if len(tokens) < 6 or not all(_is_float(t) for t in tokens[:6]):
                continue
        if len(tokens) < 6:
            raise MeshParseError(f"expected at least 6 fields, got {len(tokens)}", lineno)
        try:
            vals = [float(t) for t in tokens[:6]]
        except ValueError:
            raise MeshParseError(f"non-numeric coordinate in {line.strip()!r}", lineno) from None
        pos.append(vals[:3])
        nrm.append(vals[3:])
    return np.array(pos, dtype=float).reshape(-1, 3), np.array(nrm, dtype=float).reshape(-1, 3)


def _parse_face(lines):
    faces = []
    header_seen = False
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        if not header_seen and not faces:
            header_seen = True
            if len(tokens) < 3 or not all(_is_int(t) for t in tokens):
                continue
        if len(tokens) < 3:
            raise MeshParseError(f"expected at least 3 fields, got {len(tokens)}", lineno)
        try:
            tri = [int(t) for t in tokens[:3]]
        except ValueError:
            raise MeshParseError(f"non-integer vertex index in {line.strip()!r}", lineno) from None
        faces.append(tri)
    return np.array(faces, dtype=np.int64).reshape(-1, 3)


def load_msms_mesh(vert_text: PathOrStream, face_text: PathOrStream) -> TriangleMesh:
    """Read an MSMS ``.vert``/``.face`` pair.

    Comment lines (leading ``#``) and the count header are skipped; fields
    after the first six of a vertex record (or first three of a face record)
    are ignored. Face indices are 1-based in the file and 0-based in the
    returned mesh. The mesh is checked for closure and orientation.

    Parameters
    ----------
    vert_text, face_text : path or text stream

    Raises
    ------
    MeshParseError
        Non-numeric field; the message carries the line number.
    MalformedFaceError
        Face index outside ``1..n_vertices``.
    OrientationError
        Open or inconsistently oriented surface.
    """
    vertices, normals = _parse_vert(_lines(vert_text))
    faces = _parse_face(_lines(face_text)) - 1
    if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
        bad = int(np.flatnonzero((faces < 0).any(axis=1) | (faces >= len(vertices)).any(axis=1))[0])
        raise MalformedFaceError(
            f"face {bad} references vertex outside 1..{len(vertices)}: {tuple(faces[bad] + 1)}"
        )
    nlen = np.linalg.norm(normals, axis=1)
    if np.all(nlen > 0):
        normals = normals / nlen[:, None]
        mesh = TriangleMesh(vertices, faces, normals)
    else:
        mesh = TriangleMesh(vertices, faces)
    check_closed(mesh)
    return mesh


read_msms = load_msms_mesh


def write_msms(mesh: TriangleMesh, vert_out: PathOrStream, face_out: PathOrStream, comment=None):
    """Write `mesh` as an MSMS-style file pair (1-based faces)."""
    normals = mesh.normals
    if normals is None:
        normals = vertex_quadrature(mesh).normals

    def _emit(dst, text):
        if hasattr(dst, "write"):
            dst.write(text)
        else:
            with open(dst, "w", encoding="ascii", newline="\n") as fh:
                fh.write(text)

    head = "" if comment is None else f"# {comment}\n"
    buf = io.StringIO()
    buf.write(head + "#vertex #sphere density probe_r\n")
    buf.write(f"{mesh.n_vertices:7d} {0:7d} {0.0:7.2f} {0.0:5.2f}\n")
    for p, n in zip(mesh.vertices, normals):
        buf.write(
            f"{p[0]:12.6f} {p[1]:12.6f} {p[2]:12.6f} {n[0]:10.6f} {n[1]:10.6f} {n[2]:10.6f} 0 0 2\n"
        )
    _emit(vert_out, buf.getvalue())
    buf = io.StringIO()
    buf.write(head + "#faces #sphere density probe_r\n")
    buf.write(f"{mesh.n_faces:7d} {0:7d} {0.0:7.2f} {0.0:5.2f}\n")
    for tri in mesh.faces + 1:
        buf.write(f"{tri[0]:7d} {tri[1]:7d} {tri[2]:7d} 1 0\n")
    _emit(face_out, buf.getvalue())


# ---------------------------------------------------------------------------
# icosphere
# ---------------------------------------------------------------------------


def _icosahedron():
    t = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=float,
    )
    f = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    return v / np.linalg.norm(v, axis=1)[:, None], f


def generate_icosphere(radius: float, level: int) -> TriangleMesh:
    """Icosahedron subdivided `level` times and projected onto a sphere.

    Level ``L`` has ``20 * 4**L`` faces and ``10 * 4**L + 2`` vertices.
    Vertex normals are exact radial directions.
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    verts, faces = _icosahedron()
    verts = list(verts)
    for _ in range(level):
        cache = {}

        def midpoint(i, j):
            key = (i, j) if i < j else (j, i)
            k = cache.get(key)
            if k is None:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                k = cache[key] = len(verts) - 1
            return k

        new = np.empty((4 * len(faces), 3), dtype=np.int64)
        for n, (a, b, c) in enumerate(faces):
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new[4 * n : 4 * n + 4] = [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = new
    unit = np.array(verts)
    mesh = TriangleMesh(radius * unit, faces, unit.copy())
    check_closed(mesh)
    return mesh


# ---------------------------------------------------------------------------
# discretizations
# ---------------------------------------------------------------------------


def panel_geometry(mesh: TriangleMesh) -> PanelSet:
    """Areas, centroids, unit normals and diameters of every face.

    Raises
    ------
    DegeneratePanelError
        For the first face with zero area.
    """
    corners = mesh.vertices[mesh.faces]
    a, b, c = corners[:, 0], corners[:, 1], corners[:, 2]
    cross = np.cross(b - a, c - a)
    twice_area = np.linalg.norm(cross, axis=1)
    if np.any(twice_area <= 0.0):
        raise DegeneratePanelError(np.flatnonzero(twice_area <= 0.0)[0])
    normals = cross / twice_area[:, None]
    edges = np.stack(
        [np.linalg.norm(b - a, axis=1), np.linalg.norm(c - b, axis=1), np.linalg.norm(a - c, axis=1)],
        axis=1,
    )
    return PanelSet(
        corners=corners,
        areas=0.5 * twice_area,
        centroids=corners.mean(axis=1),
        normals=normals,
        diameters=edges.max(axis=1),
    )


def vertex_quadrature(mesh: TriangleMesh) -> PointCloud:
    """One collocation point per vertex carrying a third of each incident face's area.

    The normal is the file normal when the mesh carries one, otherwise the
    area-weighted mean of the incident face normals.
    """
    n = mesh.n_vertices
    corners = mesh.vertices[mesh.faces]
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    weights = np.zeros(n)
    for k in range(3):
        np.add.at(weights, mesh.faces[:, k], areas / 3.0)
    if np.any(weights <= 0.0):
        raise MeshError(f"vertex {int(np.flatnonzero(weights <= 0.0)[0])} has no incident area")

    if mesh.normals is not None:
        length = np.linalg.norm(mesh.normals, axis=1)
        if np.any(length == 0.0):
            raise DegenerateNormalError(f"vertex {int(np.argmin(length))} has a zero file normal")
        normals = mesh.normals / length[:, None]
    else:
        # cross has length 2*area, so summing it weights by area
        acc = np.zeros((n, 3))
        for k in range(3):
            np.add.at(acc, mesh.faces[:, k], cross)
        length = np.linalg.norm(acc, axis=1)
        if np.any(length <= 1e-14 * max(1.0, float(np.abs(acc).max()))):
            raise DegenerateNormalError(
                f"vertex {int(np.argmin(length))} has a vanishing mean face normal"
            )
        normals = acc / length[:, None]
    return PointCloud(mesh.vertices.copy(), normals, weights)


def winding_number(mesh: TriangleMesh, points) -> np.ndarray:
    """Generalized winding number of `mesh` about each point (1 inside, 0 outside)."""
    from .kernels import solid_angles

    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    corners = mesh.vertices[mesh.faces]
    out = np.empty(len(pts))
    for i, p in enumerate(pts):
        out[i] = solid_angles(corners, p).sum() / (4.0 * np.pi)
    return out


# ---------------------------------------------------------------------------
# charges
# ---------------------------------------------------------------------------


def load_pqr(text: PathOrStream) -> ChargeSet:
    """Charges from the ATOM/HETATM records of a PQR file.

    The last five whitespace-separated fields of a record are
    ``x y z charge radius``; everything else on the line is ignored, as are
    non-record lines.
    """
    pos, q, rad = [], [], []
    for lineno, line in enumerate(_lines(text), start=1):
        tokens = line.split()
        if not tokens or tokens[0] not in ("ATOM", "HETATM"):
            continue
        if len(tokens) < 6:
            raise MeshParseError("record has fewer than 5 trailing numeric fields", lineno)
        try:
            x, y, z, charge, radius = (float(t) for t in tokens[-5:])
        except ValueError:
            raise MeshParseError("record has fewer than 5 trailing numeric fields", lineno) from None
        pos.append((x, y, z))
        q.append(charge)
        rad.append(radius)
    return ChargeSet(np.array(pos, dtype=float).reshape(-1, 3), np.array(q), np.array(rad))


read_pqr = load_pqr

_MASK64 = (1 << 64) - 1


def splitmix64(seed: int):
    """Infinite generator of splitmix64 outputs for `seed`."""
    state = seed & _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def sample_grid_charges(radius: float, h: float, count: int, seed: int) -> ChargeSet:
    """Random unit charges on grid vertices at least `h` inside a sphere.

    Candidates are the points ``(i, j, k) * h`` with ``|(i, j, k) * h| <= radius - h``,
    listed in lexicographic ``(i, j, k)`` order. A partial Fisher-Yates shuffle
    driven by :func:`splitmix64` picks `count` of them; draw ``d`` gets charge
    ``+1`` if ``d`` is even and ``-1`` otherwise. The result depends only on the
    arguments, bit for bit.
    """
    if not h > 0:
        raise ValueError(f"grid spacing must be positive, got {h}")
    if count < 0:
        raise ValueError("count must be non-negative")
    reach = radius - h
    kmax = int(np.floor(max(reach, 0.0) / h)) + 1
    rng = np.arange(-kmax, kmax + 1)
    ijk = np.stack(np.meshgrid(rng, rng, rng, indexing="ij"), axis=-1).reshape(-1, 3)
    pts = ijk * h
    keep = np.sqrt((pts * pts).sum(axis=1)) <= reach
    candidates = pts[keep]  # meshgrid 'ij' order is already lexicographic
    n = len(candidates)
    if count > n:
        raise CapacityError(count, n)

    order = np.arange(n)
    gen = splitmix64(seed)
    for i in range(count):
        j = i + next(gen) % (n - i)
        order[i], order[j] = order[j], order[i]
    chosen = candidates[order[:count]]
    charges = np.where(np.arange(count) % 2 == 0, 1.0, -1.0)
    return ChargeSet(chosen, charges)


def write_xyz_csv(out: PathOrStream, positions, charges=None) -> None:
    """Write ``x,y,z[,q]`` records, one per line, locale-independent."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 3)
    lines = []
    for k, p in enumerate(pos):
        fields = [repr(float(c)) for c in p]
        if charges is not None:
            fields.append(repr(float(charges[k])))
        lines.append(",".join(fields))
    text = "\n".join(lines) + ("\n" if lines else "")
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
