"""Regenerate the ASP/ARG fixture meshes and charge files in src/solvbem/data.

Geometry comes from a z-matrix with standard bond lengths and angles, charges
from the CHARMM22 all-atom residue topology (side chains carry the net -1 and
+1), radii are Bondi van der Waals radii. The surface is the level-1 set of a
blobby atomic density ``sum_a exp(-B (|x - a|^2 / r_a^2 - 1))``, triangulated
with marching cubes at several grid spacings; every atom centre lies strictly
inside. MSMS itself is not required.

Usage: python tools/make_residue_fixtures.py [outdir]
"""
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
from skimage.measure import marching_cubes

from solvbem.surface import TriangleMesh, check_closed, write_msms

BLOB = 1.5
SPACINGS = (1.0, 0.7, 0.5, 0.35)  # Angstrom; roughly doubles the face count each step
SMOOTHING = 10
BONDI = {"H": 1.2, "C": 1.7, "N": 1.55, "O": 1.52}

# name, bonded-to, angle-to, dihedral-to, bond length, angle (deg), dihedral (deg), charge
BACKBONE = [
    ("N", None, None, None, 0.0, 0.0, 0.0, -0.47),
    ("CA", "N", None, None, 1.458, 0.0, 0.0, 0.07),
    ("C", "CA", "N", None, 1.525, 111.2, 0.0, 0.51),
    ("O", "C", "CA", "N", 1.231, 120.5, -40.0, -0.51),
    ("HN", "N", "CA", "C", 1.010, 119.0, 180.0, 0.31),
    ("HA", "CA", "N", "C", 1.090, 109.5, -118.0, 0.09),
]

SIDE = {
    "ASP": [
        ("CB", "CA", "N", "C", 1.530, 110.5, 122.5, -0.28),
        ("HB1", "CB", "CA", "N", 1.090, 109.5, 60.0, 0.09),
        ("HB2", "CB", "CA", "N", 1.090, 109.5, 180.0, 0.09),
        ("CG", "CB", "CA", "N", 1.520, 112.6, -60.0, 0.62),
        ("OD1", "CG", "CB", "CA", 1.250, 118.4, 90.0, -0.76),
        ("OD2", "CG", "CB", "CA", 1.250, 118.4, -90.0, -0.76),
    ],
    "ARG": [
        ("CB", "CA", "N", "C", 1.530, 110.5, 122.5, -0.18),
        ("HB1", "CB", "CA", "N", 1.090, 109.5, 60.0, 0.09),
        ("HB2", "CB", "CA", "N", 1.090, 109.5, 180.0, 0.09),
        ("CG", "CB", "CA", "N", 1.520, 114.1, -60.0, -0.18),
        ("HG1", "CG", "CB", "CA", 1.090, 109.5, 60.0, 0.09),
        ("HG2", "CG", "CB", "CA", 1.090, 109.5, -60.0, 0.09),
        ("CD", "CG", "CB", "CA", 1.520, 111.3, 180.0, 0.20),
        ("HD1", "CD", "CG", "CB", 1.090, 109.5, 60.0, 0.09),
        ("HD2", "CD", "CG", "CB", 1.090, 109.5, -60.0, 0.09),
        ("NE", "CD", "CG", "CB", 1.460, 112.0, 180.0, -0.70),
        ("HE", "NE", "CD", "CG", 1.010, 118.0, 0.0, 0.44),
        ("CZ", "NE", "CD", "CG", 1.330, 124.2, 180.0, 0.64),
        ("NH1", "CZ", "NE", "CD", 1.330, 120.0, 0.0, -0.80),
        ("HH11", "NH1", "CZ", "NE", 1.010, 120.0, 0.0, 0.46),
        ("HH12", "NH1", "CZ", "NE", 1.010, 120.0, 180.0, 0.46),
        ("NH2", "CZ", "NE", "CD", 1.330, 120.0, 180.0, -0.80),
        ("HH21", "NH2", "CZ", "NE", 1.010, 120.0, 0.0, 0.46),
        ("HH22", "NH2", "CZ", "NE", 1.010, 120.0, 180.0, 0.46),
    ],
}


def place(a, b, c, bond, angle, torsion):
    """NeRF: position of atom d bonded to c with angle b-c-d and dihedral a-b-c-d."""
    angle, torsion = np.radians(angle), np.radians(torsion)
    bc = c - b
    bc /= np.linalg.norm(bc)
    n = np.cross(b - a, bc)
    n /= np.linalg.norm(n)
    m = np.cross(n, bc)
    d2 = bond * np.array([-np.cos(angle), np.sin(angle) * np.cos(torsion), np.sin(angle) * np.sin(torsion)])
    return c + d2[0] * bc + d2[1] * m + d2[2] * n


def build(residue):
    rows = BACKBONE + SIDE[residue]
    xyz = {}
    atoms = []
    for name, i, j, k, bond, angle, tors, q in rows:
        if i is None:
            p = np.zeros(3)
        elif j is None:
            p = np.array([bond, 0.0, 0.0])
        elif k is None:
            # third atom in the xy plane
            u = xyz[j] - xyz[i]
            u /= np.linalg.norm(u)
            t = np.radians(angle)
            rot = np.array([[np.cos(t), -np.sin(t), 0.0], [np.sin(t), np.cos(t), 0.0], [0.0, 0.0, 1.0]])
            p = xyz[i] + bond * (rot @ u)
        else:
            p = place(xyz[k], xyz[j], xyz[i], bond, angle, tors)
        xyz[name] = p
        atoms.append((name, p, q, BONDI[name[0]]))
    return atoms


def write_pqr(path, residue, atoms):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"REMARK   {residue} fragment, CHARMM22 charges, Bondi radii\n")
        for k, (name, p, q, r) in enumerate(atoms, 1):
            fh.write(
                f"ATOM  {k:5d} {name:<4s} {residue} A   1    {p[0]:8.3f}{p[1]:8.3f}{p[2]:8.3f} {q:7.4f} {r:6.4f}\n"
            )
        fh.write("END\n")


def density(points, centers, radii):
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
    return np.exp(-BLOB * (d2 / radii**2 - 1.0)).sum(-1)


def density_gradient(points, centers, radii):
    d = points[:, None, :] - centers[None, :, :]
    w = np.exp(-BLOB * ((d**2).sum(-1) / radii**2 - 1.0)) * (-2.0 * BLOB / radii**2)
    return (w[:, :, None] * d).sum(1)


def project(verts, centers, radii, steps=3):
    """Newton steps along the gradient onto the level-1 set."""
    for _ in range(steps):
        g = density_gradient(verts, centers, radii)
        f = density(verts, centers, radii) - 1.0
        verts = verts - (f / (g * g).sum(1))[:, None] * g
    return verts


def isosurface(centers, radii, spacing):
    lo = centers.min(0) - radii.max() - 1.0
    hi = centers.max(0) + radii.max() + 1.0
    axes = [np.arange(lo[i], hi[i] + spacing, spacing) for i in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 3)
    values = np.concatenate([density(chunk, centers, radii) for chunk in np.array_split(grid, 64)])
    values = values.reshape([len(a) for a in axes])
    verts, faces, _, _ = marching_cubes(values, level=1.0, spacing=(spacing,) * 3, allow_degenerate=False)
    verts = project(verts + lo, centers, radii)
    # marching cubes leaves slivers; tangential smoothing evens them out without
    # touching the connectivity
    nbr = np.zeros((len(verts), len(verts)))
    for a, b in ((0, 1), (1, 2), (2, 0)):
        nbr[faces[:, a], faces[:, b]] = nbr[faces[:, b], faces[:, a]] = 1.0
    nbr /= nbr.sum(1, keepdims=True)
    for _ in range(SMOOTHING):
        g = density_gradient(verts, centers, radii)
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        step = nbr @ verts - verts
        step -= (step * g).sum(1, keepdims=True) * g
        verts = project(verts + 0.5 * step, centers, radii)
    g = density_gradient(verts, centers, radii)
    normals = -g / np.linalg.norm(g, axis=1, keepdims=True)
    mesh = TriangleMesh(verts, faces.astype(np.int64), normals)
    if mesh.volume() < 0:
        mesh = TriangleMesh(verts, faces[:, ::-1].astype(np.int64), normals)
    check_closed(mesh)
    return mesh


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for residue in ("ASP", "ARG"):
        atoms = build(residue)
        net = sum(a[2] for a in atoms)
        write_pqr(outdir / f"{residue.lower()}.pqr", residue, atoms)
        centers = np.array([a[1] for a in atoms])
        radii = np.array([a[3] for a in atoms])
        for level, spacing in enumerate(SPACINGS, 1):
            mesh = isosurface(centers, radii, spacing)
            stem = outdir / f"{residue.lower()}_d{level}"
            with open(f"{stem}.vert", "w") as fv, open(f"{stem}.face", "w") as ff:
                write_msms(mesh, fv, ff, comment=f"{residue} blobby surface, grid spacing {spacing} A")
            print(f"{residue} net={net:+.2f} d{level}: {mesh.n_faces} faces, area {mesh.area():.1f} A^2")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "src" / "solvbem" / "data")
