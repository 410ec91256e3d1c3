"""Command-line entry point: ``solvbem <study> [flags]``.

Output is CSV on stdout (or ``--out``). Failures print one line
``error: <kind>: <message>`` on stderr and exit with status 2.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import sys
from importlib import resources
from typing import List, Optional

import numpy as np

from . import bench
from .kirkwood import born_energy
from .surface import ChargeSet

SUBCOMMANDS = ("sphere-conv", "sphere-workprec", "line-potential", "born", "residue-conv", "residue-workprec")
FIXTURE_LEVELS = {"ASP": ("asp_d1", "asp_d2", "asp_d3", "asp_d4"), "ARG": ("arg_d1", "arg_d2", "arg_d3", "arg_d4")}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _levels(text: str):
    try:
        lo, _, hi = text.partition(":")
        lo, hi = int(lo), int(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must look like lo:hi, got {text!r}")
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad level range {text!r}")
    return tuple(range(lo, hi + 1))


def _common(p, sphere=True):
    if sphere:
        p.add_argument("--R", "--radius", dest="R", type=float, default=6.0, help="sphere radius (Angstrom)")
        p.add_argument("--levels", type=_levels, default=(1, 2, 3, 4), help="icosphere levels lo:hi")
    p.add_argument("--eps-in", type=float, default=4.0, help="solute permittivity")
    p.add_argument("--eps-out", type=float, default=80.0, help="solvent permittivity")
    p.add_argument("--solve", choices=("lu", "gmres"), default="lu")
    p.add_argument("--tol", type=float, default=1e-10, help="GMRES relative residual")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp comment")


def _methods(p):
    p.add_argument("--method", choices=("pan", "srf", "both"), default="both")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="solvbem", description="Boundary-element solvation energy studies.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    for name, helptext in (
        ("sphere-conv", "mesh convergence for random charges in a sphere"),
        ("sphere-workprec", "work-precision study and panel/point crossover in a sphere"),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        _methods(p)
        p.add_argument("--h", type=float, default=1.0, help="charge grid spacing")
        p.add_argument("--Q", type=int, default=10, help="number of charges")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--order-nmax", type=int, default=25, help="Kirkwood series order")

    p = sub.add_parser("line-potential", help="reaction potential along the z axis")
    p.add_argument("--R", "--radius", dest="R", type=float, default=6.0)
    p.add_argument("--charge-z", type=float, default=4.5)
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--samples", type=int, default=241, help="number of z samples over [-R, R]")
    p.add_argument("--order-nmax", type=int, default=25)
    _common(p, sphere=False)

    p = sub.add_parser("born", help="single central charge against the Born formula")
    _common(p)
    _methods(p)
    p.add_argument("--order-nmax", type=int, default=25)

    for name in ("residue-conv", "residue-workprec"):
        p = sub.add_parser(name, help="mesh files plus PQR charges, Richardson reference")
        _common(p, sphere=False)
        _methods(p)
        p.add_argument("--vert", action="append", default=[], help="MSMS .vert file (repeatable)")
        p.add_argument("--face", action="append", default=[], help="MSMS .face file (repeatable)")
        p.add_argument("--pqr", action="append", default=[], help="PQR file (one, or one per mesh)")
        p.add_argument("--residue", choices=sorted(FIXTURE_LEVELS), help="use the shipped fixture meshes")
        p.add_argument("--reference", choices=("richardson", "kirkwood"), default="richardson")
        p.add_argument("--richardson-order", type=float, default=1.0)
    return parser


def _method_tuple(choice):
    return {"pan": ("PAN",), "srf": ("SRF",), "both": bench.METHODS}[choice]


def _fixture(name: str) -> str:
    return str(resources.files("solvbem") / "data" / name)


def _residue_config(args) -> bench.StudyConfig:
    verts, faces, pqrs = list(args.vert), list(args.face), list(args.pqr)
    if args.residue:
        if verts or faces:
            raise UsageError("--residue cannot be combined with --vert/--face")
        stems = FIXTURE_LEVELS[args.residue]
        verts = [_fixture(s + ".vert") for s in stems]
        faces = [_fixture(s + ".face") for s in stems]
        pqrs = pqrs or [_fixture(args.residue.lower() + ".pqr")]
    if len(verts) != len(faces):
        raise UsageError("--vert and --face must be given the same number of times")
    if not verts:
        raise UsageError("residue studies need --vert/--face/--pqr triples or --residue")
    if not pqrs:
        raise UsageError("residue studies need --pqr")
    if len(set(pqrs)) > 1:
        raise UsageError("all --pqr files must name the same charge set")
    for path in verts + faces + pqrs:
        try:
            open(path, "rb").close()
        except OSError as exc:
            raise FileNotFoundError(f"{path}: {exc.strerror}") from None
    return bench.StudyConfig(
        meshes=tuple(zip(verts, faces)),
        pqr=pqrs[0],
        eps_solute=args.eps_in,
        eps_solvent=args.eps_out,
        methods=_method_tuple(args.method),
        solve=args.solve,
        tol=args.tol,
        reference=args.reference,
        richardson_order=args.richardson_order,
    )


def _run(args) -> str:
    stamp = None if args.no_timestamp else _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    cmd = args.command
    if cmd in ("sphere-conv", "sphere-workprec"):
        cfg = bench.StudyConfig(
            radius=args.R,
            h=args.h,
            Q=args.Q,
            seed=args.seed,
            levels=args.levels,
            eps_solute=args.eps_in,
            eps_solvent=args.eps_out,
            methods=_method_tuple(args.method),
            solve=args.solve,
            tol=args.tol,
            n_max=args.order_nmax,
        )
        study = bench.run_convergence_study if cmd == "sphere-conv" else bench.run_work_precision_study
        return study(cfg).to_csv(stamp)
    if cmd == "born":
        cfg = bench.StudyConfig(
            radius=args.R,
            levels=args.levels,
            charges=ChargeSet([[0.0, 0.0, 0.0]], [1.0]),
            eps_solute=args.eps_in,
            eps_solvent=args.eps_out,
            methods=_method_tuple(args.method),
            solve=args.solve,
            tol=args.tol,
            n_max=args.order_nmax,
        )
        text = bench.run_convergence_study(cfg).to_csv(stamp)
        exact = born_energy(1.0, args.R, args.eps_in, args.eps_out)
        return text + f"converged_to={exact:.3f} (analytic)\n"
    if cmd == "line-potential":
        if args.samples < 2:
            raise UsageError("--samples must be at least 2")
        study = bench.run_line_potential_study(
            radius=args.R,
            charge_z=args.charge_z,
            level=args.level,
            eps_solute=args.eps_in,
            eps_solvent=args.eps_out,
            z_samples=np.linspace(-args.R, args.R, args.samples),
            n_max=args.order_nmax,
            solve=args.solve,
            tol=args.tol,
        )
        return study.to_csv(stamp)
    cfg = _residue_config(args)
    study = bench.run_convergence_study if cmd == "residue-conv" else bench.run_work_precision_study
    return study(cfg).to_csv(stamp)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        text = _run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: missing-file: {exc}", file=sys.stderr)
        return 2
    except bench.ConfigError as exc:
        print(f"error: invalid-config: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0
