"""Aspartate on the shipped fixture meshes with a Richardson reference.

Without an analytic answer the reference is extrapolated from the two finest
panel energies, so the finest panel error is only the extrapolation gap.
"""
from importlib import resources

from solvbem import StudyConfig, run_work_precision_study

data = resources.files("solvbem") / "data"
cfg = StudyConfig(
    meshes=tuple((str(data / f"asp_d{k}.vert"), str(data / f"asp_d{k}.face")) for k in (1, 2, 3, 4)),
    pqr=str(data / "asp.pqr"),
)
print(run_work_precision_study(cfg).to_csv())
