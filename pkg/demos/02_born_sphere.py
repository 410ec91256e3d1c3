"""A single central charge in a sphere: both methods against the Born energy."""
from solvbem import ChargeSet, StudyConfig, born_energy, run_convergence_study

exact = born_energy(1.0, 6.0, 4.0, 80.0)
study = run_convergence_study(StudyConfig(charges=ChargeSet([[0.0, 0.0, 0.0]], [1.0])))
print(f"Born energy, R = 6, eps 4 / 80: {exact:.6f} kcal/mol\n")
print(" method      N      energy     rel. error")
for r in study:
    print(f"    {r.method}  {r.n:5d}  {r.energy:10.6f}   {r.error / abs(exact):.2e}")
for m, p in study.orders.items():
    print(f"\n{m}: observed order {p:.2f} in h = N^(-1/2), {study.orders_per_unknown[m]:.2f} in 1/N", end="")
print()
