"""Ten random unit charges in a sphere, Kirkwood reference, flop-counted.

Prints each (method, N) cell with its error and cost, then the error level
below which the panel method becomes the cheaper way to reach a given
accuracy, for total flops and for the assembly of A alone.
"""
from solvbem import StudyConfig, run_work_precision_study

study = run_work_precision_study(StudyConfig(seed=42))
print(f"Kirkwood reference energy {study.reference:.4f} kcal/mol\n")
print(" method      N   |error| kcal/mol   flops total     flops A")
for r in study:
    print(f"    {r.method}  {r.n:5d}   {r.error:12.4f}   {r.flops_total:12.3e}  {r.flops_A:10.3e}")
print()
for metric, x in study.crossovers.items():
    if x is None:
        print(f"{metric:>5}: no crossover in the sampled range")
    else:
        print(f"{metric:>5}: panel cheaper below {x.error:.2f} kcal/mol "
              f"(bracketed by {x.tighter[0]} N={x.tighter[1]} and {x.looser[0]} N={x.looser[1]})")
