"""Unit constants shared by the solver and the analytic sphere series."""

# Coulomb constant in kcal * Angstrom / (mol * e^2)
COULOMB_KCAL = 332.0636

DEFAULT_EPS_SOLVENT = 80.0
DEFAULT_EPS_SOLUTE = 4.0
