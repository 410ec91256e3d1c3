import math

import numpy as np
import pytest

from solvbem.bench import (
    CONVERGENCE_HEADER,
    ConfigError,
    StudyConfig,
    detect_crossover,
    log_cost_to_reach,
    observed_order,
    order_per_unknown,
    pareto_frontier,
    richardson_reference,
    run_convergence_study,
    run_line_potential_study,
    run_work_precision_study,
)
from solvbem.surface import ChargeSet

# -- Richardson and orders --------------------------------------------------------


def test_richardson_exact_on_first_order_model():
    # E(h) = 10 + 2h with h = N^(-1/2): N = 100 -> h = 0.1, N = 400 -> h = 0.05
    assert richardson_reference(10.2, 10.1, 100, 400) == pytest.approx(10.0, abs=1e-12)


def test_richardson_closed_forms():
    assert richardson_reference(-3.0, -3.0, 50, 200) == -3.0
    assert richardson_reference(1.5, 1.2, 10, 40) == pytest.approx(2 * 1.2 - 1.5, abs=1e-15)
    # second order with rho = 2: E_f + (E_f - E_c) / 3
    assert richardson_reference(1.0, 0.4, 10, 40, order=2) == pytest.approx(0.2)


@pytest.mark.parametrize("nc,nf", [(100, 100), (400, 100)])
def test_richardson_ordering_error(nc, nf):
    with pytest.raises(ValueError):
        richardson_reference(1.0, 2.0, nc, nf)


def test_observed_order_examples():
    assert observed_order([0.4, 0.2], [100, 400]) == pytest.approx(1.0, abs=1e-12)
    assert observed_order([0.4, 0.4 * 2**-0.5], [100, 400]) == pytest.approx(0.5, abs=1e-12)
    ns = [80, 320, 1280]
    assert observed_order([3 * n**-0.5 for n in ns], ns) == pytest.approx(1.0, abs=1e-12)
    assert order_per_unknown([0.4, 0.2], [100, 400]) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("errs", [[0.1, 0.0], [-0.1, 0.2], [0.3]])
def test_observed_order_rejects_bad_errors(errs):
    with pytest.raises(ValueError):
        observed_order(errs, [10, 40][: len(errs)])


# -- crossover ------------------------------------------------------------------


def test_pareto_frontier_drops_dominated():
    front = pareto_frontier([(1.0, 10, 1), (2.0, 20, 2), (0.5, 30, 3), (0.6, 40, 4)])
    assert [s[2] for s in front] == [1, 3]


def test_log_cost_to_reach_interpolates():
    front = [(1.0, 10.0, 1), (0.01, 1000.0, 2)]
    assert log_cost_to_reach(front, 0.1) == pytest.approx(math.log(100.0))
    assert log_cost_to_reach(front, 5.0) == math.log(10.0)
    assert log_cost_to_reach(front, 0.001) == math.inf


def test_crossover_synthetic():
    # point: cheap, slow (err ~ F^-0.25); panel: dear, fast (err ~ F^-1)
    point = [(f**-0.25, f, i) for i, f in enumerate([1e2, 1e3, 1e4, 1e5])]
    panel = [(1e3 / f, f, i) for i, f in enumerate([1e3, 1e4, 1e5, 1e6])]
    x = detect_crossover(panel, point)
    # the two lines meet where F^-0.25 = 1e3 / F, i.e. F = 1e4, err = 0.1
    assert x.error == pytest.approx(0.1, rel=1e-9)
    assert x.tighter[2] * (1 - 1e-12) <= x.error <= x.looser[2] * (1 + 1e-12)
    assert "crossover_total_kcal=" in x.csv()


def test_no_crossover_cases():
    pts = [(1.0, 10, 1), (0.1, 100, 2)]
    assert detect_crossover(pts, []) is None
    # panel cheaper everywhere -> never loses
    assert detect_crossover([(1.0, 1, 1), (0.01, 10, 2)], [(1.0, 10, 1), (0.5, 100, 2)]) is None
    # point reaches everything cheaper -> panel never wins
    assert detect_crossover([(1.0, 100, 1), (0.5, 1000, 2)], [(1.0, 1, 1), (0.01, 10, 2)]) is None


# -- configuration ---------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ConfigError):
        StudyConfig(meshes=(("a", "b"), ("c", "d")), reference="kirkwood").validate()
    with pytest.raises(ConfigError):
        StudyConfig(levels=(2,)).validate()
    with pytest.raises(ConfigError):
        StudyConfig(methods=("XYZ",)).validate()
    with pytest.raises(ConfigError):
        StudyConfig(solve="cholesky").validate()
    assert StudyConfig().reference_mode == "kirkwood"
    assert StudyConfig(meshes=(("a", "b"), ("c", "d"))).reference_mode == "richardson"


def test_panel_only_study_has_no_crossover():
    res = run_work_precision_study(StudyConfig(levels=(1, 2), methods=("PAN",)))
    assert res.crossovers["total"] is None
    text = res.to_csv()
    assert "crossover_total_kcal=none" in text
    assert len([ln for ln in text.splitlines() if ln.startswith("PAN,")]) == 2


def test_convergence_csv_layout():
    res = run_convergence_study(StudyConfig(levels=(1, 2)))
    lines = res.to_csv("2020-01-01T00:00:00+00:00").splitlines()
    assert lines[0].startswith("# generated")
    assert lines[1].startswith("# study=convergence reference=kirkwood")
    assert lines[2] == CONVERGENCE_HEADER
    body = [ln.split(",")[0] for ln in lines[3:7]]
    assert body == ["PAN", "PAN", "SRF", "SRF"]
    assert sum(ln.startswith("order=") for ln in lines) == 2


def test_row_failure_is_recorded_and_study_continues():
    # a charge on a level-1 panel centroid lies inside the sphere but on that mesh
    from solvbem.surface import generate_icosphere, panel_geometry

    c = panel_geometry(generate_icosphere(6.0, 1)).centroids[0]
    res = run_convergence_study(StudyConfig(levels=(1, 2, 3), charges=ChargeSet([c], [1.0])))
    failed = [(r.method, r.n) for r in res.rows if r.failure is not None]
    assert failed == [("PAN", 80)]
    assert len(res.rows) == 6 and "PAN" in res.orders
    assert "# failed PAN N=80: SingularityError" in res.to_csv()


def test_born_study_reaches_born_energy(born_study):
    exact = -0.5 * 332.0636 * (1 / 4 - 1 / 80) / 6
    assert born_study.reference == pytest.approx(exact, rel=1e-12)
    for m in ("PAN", "SRF"):
        assert abs(born_study.rows_for(m)[-1].error) / abs(exact) < 0.02


# -- line potential ----------------------------------------------------------------


def test_line_potential_no_contrast_is_zero():
    s = run_line_potential_study(level=1, eps_solute=4.0, eps_solvent=4.0, z_samples=np.linspace(-5, 5, 11))
    for v in (s.psi_series, s.psi_panel, s.psi_point):
        assert np.all(v == 0.0)


def test_line_potential_skips_surface_and_agrees_at_centre():
    s = run_line_potential_study(level=2, z_samples=np.array([-6.0, 0.0, 3.0, 6.0 - 1e-8]))
    assert s.skipped == [-6.0, 6.0 - 1e-8]
    assert s.z.tolist() == [0.0, 3.0]
    assert s.psi_panel[0] == pytest.approx(s.psi_series[0], rel=0.05)
    assert "# skipped z=-6.0" in s.to_csv()


def test_line_potential_rejects_outside_charge():
    with pytest.raises(ConfigError):
        run_line_potential_study(charge_z=6.5, level=1)
