"""Experiment configuration, convergence driver, identity and budget checks."""

import math

import numpy as np
import pytest

from surfspline.harness import (
    ErrorReport,
    ExperimentConfig,
    converge,
    greens_identity_check,
    oversampling_budget,
)

# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def test_config_defaults_valid():
    cfg = ExperimentConfig()
    assert cfg.curve == "disk"
    assert cfg.h_ladder == (0.2, 0.1, 0.05, 0.025)
    assert cfg.resolved_nu() is None


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(h_ladder=(0.2, 0.1))  # too few rungs
    with pytest.raises(ValueError):
        ExperimentConfig(h_ladder=(0.1, 0.2, 0.05))  # not decreasing
    with pytest.raises(ValueError):
        ExperimentConfig(norms=("3",))
    with pytest.raises(ValueError):
        ExperimentConfig(h_ladder=(0.2, 0.1, -0.05))


def test_config_from_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(
        "[experiment]\n"
        "curve = ellipse:2,1\n"
        "m = 2\n"
        "target = gauss   ; inline comment\n"
        "h_ladder = 0.2 0.1 0.05\n"
        "norms = 2 inf\n"
        "oversample = critical\n"
        "seed = 5\n"
        "output = out/run\n"
        "probe_grid = 128\n"
        "n_solver = 128\n"
        "quad_level = 32\n",
        encoding="utf-8",
    )
    cfg = ExperimentConfig.from_file(path)
    assert cfg.curve == "ellipse:2,1"
    assert cfg.target == "gauss"
    assert cfg.h_ladder == (0.2, 0.1, 0.05)
    assert cfg.norms == ("2", "inf")
    assert cfg.oversample == "critical"
    assert cfg.seed == 5
    # critical oversampling resolves to the sup-norm budget exponent
    assert cfg.resolved_nu() == pytest.approx(2.0)


def test_config_from_file_plain_numbers(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(
        "[experiment]\noversample = 1.5\nh_ladder = 0.4 0.3 0.2\n",
        encoding="utf-8",
    )
    cfg = ExperimentConfig.from_file(path)
    assert cfg.resolved_nu() == pytest.approx(1.5)
    path2 = tmp_path / "none.cfg"
    path2.write_text("[experiment]\noversample = none\n", encoding="utf-8")
    assert ExperimentConfig.from_file(path2).resolved_nu() is None


# ---------------------------------------------------------------------------
# oversampling budget
# ---------------------------------------------------------------------------


def test_budget_sup_norm():
    b = oversampling_budget(2, 2, math.inf)
    assert b.nu == pytest.approx(2.0)
    assert b.feasible


def test_budget_finite_p():
    b = oversampling_budget(2, 2, 2.0)
    assert b.nu == pytest.approx(1.6)  # 2mp/(mp+1) = 8/5
    assert b.feasible  # the d <= 2 constraint is vacuous


def test_budget_infeasible_in_3d():
    b = oversampling_budget(3, 2, 2.0)
    assert b.nu == pytest.approx(1.6)
    assert not b.feasible  # needs p <= d/((d-2)m) = 3/2


def test_budget_rejects_bad_p():
    with pytest.raises(ValueError):
        oversampling_budget(2, 2, 0.5)


# ---------------------------------------------------------------------------
# convergence driver
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def small_report():
    cfg = ExperimentConfig(
        curve="disk",
        target="gauss",
        h_ladder=(0.25, 0.2, 0.15),
        probe_grid=64,
        n_solver=128,
        quad_level=24,
    )
    return cfg, converge(cfg)


def test_converge_produces_clean_rungs(small_report):
    cfg, report = small_report
    assert len(report.rungs) == 3
    for rung, h in zip(report.rungs, cfg.h_ladder):
        assert rung.ok
        assert rung.h == h
        assert h <= rung.fill <= 2 * h
        assert rung.n_centers > 0
        assert rung.runtime > 0
        assert set(rung.errors) == set(cfg.norms)
    # rough norm ordering expected for a smooth target on a unit-size domain
    for rung in report.rungs:
        assert rung.errors["1"] <= rung.errors["2"] * 3
        assert rung.errors["2"] <= rung.errors["inf"] * 3


def test_converge_fits_rates(small_report):
    _, report = small_report
    assert set(report.rates) == {"1", "2", "inf"}
    for p, rate in report.rates.items():
        assert 1.0 < rate < 5.0, f"implausible rate {rate} for l{p}"


def test_report_tables_deterministic(small_report, tmp_path):
    cfg, report = small_report
    again = converge(cfg)
    assert report.rung_table() == again.rung_table()
    assert report.rates_table() == again.rates_table()
    # runtime varies run to run, so it must stay out of the CSV
    assert "runtime" not in report.rung_table()


def test_report_write_files(small_report, tmp_path):
    _, report = small_report
    main, rates_path = report.write(tmp_path / "sub")
    assert main == tmp_path / "sub" / "experiment.csv"
    table = main.read_bytes()
    rates = rates_path.read_bytes()
    assert b"\r" not in table and b"\r" not in rates
    header = table.split(b"\n", 1)[0].decode()
    assert header == "h,fill,n_centers,n_boundary_nodes,err_l1,err_l2,err_linf,status"
    assert rates.decode().startswith("norm,fitted_rate\n")


def test_converge_partial_report_on_failing_rungs():
    # the coarse rungs violate the reach guard for nu = 2 on this ellipse;
    # they must be annotated and skipped, not abort the ladder
    cfg = ExperimentConfig(
        curve="ellipse:1.5,1",
        target="gauss",
        h_ladder=(0.6, 0.3, 0.2),
        oversample=2.0,
        probe_grid=48,
        n_solver=128,
        quad_level=24,
        norms=("inf",),
    )
    report = converge(cfg)
    assert not report.rungs[0].ok
    assert "ReachViolationError" in report.rungs[0].failure
    assert report.rungs[2].ok
    assert any("fewer than 3 clean rungs" in w for w in report.warnings)
    table = report.rung_table()
    lines = table.strip().splitlines()
    assert len(lines) == 4
    assert "ReachViolationError" in lines[1]
    assert "," not in lines[1].split("ReachViolationError")[1]  # CSV-safe annotation


# ---------------------------------------------------------------------------
# representation identity check
# ---------------------------------------------------------------------------


def test_greens_identity_small(disk):
    err = greens_identity_check(disk, 2, "expx", n=128, level=24, probe_grid=16)
    assert err < 1e-8


def test_greens_identity_detects_wrong_constant(disk):
    # scaling the kernel constant breaks the identity at O(1)
    err = greens_identity_check(
        disk, 2, "expx", n=128, level=24, probe_grid=16, constant_scale=2.0
    )
    assert err > 1e-2
