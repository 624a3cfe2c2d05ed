import io
import math
from dataclasses import replace

import numpy as np
import pytest

from repval import (SimulationScenario, compare_baseline, estimate,
                    normal_quantile, normal_sf, parse_scenario_file,
                    simulate_rep, sweep_c2)
from repval.simulate import (METRICS_CSV_HEADER, metrics_csv_row,
                             scenario_from_mapping, write_metrics_csv)


def _scenario(**kw):
    base = dict(pi1=0.1, pi2=0.8, seed=123, reps=50)
    base.update(kw)
    return SimulationScenario(**base)


def test_scenario_validation():
    with pytest.raises(ValueError):
        _scenario(f00=0.95)  # fractions no longer sum to one
    with pytest.raises(ValueError):
        _scenario(m=999)  # 999 * 0.9 is not an integer count
    with pytest.raises(ValueError):
        _scenario(pi1=0.0)
    with pytest.raises(ValueError):
        _scenario(reps=0)
    with pytest.raises(ValueError):
        _scenario(rho=1.0)
    sc = _scenario()
    assert sc.counts == (900, 25, 25, 50)
    assert sc.analysis_config.m == 1000


def test_same_seed_same_metrics():
    a = estimate(_scenario(reps=40))
    b = estimate(_scenario(reps=40))
    assert a == b


def test_rep_streams_are_independent_of_history():
    sc = _scenario(reps=10)
    alone = simulate_rep(sc, 7)
    within = [simulate_rep(sc, i) for i in range(10)][7]
    assert alone == within


def test_different_seeds_differ():
    a = estimate(_scenario(seed=1, reps=60))
    b = estimate(_scenario(seed=2, reps=60))
    assert a != b


def test_single_rep_metrics_equal_that_rep():
    sc = _scenario(reps=1)
    outcome = simulate_rep(sc, 0)
    metrics = estimate(sc)
    n11 = sc.counts[3]
    assert metrics.fdr_hat == outcome.fdp
    assert metrics.avg_power == outcome.n_true / n11
    assert metrics.p_at_least_one == float(outcome.n_true > 0)
    assert metrics.se_fdr == 0.0


def test_pure_null_everything_false():
    sc = _scenario(f00=1.0, f01=0.0, f10=0.0, f11=0.0, reps=400, seed=5)
    metrics = estimate(sc)
    assert metrics.avg_power == 0.0
    assert metrics.p_at_least_one == 0.0
    assert metrics.fdr_hat <= sc.q
    assert metrics.fwer_hat == metrics.fdr_hat  # every claim is false here


def test_mu_calibration_identities():
    # the shifts are defined by Bonferroni power pi at level 0.05
    sc = _scenario()
    mu1 = (normal_quantile(1 - 0.05 / sc.m)
           - normal_quantile(1 - sc.pi1))
    attained = normal_sf(normal_quantile(1 - 0.05 / sc.m) - mu1)
    assert attained == pytest.approx(sc.pi1, rel=1e-10)


def test_claims_never_exceed_selection():
    sc = _scenario(reps=30, seed=17)
    for rep in range(sc.reps):
        outcome = simulate_rep(sc, rep)
        assert 0 <= outcome.n_true <= outcome.n_claims <= outcome.r1


def test_sweep_matches_pointwise_estimate():
    sc = _scenario(reps=25)
    rows = sweep_c2(sc, [0.3, 0.5])
    assert len(rows) == 2
    assert rows[1][1] == estimate(replace(sc, c2=0.5))


def test_equicorrelated_blocks_smoke():
    sc = _scenario(rho=0.3, block_size=10, reps=300, seed=29)
    metrics = estimate(sc)
    assert metrics.fdr_hat < sc.q + 3 * max(metrics.se_fdr, 1e-3)


def test_compare_baseline_direction_sparse_regime():
    # GWAS-like sparsity: the step-up procedure claims at least as much as
    # BH on maximum p-values, and both keep the FDR under q
    sc = SimulationScenario(pi1=0.1, pi2=0.8, seed=31, m=1000, f00=0.996,
                            f01=0.001, f10=0.001, f11=0.002, l00=0.8,
                            reps=600)
    result = compare_baseline(sc)
    stepup, baseline = result["step-up"], result["max-p-bh"]
    assert stepup.mean_claims >= baseline.mean_claims
    assert stepup.fdr_hat < sc.q
    assert baseline.fdr_hat < sc.q


def test_both_procedures_gain_from_l00():
    base = SimulationScenario(pi1=0.1, pi2=0.8, seed=37, m=1000, f00=0.996,
                              f01=0.001, f10=0.001, f11=0.002, reps=400)
    claims = {"step-up": [], "max-p-bh": []}
    for l00 in (0.0, 0.8, 0.9):
        result = compare_baseline(replace(base, l00=l00))
        for key in claims:
            claims[key].append(result[key].mean_claims)
    for key, series in claims.items():
        assert series[0] <= series[1] <= series[2] + 1e-9


def test_scenario_file_roundtrip(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(
        "# a comment\n"
        "pi1 = 0.1\npi2 = 0.8\nseed = 42\nreps = 7\n"
        "l00 = 0.9  # trailing comment\n")
    sc = parse_scenario_file(path)
    assert sc == _scenario(seed=42, reps=7, l00=0.9)


def test_scenario_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("pi1 0.1\n")
    with pytest.raises(ValueError):
        parse_scenario_file(bad)
    with pytest.raises(ValueError):
        scenario_from_mapping({"pi1": 0.1, "pi2": 0.5})  # seed missing
    with pytest.raises(ValueError):
        scenario_from_mapping({"pi1": 0.1, "pi2": 0.5, "seed": 1,
                               "bogus": 2})


def test_metrics_csv_layout():
    sc = _scenario(reps=5, scenario_id="cell-a")
    metrics = estimate(sc)
    row = metrics_csv_row(sc, metrics)
    assert row.startswith("cell-a,0.5,0.8,0.1,0.8,")
    assert len(row.split(",")) == len(METRICS_CSV_HEADER.split(","))
    buf = io.StringIO()
    write_metrics_csv([(sc, metrics)], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == METRICS_CSV_HEADER
    assert lines[1] == row


def test_power_at_stated_optimum_c2():
    # published optimum for the high-power cell at l00=0.5 sits at c2=0.2
    # with average power about 0.298
    sc = SimulationScenario(pi1=0.1, pi2=0.8, seed=20260809, l00=0.5,
                            c2=0.2, reps=2000)
    metrics = estimate(sc)
    assert metrics.avg_power == pytest.approx(0.2980, abs=0.012)


def test_at_least_one_power_flat_near_half_c2():
    base = SimulationScenario(pi1=0.1, pi2=0.2, seed=41, l00=0.0, reps=1200)
    values = [m.p_at_least_one for _, m in sweep_c2(base, [0.45, 0.5, 0.55])]
    assert max(values) - min(values) <= 0.06


def test_fwer_procedure_controls_pure_null():
    sc = _scenario(f00=1.0, f01=0.0, f10=0.0, f11=0.0, reps=1500, seed=43)
    metrics = estimate(sc, procedure="bonferroni")
    assert metrics.fwer_hat <= 0.05 + 3 * max(metrics.se_fwer, 1e-3)


def test_unknown_procedure():
    with pytest.raises(ValueError):
        estimate(_scenario(reps=2), procedure="magic")
