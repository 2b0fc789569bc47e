import csv
import io
from dataclasses import replace

import pytest

from oimshil import (ConfigError, ContractError, PowerModel, ProblemSpec, RunConfig,
                     VariationScenario, brute_force_maxcut, energy_to_solution, kings_graph,
                     run_corner_matrix, run_single)
from oimshil import harness
from oimshil.harness import OutputPaths, restart_seed, run_sweep, sweep_config
from oimshil.pvt import corner_suite

import oracles
from conftest import FIXTURES

BENCH = ProblemSpec(path=str(FIXTURES / "kings18_seed2024.txt"), baseline_cut=315.0)


def small_cfg(**kw):
    g = kings_graph(3, 3, "random-sign", seed=1)
    spec = ProblemSpec(rows=3, cols=3, weight_rule="random-sign", seed=1,
                       baseline_cut=brute_force_maxcut(g).best_cut)
    dyn = replace(harness.BENCHMARK_DYNAMICS, max_cycles=80)
    return RunConfig(problem=spec, dynamics=dyn, seeds=(0, 1), **kw)


# -- energy -------------------------------------------------------------------------

def test_energy_formula_on_reported_inputs():
    total, shil, node, reported, cycles, t = oracles.TABLE1["ideal"]
    pm = PowerModel(node_power_total=node, f1=cycles / t)
    e = energy_to_solution(pm, "ideal", cycles)
    assert e == pytest.approx(9.008e-9, rel=1e-3)
    assert (e - reported) / reported == pytest.approx(0.034, abs=0.002)


def test_energy_delta_roa_minus_ideal():
    assert oracles.TABLE1["roa"][3] - oracles.TABLE1["ideal"][3] == pytest.approx(2.49e-9, abs=1e-15)
    e = {}
    for kind, (_, shil, node, _, cycles, t) in oracles.TABLE1.items():
        pm = PowerModel(node, {kind: shil}, f1=cycles / t)
        e[kind] = energy_to_solution(pm, kind, cycles)
    assert e["roa"] - e["ideal"] == pytest.approx(2.49e-9, rel=0.05)


def test_energy_zero_cycle_limit_and_guard():
    pm = PowerModel()
    assert energy_to_solution(pm, "roa", 0.0) == 0.0
    assert energy_to_solution(pm, "roa", 1e-12) < 1e-20
    with pytest.raises(ContractError):
        energy_to_solution(pm, "roa", -1.0)


def test_power_model_validation():
    with pytest.raises(ConfigError):
        PowerModel(node_power_total=-1)
    with pytest.raises(ConfigError):
        PowerModel(f1=0)


# -- run_single --------------------------------------------------------------------------

def test_ideal_sixteen_nodes_hits_oracle():
    g = kings_graph(4, 4, "random-sign", seed=12)
    best = brute_force_maxcut(g).best_cut
    spec = ProblemSpec(rows=4, cols=4, seed=12, baseline_cut=best)
    m = run_single(RunConfig(problem=spec, restarts=10), seed=0)
    assert m.binarized and m.accuracy == 1.0 and not m.forced_round
    assert m.cycles_to_solution > 0
    assert m.solution_time_s == pytest.approx(m.cycles_to_solution / 1.13e9)
    assert m.energy_to_solution_j == pytest.approx(458.9e-3 * m.solution_time_s)


@pytest.mark.parametrize("kind, expect", [("rosc", False), ("roa", True)])
def test_benchmark_voltage_ten_percent(kind, expect):
    cfg = RunConfig(problem=BENCH, kind=kind, scenario=VariationScenario(0.10, tag="v+10"))
    m = run_single(cfg, seed=0)
    assert m.binarized is expect
    assert m.forced_round is (not expect)
    if not expect:
        assert m.cycles_to_solution is None and m.energy_to_solution_j is None
        assert 0 < m.accuracy < 1


def test_run_single_is_deterministic_and_restarts_help():
    cfg = small_cfg(restarts=3)
    a, b = run_single(cfg, seed=4), run_single(cfg, seed=4)
    assert a.row() == b.row()
    one = run_single(replace(cfg, restarts=1), seed=4)
    assert a.cut >= one.cut
    assert restart_seed(4, 0) != restart_seed(4, 1) != restart_seed(5, 1)


def test_errors_carry_stage():
    big = kings_graph(53, 53)
    cfg = RunConfig(problem=ProblemSpec(rows=53, cols=53, baseline_cut=1.0), kind="roa")
    with pytest.raises(Exception) as e:
        run_single(cfg, 0, graph=big)
    assert e.value.stage == "shil"


def test_run_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(restarts=0)
    with pytest.raises(ConfigError):
        RunConfig(kind="laser")
    with pytest.raises(ConfigError):
        RunConfig(problem=ProblemSpec(path=str(tmp_path / "missing.txt")))


# -- matrix --------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def matrix():
    return run_corner_matrix(small_cfg())


def test_matrix_structure(matrix):
    cells = matrix.reported()
    assert len(cells) == 3 * 6
    assert {k for k, _ in cells} == {"ideal", "rosc", "roa"}
    # 3 kinds x 8 scenarios x 2 seeds
    assert len(matrix.rows) == 48


def test_rows_sorted_by_kind_scenario_seed(matrix):
    order = [(m.kind, m.family, m.scenario, m.seed) for m in matrix.rows]
    kinds = ["ideal", "rosc", "roa"]
    scen = [(f.name, sc.tag) for f in corner_suite() for sc in f.scenarios]
    keys = [(kinds.index(k), scen.index((f, t)), s) for k, f, t, s in order]
    assert keys == sorted(keys)


def test_aggregates_within_row_range(matrix):
    for c in matrix.cells():
        accs = [m.accuracy for m in matrix.rows
                if (m.kind, m.family, m.scenario) == (c.kind, c.family, c.scenario)]
        assert min(accs) - 1e-12 <= c.mean_accuracy <= max(accs) + 1e-12
        assert (c.min_accuracy, c.max_accuracy) == (min(accs), max(accs))


def test_ideal_control_always_binarizes(matrix):
    assert all(c.binarized_rate == 1.0 for c in matrix.cells() if c.kind == "ideal")


def test_worse_sign_is_reported(matrix):
    for fam in ("voltage5", "voltage10"):
        for kind in ("rosc", "roa"):
            pair = [c for c in matrix.cells() if c.kind == kind and c.family == fam]
            rep = [c for c in pair if c.reported]
            assert len(pair) == 2 and len(rep) == 1
            assert (rep[0].binarized_rate, rep[0].mean_accuracy) == min(
                (c.binarized_rate, c.mean_accuracy) for c in pair)


def test_outputs(matrix, tmp_path):
    out = OutputPaths(str(tmp_path / "r.csv"), str(tmp_path / "a.csv"), str(tmp_path / "t.txt"))
    matrix.write(out)
    rows = list(csv.DictReader(io.StringIO((tmp_path / "r.csv").read_text())))
    assert list(rows[0])[:9] == ["kind", "scenario", "seed", "cut", "accuracy", "binarized",
                                 "cycles", "time_s", "energy_j"]
    table = (tmp_path / "t.txt").read_text().splitlines()
    assert table[0].split() == ["kind", "metric", "nominal", "voltage5", "voltage10", "temp-40",
                                "temp125", "process"]
    proc = [l for l in table if l.startswith("rosc") and "accuracy" in l][0]
    assert "%" in proc.split()[-1] and "-" in proc.split()[-1]


def test_matrix_reproducible(matrix):
    again = run_corner_matrix(small_cfg())
    assert again.runs_csv() == matrix.runs_csv()
    assert again.aggregate_csv() == matrix.aggregate_csv()


def test_failing_runs_become_error_rows(monkeypatch):
    real = harness.run_single

    def flaky(cfg, seed, kind, *a):
        if seed == 1:
            raise ContractError("boom")
        return real(cfg, seed, kind, *a)

    monkeypatch.setattr(harness, "run_single", flaky)
    res = run_corner_matrix(small_cfg(kinds=("rosc",)), suite=corner_suite(n_seeds=2)[:1])
    errs = [m for m in res.rows if m.error]
    assert len(errs) == 1 and "boom" in errs[0].error
    assert res.cells()[0].errors == 1


def test_sweep():
    text = run_sweep(small_cfg(), "dynamics.k_s", ["2", "4"])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["value"] for r in rows] == ["2", "2", "4", "4"]
    assert sweep_config(small_cfg(), "pvt.gamma_rosc", "0.5").sensitivity.gamma_rosc == 0.5
    assert sweep_config(small_cfg(), "scenario.process_seed", "3").scenario.process_seed == 3
    with pytest.raises(ConfigError):
        sweep_config(small_cfg(), "dynamics.nope", "1")
    with pytest.raises(ConfigError):
        sweep_config(small_cfg(), "power.f1", "1")
