import math

import pytest

from oimshil import ConfigError
from oimshil.config import load_config, parse_seeds

from conftest import FIXTURES


def write(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return p


def test_table3_fixture_parses():
    cfg, sweep = load_config(FIXTURES / "table3.cfg")
    assert sweep is None
    assert cfg.kinds == ("ideal", "rosc", "roa")
    assert cfg.seeds == tuple(range(20))
    assert cfg.problem.baseline_cut == 315.0
    assert cfg.dynamics.k_s == 4.0 and cfg.dynamics.shil_ramp_cycles == 50
    assert cfg.dynamics.settle_band == pytest.approx(math.pi / 8)
    assert cfg.power.shil_power == {"ideal": 0.0, "rosc": 0.006, "roa": 0.033}
    assert cfg.output.runs_csv.endswith("table3_runs.csv")


def test_defaults_when_sections_missing(tmp_path):
    cfg, _ = load_config(write(tmp_path, "[run]\nseeds = 3, 5-6\n"))
    assert cfg.seeds == (3, 5, 6)
    assert cfg.problem.path is None and cfg.problem.rows == 18
    assert cfg.sensitivity.gamma_rosc == 1.0


def test_relative_problem_path(tmp_path):
    (tmp_path / "p.txt").write_text("2 1\n0 1 1\n")
    cfg, _ = load_config(write(tmp_path, "[problem]\nfile = p.txt\n"))
    assert cfg.problem.load().m == 1


def test_sweep_section(tmp_path):
    _, sweep = load_config(write(tmp_path, "[sweep]\nparam = dynamics.k_s\nvalues = 1, 2\n"))
    assert sweep == ("dynamics.k_s", ("1", "2"))


@pytest.mark.parametrize("text", [
    "[dynamics]\nk_z = 1\n",
    "[bogus]\nx = 1\n",
    "[dynamics]\ndt_cycles = 0.5\n",
    "[dynamics]\nk_c = fast\n",
    "[scenario]\ntemperature_c = 200\n",
    "[problem]\nfile = nowhere.txt\n",
    "[run]\nrestarts = 0\n",
    "[run]\nbackend = gpu\n",
    "[shil]\nkinds = ideal, plasma\n",
    "[sweep]\nparam = dynamics.k_s\n",
    "not an ini file",
])
def test_invalid_configs(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "none.cfg")


@pytest.mark.parametrize("text", ["", "a-b", "1,,x"])
def test_bad_seed_lists(text):
    with pytest.raises(ConfigError):
        parse_seeds(text)
