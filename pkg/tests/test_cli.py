"""CLI surfaces, config validation, exit codes, and determinism."""

import json

import pytest

from folnerlab.cli import main
from folnerlab.errors import ConfigError
from folnerlab.experiment import (
    ExperimentConfig,
    ResultTable,
    ScenarioSpec,
    guard_violations,
    run_experiment,
    validate_config,
)


def run_cli(*argv):
    return main(list(argv))


def test_folner_build_json(capsys):
    assert run_cli("folner", "build", "--preset", "r-const:0.5", "--n", "1", "--materialize") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["size"] == 20
    assert len(payload["elements"]) == 20


def test_folner_build_box(capsys):
    assert run_cli("folner", "build", "--kind", "box", "--a-min", "-1", "--a-max", "1", "--materialize") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["size"] == 3 * 8
    assert payload["recipe"]["kind"] == "box"


def test_folner_defect(capsys):
    assert run_cli("folner", "defect", "--preset", "r-zero", "--n", "2", "--g", "s") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["defect"]["exact"] == "2/9"


def test_folner_balance_box(capsys):
    assert run_cli("folner", "balance", "--kind", "box", "--a-min", "-2", "--a-max", "2", "--b", "0") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["balance"]["exact"] == "1/2"


def test_folner_materialize_guard_exit_code(capsys):
    assert run_cli("folner", "build", "--n", "4", "--materialize") == 3


def test_folner_bad_word_exit_code(capsys):
    assert run_cli("folner", "defect", "--g", "s q") == 1


def test_transport_commands(tmp_path, capsys):
    mu = tmp_path / "mu.json"
    nu = tmp_path / "nu.json"
    mu.write_text(
        json.dumps(
            [
                {"point": {"component": "hat", "pos": 0}, "mass": 0.5},
                {"point": {"component": "hat", "pos": 1}, "mass": 0.5},
            ]
        )
    )
    nu.write_text(
        json.dumps(
            [
                {"point": {"component": "hat", "pos": 0}, "mass": 0.5},
                {"point": {"component": "hat", "pos": 2}, "mass": 0.5},
            ]
        )
    )
    assert run_cli("transport", "wasserstein", "--mu", str(mu), "--nu", str(nu)) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"]["exact"] == "1/24"
    assert run_cli("transport", "assign", "--mu", str(mu), "--nu", str(nu)) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"]["exact"] == "1/24"
    assert run_cli("transport", "dual", "--mu", str(mu), "--nu", str(nu)) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["lower_bound"]["float"] <= payload["primal"]["float"]


def test_transport_interval_measures(tmp_path, capsys):
    mu = tmp_path / "mu.json"
    nu = tmp_path / "nu.json"
    mu.write_text(json.dumps([{"point": 0.0, "mass": 1.0}]))
    nu.write_text(json.dumps([{"point": 1.0, "mass": 1.0}]))
    assert run_cli("transport", "wasserstein", "--mu", str(mu), "--nu", str(nu)) == 0
    assert json.loads(capsys.readouterr().out)["value"]["float"] == 1.0


def test_dynamics_thm_example(capsys):
    assert run_cli("dynamics", "thm-example", "--case", "d") == 0
    out = capsys.readouterr().out
    assert "continuous,1.0" in out
    assert "ergodic-everywhere,1.0" in out


def test_dynamics_generic_csv(capsys):
    assert run_cli("dynamics", "generic", "--preset", "r-const:0.5", "--nmax", "2") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "experiment,n,subject,quantity,value,provenance"
    assert len(lines) == 3


def test_dynamics_seever(capsys):
    assert run_cli("dynamics", "seever", "--preset", "r-decay", "--pairs", "5", "--seed", "1") == 0


def test_homeo_empirical(capsys):
    assert run_cli("homeo", "empirical", "--n", "8", "--y", "0.5") == 0
    payload = json.loads(capsys.readouterr().out)
    assert 0 <= payload["low_fraction"]["float"] <= 1
    assert payload["w_to_end_mixture"]["float"] > 0
    assert abs(sum(entry["mass"] for entry in payload["measure"]) - 1.0) < 1e-9


def test_homeo_match_identity(capsys):
    assert run_cli("homeo", "match", "--radius", "0.25") == 0
    assert json.loads(capsys.readouterr().out)["matching"] == 1


def test_folner_interleave(capsys):
    assert run_cli("folner", "interleave", "--presets", "r-zero,r-const:0.5", "--count", "3") == 0
    recipes = json.loads(capsys.readouterr().out)
    assert [entry["kind"] for entry in recipes] == ["interleaved"] * 3
    assert [entry["family"] for entry in recipes] == ["0", "1", "0"]


def test_folner_translate(capsys):
    assert run_cli("folner", "translate", "--preset", "r-zero", "--n", "2", "--g", "s f") == 0
    recipes = json.loads(capsys.readouterr().out)
    assert [entry["kind"] for entry in recipes] == ["translated"] * 2
    assert [entry["size"] for entry in recipes] == [20, 9 * 16]


def test_dynamics_other_actions(capsys):
    assert run_cli("dynamics", "rightavg", "--nmax", "3") == 0
    capsys.readouterr()
    assert run_cli("dynamics", "met", "--preset", "r-zero", "--nmax", "2", "--g", "s") == 0
    capsys.readouterr()
    assert run_cli("dynamics", "tinv", "--preset", "r-zero", "--g", "f") == 0
    out = capsys.readouterr().out
    assert "translation-gap,1.0" in out
    assert run_cli("dynamics", "averaging", "--preset", "r-const:0.5", "--pairs", "3") == 0
    out = capsys.readouterr().out
    assert "residual,0.25" in out


def test_homeo_repel(capsys):
    assert run_cli("homeo", "repel", "--x", "0.5", "--eps", "0.125") == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["breakpoints"]) == 4


def test_validate_config_minimal_roundtrip():
    config = validate_config('{"scenarios": [], "seed": 3}')
    assert config.scenarios == ()
    assert config.seed == 3
    assert validate_config(json.dumps(config.canonical())) == config
    table = run_experiment(config)
    assert table.rows == [] and table.exit_code() == 0


def test_validate_config_rejects_bad_rate():
    with pytest.raises(ConfigError) as err:
        validate_config(
            '{"scenarios": [{"id": "genericity", "params": {"rate": {"default": 1.5}}}]}'
        )
    assert any("rate" in v for v in err.value.violations)


def test_validate_config_guard_marked():
    with pytest.raises(ConfigError) as err:
        validate_config('{"scenarios": [{"id": "genericity", "params": {"nmax": 4}}]}')
    assert guard_violations(err.value)
    assert any("size guard" in v for v in err.value.violations)


def test_validate_config_unknown_scenario():
    with pytest.raises(ConfigError) as err:
        validate_config('{"scenarios": [{"id": "mystery"}]}')
    assert not guard_violations(err.value)


def test_experiment_cli_exit_codes(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"scenarios": [{"id": "rightavg", "params": {"nmax": 2}}]}))
    assert run_cli("experiment", "--config", str(good), "--out", str(tmp_path / "res")) == 0
    guard = tmp_path / "guard.json"
    guard.write_text(json.dumps({"scenarios": [{"id": "genericity", "params": {"nmax": 4}}]}))
    assert run_cli("experiment", "--config", str(guard)) == 3
    malformed = tmp_path / "malformed.json"
    malformed.write_text("{not json")
    assert run_cli("experiment", "--config", str(malformed)) == 1


def test_experiment_deterministic_csv(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "seed": 11,
                "scenarios": [
                    {"id": "operator-identities", "params": {"rate": "r-decay", "pairs": 5}},
                    {"id": "rightavg", "params": {"nmax": 3}},
                ],
            }
        )
    )
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run_cli("experiment", "--config", str(config_path), "--out", str(out_a)) == 0
    assert run_cli("experiment", "--config", str(config_path), "--out", str(out_b)) == 0
    assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()
    manifest = json.loads((out_a / "manifest.json").read_text())
    assert manifest["seed"] == 11
    assert manifest["failures"] == []


def test_failure_exit_code_mapping():
    table = ResultTable()
    table.failures.append("synthetic failure")
    assert table.exit_code() == 2


def test_experiment_full_run_has_no_failures(tmp_path):
    config = ExperimentConfig(
        (
            ScenarioSpec("thm-example", {"case": "d", "bmax": 8}),
            ScenarioSpec("genericity", {"rate": "const:0.5", "nmax": 2}),
            ScenarioSpec("homeo-empirical", {"n": [4, 8], "y": [0.5]}),
            ScenarioSpec("folner-defect", {"rate": "zero", "nmax": 3}),
        ),
        seed=5,
    )
    table = run_experiment(config)
    assert table.failures == []
    assert table.exit_code() == 0
    tags = {row.provenance for row in table.rows}
    assert tags <= {"paper-bound", "closed-form", "brute-force-oracle"}


def test_usage_error_returns_one():
    assert run_cli("folner") == 1
    assert run_cli("nonexistent") == 1
