"""Tests for the JSON run-config schema."""

import json
from pathlib import Path

import pytest

from reefopt.core import ConfigError
from reefopt.core.runconfig import load_json, load_run_config, parse_run_config
from reefopt.problems import AntennaTraceProblem, BsopProblem, SphereProblem, TmdProblem

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _minimal(**extra) -> dict:
    data = {
        "problem": {"kind": "sphere", "dimension": 3},
        "substrates": [{"kind": "GM"}, {"kind": "DE"}],
        "engine": {"reef_size": 10, "iterations": 5},
    }
    data.update(extra)
    return data


def _write(tmp_path, data) -> Path:
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return path


def test_minimal_config():
    config = parse_run_config(_minimal())
    assert config.params.reef_size == 10
    assert [s.name for s in config.params.substrates] == ["gm", "de"]
    assert config.output_dir is None
    assert isinstance(config.build_problem(), SphereProblem)


@pytest.mark.parametrize(
    "data, message",
    [
        (_minimal(plots=True), "unknown top-level keys: plots"),
        ({"problem": {"kind": "sphere"}}, "missing top-level keys: substrates"),
        (_minimal(engine={"reef": 10}), "engine: unknown keys reef"),
        (_minimal(engine={"iterations": 2.5}), "expected an integer"),
        (_minimal(engine={"budding_enabled": 1}), "expected true or false"),
        (_minimal(engine={"pb": "high"}), "expected a number"),
        (_minimal(substrates=[]), "non-empty list"),
        (_minimal(substrates=[{"kind": "GM", "rate": 1}]), r"substrates\[0\]: unknown keys"),
        (_minimal(substrates=[{"kind": "XX"}]), "Unknown substrate kind"),
        (_minimal(problem={"dimension": 3}), "'kind'"),
        (_minimal(output_dir=3), "output_dir: expected a string"),
        ([1, 2], "JSON object"),
    ],
)
def test_schema_violations(data, message):
    with pytest.raises(ConfigError, match=message):
        parse_run_config(data)


def test_engine_validation_runs_on_load():
    with pytest.raises(ConfigError, match="rho0"):
        parse_run_config(_minimal(engine={"rho0": 1.5}))


def test_unknown_problem_key_rejected_when_built():
    config = parse_run_config(_minimal(problem={"kind": "sphere", "dims": 3}))
    with pytest.raises(ConfigError, match="unknown keys for 'sphere'"):
        config.build_problem()


def test_unknown_problem_kind():
    config = parse_run_config(_minimal(problem={"kind": "knapsack"}))
    with pytest.raises(ConfigError, match="problem.kind must be one of"):
        config.build_problem()


def test_malformed_json_reports_line_and_column(tmp_path):
    path = _write(tmp_path, '{\n  "problem": {"kind": "sphere"},\n  "substrates": [,]\n}\n')
    with pytest.raises(ConfigError, match=r"run\.json:3:\d+:"):
        load_run_config(path)


def test_schema_error_names_the_file(tmp_path):
    path = _write(tmp_path, _minimal(plots=True))
    with pytest.raises(ConfigError, match=r"run\.json: unknown top-level keys"):
        load_run_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_run_config(tmp_path / "nope.json")


def test_relative_output_dir_resolves_against_config(tmp_path):
    config = load_run_config(_write(tmp_path, _minimal(output_dir="out/sphere")))
    assert config.output_dir == tmp_path.resolve() / "out" / "sphere"
    assert config.source == (tmp_path / "run.json").resolve()


def test_absolute_output_dir_kept(tmp_path):
    config = load_run_config(_write(tmp_path, _minimal(output_dir=str(tmp_path / "abs"))))
    assert config.output_dir == tmp_path / "abs"


def test_with_seed_and_substrates():
    config = parse_run_config(_minimal())
    seeded = config.with_seed(42)
    assert seeded.params.seed == 42
    assert config.params.seed == 0
    single = config.with_substrates(config.params.substrates[:1])
    assert single.params.n_substrates == 1
    assert single.params.reef_size == 10


def test_load_json_side_file(tmp_path):
    path = tmp_path / "solution.json"
    path.write_text('{"genome": [1, 2')
    with pytest.raises(ConfigError, match=r"solution\.json:1:\d+"):
        load_json(path, "solution file")
    with pytest.raises(FileNotFoundError, match="Solution file not found"):
        load_json(tmp_path / "missing.json", "solution file")


def test_bsop_profiles_path_relative_to_config(tmp_path):
    from reefopt.problems.bsop import synth_profiles, write_profiles

    write_profiles(synth_profiles(2), tmp_path / "week.csv")
    data = _minimal(problem={"kind": "bsop", "profiles": "week.csv"})
    problem = load_run_config(_write(tmp_path, data)).build_problem()
    assert isinstance(problem, BsopProblem)
    assert problem.scenario.name == "week"


def test_bsop_rejects_both_sources():
    config = parse_run_config(_minimal(problem={"kind": "bsop", "profiles": "a.csv", "synthetic_seed": 1}))
    with pytest.raises(ConfigError, match="either 'profiles' or 'synthetic_seed'"):
        config.build_problem()


@pytest.mark.parametrize(
    "name, kind",
    [
        ("tmd_two_storey.json", TmdProblem),
        ("tmd_four_storey_top_floor.json", TmdProblem),
        ("bsop_synthetic.json", BsopProblem),
        ("antenna_surrogate.json", AntennaTraceProblem),
        ("sphere.json", SphereProblem),
    ],
)
def test_shipped_configs_load(name, kind):
    config = load_run_config(CONFIGS / name)
    assert isinstance(config.build_problem(), kind)


def test_lab_rig_uses_its_mass_bound():
    problem = load_run_config(CONFIGS / "tmd_lab_rig.json").build_problem()
    assert problem.bounds.mass_max == 0.1


def test_top_floor_config_pins_floors():
    problem = load_run_config(CONFIGS / "tmd_four_storey_top_floor.json").build_problem()
    assert problem.encoding.lower[-4:].tolist() == [4.0] * 4
    assert problem.encoding.upper[-4:].tolist() == [4.0] * 4
