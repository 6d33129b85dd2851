from pathlib import Path

import pytest
import srsly

from wnncheck.errors import ConfigError
from wnncheck.loaders import (
    config_from_dict,
    override_config,
    parse_metric,
    read_config,
    write_config,
)
from wnncheck.types import MetricSpec, ScenarioConfig

CUSTOM_CONFIG = """
name: custom_hopf
algebra:
  catalog: su2
chain:
  h: [0]
metric:
  P: [[2.0]]
sampling:
  n_x: 4
  n_xi: 4
  seed: 3
run:
  checks: [fat, wnn]
"""


def test_read_config_yaml(tmp_path: Path):
    path = tmp_path / "config.yml"
    path.write_text(CUSTOM_CONFIG)
    config = read_config(path)
    assert config.name == "custom_hopf"
    assert config.algebra is not None and config.algebra.catalog == "su2"
    assert config.chain is not None and config.chain.h == [0]
    assert config.metric.P == [[2.0]]
    assert config.sampling.seed == 3
    assert config.run.checks == ["fat", "wnn"]


def test_read_config_json(tmp_path: Path):
    path = tmp_path / "config.json"
    srsly.write_json(path, {"scenario": "hopf", "sampling": {"seed": 5}})
    config = read_config(path)
    assert config.scenario == "hopf"
    assert config.sampling.seed == 5
    assert config.metric.P == "identity"


def test_write_config_round_trip(tmp_path: Path):
    config = ScenarioConfig(
        scenario="stiefel", metric=MetricSpec(P=[[3.0, 0.0], [0.0, 3.0]])
    )
    write_config(config, tmp_path / "stiefel.yml")
    assert read_config(tmp_path / "stiefel.yml") == config


def test_read_config_errors(tmp_path: Path):
    with pytest.raises(ConfigError, match="does not exist"):
        read_config(tmp_path / "missing.yml")
    path = tmp_path / "list.yml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError, match="mapping"):
        read_config(path)


@pytest.mark.parametrize(
    "data,match",
    [
        ({"name": "no_source"}, "scenario"),
        ({"scenario": "hopf", "metric": {"P": [[1.0, 2.0], [0.0, 1.0]]}}, "symmetric"),
        ({"scenario": "hopf", "tolerances": {"tol_check": 0.0}}, "positive"),
        ({"scenario": "hopf", "run": {"checks": ["nope"]}}, "Unknown checks"),
        ({"scenario": "hopf", "run": {"horizon": -1.0}}, "horizon"),
        ({"scenario": "hopf", "sampling": {"n_x": 0}}, ">= 1"),
    ],
)
def test_config_invariants(data: dict, match: str):
    with pytest.raises(ConfigError, match=match):
        config_from_dict(data)


def test_override_config():
    config = ScenarioConfig(scenario="hopf")
    updated = override_config(
        config, seed=9, tol_check=1e-8, checks=["fat"], with_oracles=True, P=[[2.0]]
    )
    assert updated.sampling.seed == 9
    assert updated.tolerances.tol_check == 1e-8
    assert updated.run.checks == ["fat"]
    assert updated.run.with_oracles
    assert updated.metric.P == [[2.0]]
    assert config.sampling.seed == 0
    with pytest.raises(ConfigError):
        override_config(config, P=[[1.0, 0.0], [1.0, 1.0]])


def test_parse_metric(tmp_path: Path):
    assert parse_metric("identity") == "identity"
    assert parse_metric("diag:2,3") == [[2.0, 0.0], [0.0, 3.0]]
    path = tmp_path / "P.json"
    srsly.write_json(path, [[1.5, 0.0], [0.0, 1.5]])
    assert parse_metric(str(path)) == [[1.5, 0.0], [0.0, 1.5]]
    with pytest.raises(ConfigError):
        parse_metric("diag:a,b")
    with pytest.raises(ConfigError):
        parse_metric("round")
