import csv
from pathlib import Path
from typing import Callable

import numpy as np
import pytest
import srsly

from wnncheck.constants import N_ORACLE_SAMPLES
from wnncheck.errors import ConfigError
from wnncheck.scenario import (
    ReportBundle,
    Scenario,
    check_order,
    exit_code,
    run_scenario,
)
from wnncheck.types import (
    AlgebraSpec,
    ChainSpec,
    CheckReport,
    CheckStatus,
    MetricSpec,
    ScenarioConfig,
)
from wnncheck.util import json_dumps

ConfigFactory = Callable[..., ScenarioConfig]

SO3_MATRICES = [
    [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
    [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]],
]


def test_scenario_from_config(fast_config: ConfigFactory):
    scenario = Scenario.from_config(fast_config("hopf"))
    assert scenario.id == "hopf"
    assert scenario.algebra.name == "su2"
    assert len(scenario.times) == 16
    assert 10.0 in scenario.dual_times and 0.1 in scenario.dual_times
    assert len(scenario.cloud) == (2 + 4) * (1 + 4)


def test_scenario_directions(fast_config: ConfigFactory):
    scenario = Scenario.from_config(fast_config("stiefel"))
    t, metric = scenario.triple, scenario.metric
    pairs = scenario.directions(5, offset=1)
    assert len(pairs) == 5
    for x, nu in pairs:
        assert np.linalg.norm(t.to_m(x)) == pytest.approx(1.0)
        assert metric.norm_q(t.to_q(nu)) == pytest.approx(1.0)
    again = scenario.directions(5, offset=1)
    assert all(np.array_equal(a[0], b[0]) for a, b in zip(pairs, again))


def test_scenario_deformations_are_admissible(fast_config: ConfigFactory):
    scenario = Scenario.from_config(fast_config("so4_s3"))
    for P_rel in scenario.deformations(3):
        deformed = scenario.metric.deformed(P_rel)
        assert np.allclose(deformed.P, deformed.P.T)


def test_scenario_custom_algebra():
    config = ScenarioConfig(
        name="so3_s2",
        algebra=AlgebraSpec(matrices=SO3_MATRICES, form_scale=0.5),
        chain=ChainSpec(h=[0]),
    )
    scenario = Scenario.from_config(config)
    assert scenario.id == "so3_s2"
    assert (scenario.triple.dim_q, scenario.triple.dim_m) == (1, 2)


def test_scenario_config_errors():
    not_invariant = MetricSpec(P=[[1.0, 0.0], [0.0, 2.0]])
    with pytest.raises(ConfigError, match="InvalidP"):
        Scenario.from_config(ScenarioConfig(scenario="stiefel", metric=not_invariant))
    negative = MetricSpec(P=[[-1.0]])
    with pytest.raises(ConfigError, match="InvalidP"):
        Scenario.from_config(ScenarioConfig(scenario="hopf", metric=negative))
    with pytest.raises(ConfigError, match="Unknown catalog scenario"):
        Scenario.from_config(ScenarioConfig(scenario="lens_space"))
    so3 = AlgebraSpec(matrices=SO3_MATRICES, form_scale=0.5, labels=["a", "b"])
    with pytest.raises(ConfigError, match="labels"):
        Scenario.from_config(ScenarioConfig(algebra=so3, chain=ChainSpec(h=[0])))
    with pytest.raises(ConfigError, match="NotClosed"):
        Scenario.from_config(
            ScenarioConfig(
                algebra=AlgebraSpec(catalog="su2"), chain=ChainSpec(h=[0, 1])
            )
        )


def test_check_order():
    assert check_order(["gronwall"]) == ["validate", "tensors", "wnn", "gronwall"]
    assert check_order(["flatgeo"]) == ["validate", "tensors", "wnn", "fat", "flatgeo"]
    assert check_order(["validate"], with_oracles=True) == ["validate", "oracles"]
    with pytest.raises(ConfigError):
        check_order(["nope"])


def test_exit_code():
    passed = CheckReport(name="a", status=CheckStatus.PASS)
    unsure = CheckReport(name="b", status=CheckStatus.INCONCLUSIVE)
    failed = CheckReport.from_residuals("c", {"r": 1.0}, {"r": 1e-9})
    assert failed.status == CheckStatus.FAIL
    assert exit_code([passed, unsure]) == 0
    assert exit_code([passed, failed]) == 2


def test_run_hopf(fast_config: ConfigFactory):
    bundle = run_scenario(fast_config("hopf"))
    assert bundle.exit_code == 0
    assert bundle.get("fat").verdict == "Fat"
    assert bundle.get("fat").statistics["sigma_min"] == pytest.approx(0.5)
    assert bundle.get("flatgeo").status == CheckStatus.NOT_APPLICABLE
    assert bundle.get("obstruction").verdict == "NoKernel"
    assert bundle.get("wnn").statistics["tau_hat"] == pytest.approx(0.0, abs=1e-10)
    assert all(r.wall_time == 0.0 for r in bundle.reports)
    assert len(bundle.samples) == (2 + 4) * (1 + 4)
    assert bundle.samples[0]["sigma_min"] == pytest.approx(0.5)


def test_run_so4_s3(fast_config: ConfigFactory):
    bundle = run_scenario(fast_config("so4_s3"))
    assert bundle.exit_code == 0
    fat = bundle.get("fat")
    assert fat.verdict == "NotFat"
    assert np.allclose(np.abs(fat.certificates["x"]), [0, 0, 1, 0, 0, 0])
    assert np.allclose(np.abs(fat.certificates["xi"]), [0, 0, 0, 1, 0, 0])
    assert bundle.get("flatgeo").status == CheckStatus.PASS
    obstruction = bundle.get("obstruction")
    assert obstruction.status == CheckStatus.WITNESSED
    assert obstruction.verdict == "ObstructionWitnessed"


@pytest.mark.parametrize("scenario_id", ["torus", "stiefel"])
def test_run_catalog_scenarios(scenario_id: str, fast_config: ConfigFactory):
    bundle = run_scenario(fast_config(scenario_id))
    assert bundle.exit_code == 0
    assert bundle.get("fat").verdict == "NotFat"
    assert not [r.name for r in bundle.reports if r.status == CheckStatus.FAIL]


def test_run_with_oracles(fast_config: ConfigFactory):
    config = fast_config("hopf", checks=["validate"], with_oracles=True)
    bundle = run_scenario(config)
    assert [r.name for r in bundle.reports][-1] == "oracles"
    assert bundle.get("oracles").status == CheckStatus.PASS
    oracles = bundle.get("oracles")
    assert "nabla_a_star" in oracles.residuals
    assert oracles.statistics["n_samples"] == N_ORACLE_SAMPLES
    assert bundle.samples == []


def test_run_is_reproducible(fast_config: ConfigFactory):
    config = fast_config("berger", checks=["fat"])
    first = run_scenario(config)
    second = run_scenario(config)
    assert first.model_dump_json() == second.model_dump_json()
    assert first.cloud_hash == second.cloud_hash


def test_run_independent_of_workers(fast_config: ConfigFactory):
    config = fast_config("hopf", checks=["wnn", "invariance", "dualrel"])
    threaded = config.model_copy(
        update={"sampling": config.sampling.model_copy(update={"n_workers": 3})}
    )
    serial = [r.model_dump_json() for r in run_scenario(config).reports]
    parallel = [r.model_dump_json() for r in run_scenario(threaded).reports]
    assert serial == parallel


def test_report_bundle_to_disk(tmp_path: Path, fast_config: ConfigFactory):
    bundle = run_scenario(fast_config("hopf", checks=["wnn", "fat"]))
    bundle.to_disk(tmp_path / "out")
    data = srsly.read_json(tmp_path / "out" / "report.json")
    assert data["version"] == "v1"
    assert data["scenario"] == "hopf"
    assert data["seed"] == 7
    assert "samples" not in data
    assert [r["name"] for r in data["reports"]][-2:] == ["wnn", "fat"]
    assert ReportBundle.model_validate(data).exit_code == 0

    with (tmp_path / "out" / "samples.csv").open() as f:
        rows = list(csv.reader(f))
    assert rows[0][:7] == ["sample_id", "x_0", "x_1", "x_2", "xi_0", "xi_1", "xi_2"]
    assert rows[0][-1] == "sigma_min"
    assert len(rows) == 1 + len(bundle.samples)


def test_report_bundle_without_csv(tmp_path: Path, fast_config: ConfigFactory):
    bundle = run_scenario(fast_config("hopf", checks=["wnn"], csv=False))
    assert bundle.samples == []
    bundle.to_disk(tmp_path)
    assert (tmp_path / "report.json").exists()
    assert not (tmp_path / "samples.csv").exists()


def test_report_json_float_precision(tmp_path: Path):
    report = CheckReport.from_residuals(
        "c", {"r": 0.1}, {"r": 1e-9}, statistics={"n": 3.0, "big": float("inf")}
    )
    bundle = ReportBundle(
        scenario="s", config_hash=1, cloud_hash=2, seed=0, reports=[report], exit_code=0
    )
    bundle.to_disk(tmp_path)
    text = (tmp_path / "report.json").read_text(encoding="utf8")
    assert '"r": 0.10000000000000001' in text
    assert '"r": 1.0000000000000001e-09' in text
    assert '"big": null' in text
    data = srsly.read_json(tmp_path / "report.json")
    assert data["reports"][0]["residuals"]["r"] == pytest.approx(0.1)
    assert data["reports"][0]["statistics"]["n"] == 3


def test_json_dumps_layout():
    text = json_dumps({"a": [1, 0.5], "b": {}, "c": "κ", "d": None, "e": True})
    assert text == (
        '{\n  "a": [\n    1,\n    0.5\n  ],\n  "b": {},\n'
        '  "c": "κ",\n  "d": null,\n  "e": true\n}'
    )
