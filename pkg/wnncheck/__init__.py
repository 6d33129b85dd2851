"""wnncheck, numerical verification of O'Neill tensors, holonomy fields and
the WNN property for homogeneous Riemannian submersions G/K → G/H."""

__version__ = "0.1.0"

from wnncheck.catalog import build_triple, list_catalog
from wnncheck.connection import AdaptedMetric, SubmersionTriple
from wnncheck.liealg import LieAlgebraBasis, build_algebra
from wnncheck.sample import SampleCloud
from wnncheck.scenario import ReportBundle, Scenario, run_scenario
from wnncheck.types import CheckReport, CheckStatus, ScenarioConfig

__all__ = [
    "AdaptedMetric",
    "CheckReport",
    "CheckStatus",
    "LieAlgebraBasis",
    "ReportBundle",
    "SampleCloud",
    "Scenario",
    "ScenarioConfig",
    "SubmersionTriple",
    "build_algebra",
    "build_triple",
    "list_catalog",
    "run_scenario",
]
