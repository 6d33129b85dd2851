from typing import Callable

import numpy as np
import pytest

from wnncheck.catalog import build_triple
from wnncheck.connection import AdaptedMetric, SubmersionTriple
from wnncheck.liealg import LieAlgebraBasis, build_algebra
from wnncheck.sample import SampleCloud
from wnncheck.types import RunConfig, SamplingConfig, ScenarioConfig


@pytest.fixture()
def su2() -> LieAlgebraBasis:
    return build_algebra("su2")


@pytest.fixture()
def so4() -> LieAlgebraBasis:
    return build_algebra("so4")


@pytest.fixture()
def hopf() -> SubmersionTriple:
    """Fixture for the Hopf fibration su2/u1 with 𝔮 = span(E1)
    and 𝔪 = span(E2, E3).

    Returns:
        SubmersionTriple: The hopf catalog triple
    """
    return build_triple("hopf")


@pytest.fixture()
def so4_s3() -> SubmersionTriple:
    return build_triple("so4_s3")


@pytest.fixture()
def torus() -> SubmersionTriple:
    return build_triple("torus")


@pytest.fixture()
def stiefel() -> SubmersionTriple:
    """Fixture for so4/so2 → so4/so3, the only catalog chain with 𝔨 ≠ 0.
    𝔨 = span(L12), 𝔮 = span(L13, L23), 𝔪 = span(L14, L24, L34).

    Returns:
        SubmersionTriple: The stiefel catalog triple
    """
    return build_triple("stiefel")


@pytest.fixture()
def hopf_metric(hopf: SubmersionTriple) -> AdaptedMetric:
    return AdaptedMetric(hopf)


@pytest.fixture()
def hopf_metric_2(hopf: SubmersionTriple) -> AdaptedMetric:
    """Fixture for the Hopf fibration with the fiber metric doubled, P = 2.

    Returns:
        AdaptedMetric: Berger-type metric on su2
    """
    return AdaptedMetric(hopf, [[2.0]])


@pytest.fixture()
def so4_metric(so4_s3: SubmersionTriple) -> AdaptedMetric:
    return AdaptedMetric(so4_s3)


@pytest.fixture()
def so4_metric_deformed(so4_s3: SubmersionTriple) -> AdaptedMetric:
    return AdaptedMetric(so4_s3, np.diag([1.0, 2.0, 3.0]))


@pytest.fixture()
def torus_metric(torus: SubmersionTriple) -> AdaptedMetric:
    return AdaptedMetric(torus)


@pytest.fixture()
def stiefel_metric(stiefel: SubmersionTriple) -> AdaptedMetric:
    return AdaptedMetric(stiefel, 1.5 * np.eye(2))


@pytest.fixture()
def make_cloud() -> Callable[..., SampleCloud]:
    """Factory for small seeded sample clouds so tests stay fast.

    Returns:
        Callable[..., SampleCloud]: metric -> SampleCloud
    """

    def make(metric: AdaptedMetric, seed: int = 0, refine: bool = False) -> SampleCloud:
        return SampleCloud(metric, n_x=4, n_xi=4, seed=seed, refine=refine)

    return make


@pytest.fixture()
def fast_config() -> Callable[..., ScenarioConfig]:
    """Factory for catalog scenario configs with reduced sampling.

    Returns:
        Callable[..., ScenarioConfig]: scenario id -> ScenarioConfig
    """

    def make(scenario: str, **run_kwargs) -> ScenarioConfig:
        run = {
            "horizon": 5.0,
            "grid_size": 16,
            "n_directions": 3,
            "n_deformations": 2,
            **run_kwargs,
        }
        return ScenarioConfig(
            name=scenario,
            scenario=scenario,
            sampling=SamplingConfig(n_x=4, n_xi=4, seed=7),
            run=RunConfig(**run),
        )

    return make
