from typing import Callable

import numpy as np
import pytest

from wnncheck.analysis import (
    estimate_wnn_tau,
    fatness_scan,
    flat_pair_persistence,
    gronwall_check,
    implied_kappa_bound,
    nonnegative_curvature_scan,
    obstruction_report,
    wnn_metric_invariance_check,
    wnn_ratio,
    wnn_table,
)
from wnncheck.connection import AdaptedMetric
from wnncheck.errors import InvalidFlatPair
from wnncheck.holonomy import time_grid
from wnncheck.liealg import LieAlgebraBasis
from wnncheck.sample import SampleCloud
from wnncheck.types import CheckStatus, ExcludedSample


def test_wnn_ratio_hopf(hopf_metric_2: AdaptedMetric, su2: LieAlgebraBasis):
    ratio = wnn_ratio(hopf_metric_2, su2.e("E2"), su2.e("E1") / np.sqrt(2))
    assert isinstance(ratio, float)
    assert ratio == pytest.approx(0.0, abs=1e-12)


def test_wnn_ratio_excluded_on_flat_pair(torus_metric: AdaptedMetric):
    ratio = wnn_ratio(torus_metric, [0.0, 1.0], [1.0, 0.0])
    assert isinstance(ratio, ExcludedSample)
    assert ratio.numerator == 0.0


def test_wnn_table_rows(
    hopf_metric: AdaptedMetric, make_cloud: Callable[..., SampleCloud]
):
    cloud = make_cloud(hopf_metric)
    rows = wnn_table(hopf_metric, cloud)
    assert len(rows) == len(cloud)
    assert [r["sample_id"] for r in rows] == list(range(len(cloud)))
    assert len(rows[0]["x"]) == 3
    assert not any(r["excluded"] for r in rows)
    assert rows == wnn_table(hopf_metric, cloud, n_workers=3)


@pytest.mark.parametrize(
    "fixture", ["hopf_metric", "hopf_metric_2", "so4_metric_deformed", "stiefel_metric"]
)
def test_estimate_wnn_tau(
    fixture: str,
    request: pytest.FixtureRequest,
    make_cloud: Callable[..., SampleCloud],
):
    metric = request.getfixturevalue(fixture)
    estimate = estimate_wnn_tau(metric, make_cloud(metric))
    assert estimate.tau_hat == pytest.approx(0.0, abs=1e-10)
    assert estimate.near_kernel_diagnostic < 1e-9
    assert not estimate.indeterminate
    assert "NearKernelViolation" not in estimate.flags


def test_estimate_wnn_tau_all_flat(torus_metric: AdaptedMetric):
    estimate = estimate_wnn_tau(torus_metric, SampleCloud(torus_metric, n_x=3, n_xi=3))
    assert estimate.excluded_fraction == 1.0
    assert estimate.tau_hat == 0.0
    assert estimate.max_ratio_sample == {}


def test_fatness_hopf(
    hopf_metric: AdaptedMetric,
    hopf_metric_2: AdaptedMetric,
    make_cloud: Callable[..., SampleCloud],
):
    report = fatness_scan(hopf_metric, make_cloud(hopf_metric, refine=True))
    assert report.verdict == "Fat"
    assert report.status == CheckStatus.PASS
    assert report.statistics["sigma_min"] == pytest.approx(0.5)
    report = fatness_scan(hopf_metric_2, make_cloud(hopf_metric_2))
    assert report.verdict == "Fat"
    assert report.statistics["sigma_min"] == pytest.approx(1 / np.sqrt(2))


def test_fatness_so4_certificate(
    so4_metric: AdaptedMetric,
    so4: LieAlgebraBasis,
    make_cloud: Callable[..., SampleCloud],
):
    report = fatness_scan(so4_metric, make_cloud(so4_metric))
    assert report.verdict == "NotFat"
    assert report.status == CheckStatus.WITNESSED
    assert np.allclose(report.certificates["x"], so4.e("L14"))
    assert np.allclose(report.certificates["xi"], so4.e("L23"))
    assert len(report.rows) == 3 + 4


def test_fatness_torus_certificate(
    torus_metric: AdaptedMetric, make_cloud: Callable[..., SampleCloud]
):
    report = fatness_scan(torus_metric, make_cloud(torus_metric))
    assert report.verdict == "NotFat"
    assert np.allclose(report.certificates["x"], [0.0, 1.0])
    assert np.allclose(report.certificates["xi"], [1.0, 0.0])


def test_fatness_stiefel(
    stiefel_metric: AdaptedMetric, make_cloud: Callable[..., SampleCloud]
):
    report = fatness_scan(stiefel_metric, make_cloud(stiefel_metric))
    assert report.verdict == "NotFat"
    t = stiefel_metric.triple
    x, xi = report.certificates["x"], report.certificates["xi"]
    a = t.from_m(t.to_m(x))
    assert np.allclose(a, x)
    assert t.q_space.contains(np.asarray(xi))


def test_flat_pair_persistence(so4_metric: AdaptedMetric, so4: LieAlgebraBasis):
    report = flat_pair_persistence(so4_metric, so4.e("L14"), so4.e("L23"), 10.0, 16)
    assert report.status == CheckStatus.PASS
    assert report.residuals["persistence"] < 1e-12


def test_flat_pair_persistence_rejects_non_flat(
    hopf_metric: AdaptedMetric, su2: LieAlgebraBasis
):
    with pytest.raises(InvalidFlatPair):
        flat_pair_persistence(hopf_metric, su2.e("E2"), su2.e("E1"))


def test_gronwall(hopf_metric_2: AdaptedMetric, su2: LieAlgebraBasis):
    report = gronwall_check(hopf_metric_2, su2.e("E2"), su2.e("E1"), 0.0, 10.0, 16)
    assert report.status == CheckStatus.PASS
    assert report.statistics["max_u_over_bound"] <= 1.0
    with pytest.raises(ValueError):
        gronwall_check(hopf_metric_2, su2.e("E2"), su2.e("E1"), -1.0)


@pytest.mark.parametrize("fixture", ["hopf_metric", "so4_metric", "stiefel_metric"])
def test_wnn_metric_invariance(
    fixture: str,
    request: pytest.FixtureRequest,
    make_cloud: Callable[..., SampleCloud],
):
    metric = request.getfixturevalue(fixture)
    dq = metric.triple.dim_q
    P_rel = 2.0 * np.eye(dq)
    report = wnn_metric_invariance_check(
        metric, P_rel, make_cloud(metric), time_grid(5.0, 8)
    )
    assert report.status == CheckStatus.PASS
    assert report.statistics["n_times"] == 8


def test_wnn_metric_invariance_anisotropic(
    so4_metric: AdaptedMetric, make_cloud: Callable[..., SampleCloud]
):
    P_rel = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.0], [0.0, 0.0, 0.7]])
    report = wnn_metric_invariance_check(
        so4_metric, P_rel, make_cloud(so4_metric), time_grid(5.0, 8)
    )
    assert report.status == CheckStatus.PASS


def test_nonnegative_curvature_scan(
    hopf_metric: AdaptedMetric,
    hopf_metric_2: AdaptedMetric,
    make_cloud: Callable[..., SampleCloud],
):
    report = nonnegative_curvature_scan(hopf_metric, make_cloud(hopf_metric))
    assert report.verdict == "NonNegative"
    report = nonnegative_curvature_scan(hopf_metric_2, make_cloud(hopf_metric_2))
    assert report.status == CheckStatus.INCONCLUSIVE
    assert report.statistics["min_curvature"] == pytest.approx(-0.5)


def test_obstruction_fat(
    hopf_metric: AdaptedMetric, make_cloud: Callable[..., SampleCloud]
):
    report = obstruction_report(hopf_metric, make_cloud(hopf_metric))
    assert report.status == CheckStatus.PASS
    assert report.verdict == "NoKernel"


@pytest.mark.parametrize("fixture", ["so4_metric", "torus_metric"])
def test_obstruction_witnessed(
    fixture: str,
    request: pytest.FixtureRequest,
    make_cloud: Callable[..., SampleCloud],
):
    metric = request.getfixturevalue(fixture)
    report = obstruction_report(metric, make_cloud(metric), horizon=5.0, grid_size=16)
    assert report.status == CheckStatus.WITNESSED
    assert report.verdict == "ObstructionWitnessed"
    assert report.statistics["sup_ratio_L"] == pytest.approx(1.0)
    assert report.statistics["kappa_empirical"] <= 1e-9
    assert report.statistics["kappa_bound"] == pytest.approx(0.0, abs=1e-12)
    assert report.statistics["contradiction_margin"] == pytest.approx(
        report.statistics["kappa_empirical"] - report.statistics["kappa_bound"]
    )


def test_implied_kappa_bound():
    assert implied_kappa_bound(1.0, 5.0) == 0.0
    assert implied_kappa_bound(0.5, 5.0) == 0.0
    assert implied_kappa_bound(float(np.cosh(2.0)), 1.0) == pytest.approx(4.0)
    assert implied_kappa_bound(float(np.cosh(3.0)), 2.0) == pytest.approx(2.25)
    with pytest.raises(ValueError):
        implied_kappa_bound(2.0, 0.0)
