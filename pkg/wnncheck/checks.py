"""Named checks run by `run_scenario`. Each check maps a Scenario to one or
more CheckReports and declares the checks that must run before it."""

import time
from typing import TYPE_CHECKING, Callable, Dict, List, Sequence

import catalogue
import numpy as np

from wnncheck.analysis import (
    flat_pair_persistence,
    gronwall_check,
    nonnegative_curvature_scan,
    obstruction_report,
    wnn_metric_invariance_check,
    wnn_table,
)
from wnncheck.connection import curvature_symmetry_check, sectional_curvature
from wnncheck.constants import N_ORACLE_SAMPLES, ORACLE_TOL
from wnncheck.holonomy import (
    boundedness_check,
    curvature_identity_residual,
    dual_relation_check,
    generators,
)
from wnncheck.liealg import validate_structure
from wnncheck.oneill import (
    a_tensor,
    discriminant_check,
    nabla_a_star,
    oneill_horizontal_check,
    s_tensor_norm,
    tensors_for,
    tg_identity_check,
)
from wnncheck.oracle import (
    fd_a_tensor,
    fd_connection_oracle,
    fd_nabla_a_star,
    fd_sectional_curvature,
)
from wnncheck.types import CheckReport, CheckStatus

if TYPE_CHECKING:
    from wnncheck.scenario import Scenario


class registry:
    checks = catalogue.create("wnncheck", "checks", entry_points=True)


CheckFunc = Callable[["Scenario"], List[CheckReport]]


class check:
    """Decorator for a named check.

    ```
    @check("gronwall", requires=["wnn"])
    def gronwall(scenario: Scenario) -> List[CheckReport]:
        ...
    ```
    """

    def __init__(self, name: str, *, requires: List[str] = []):
        self.name = name
        self.requires = requires

    def __call__(self, func: CheckFunc) -> CheckFunc:
        registry.checks.register(self.name)(Check(self.name, func, self.requires))
        return func


class Check:
    """A registered check. Calling it times the check and stamps the
    wall time on reports that don't carry their own."""

    def __init__(self, name: str, func: CheckFunc, requires: List[str]):
        self.name = name
        self.func = func
        self.requires = list(requires)

    def __call__(self, scenario: "Scenario") -> List[CheckReport]:
        start = time.time()
        reports = self.func(scenario)
        elapsed = time.time() - start
        for report in reports:
            if not report.wall_time:
                report.wall_time = elapsed
        return reports

    def __repr__(self) -> str:
        return f"Check({self.name}, requires={self.requires})"


def worst_case(
    name: str,
    reports: Sequence[CheckReport],
    statistics: Dict[str, float] = {},
) -> CheckReport:
    """Combine reports of the same residuals into one report holding the
    maximum of each residual. Inconclusive parts keep the result inconclusive
    unless something failed."""
    residuals: Dict[str, float] = {}
    tolerances: Dict[str, float] = {}
    for report in reports:
        for k, v in report.residuals.items():
            residuals[k] = max(residuals.get(k, 0.0), v) if np.isfinite(v) else v
            tolerances[k] = report.tolerances[k]
    combined = CheckReport.from_residuals(
        name,
        residuals,
        tolerances,
        statistics={"n_cases": float(len(reports)), **statistics},
    )
    if combined.status == CheckStatus.PASS and any(
        r.status == CheckStatus.INCONCLUSIVE for r in reports
    ):
        combined.status = CheckStatus.INCONCLUSIVE
    return combined


@check("validate")
def validate(scenario: "Scenario") -> List[CheckReport]:
    seed = scenario.config.sampling.seed
    return [
        validate_structure(scenario.algebra),
        scenario.triple.validate(),
        curvature_symmetry_check(scenario.metric, seed=seed),
    ]


@check("tensors", requires=["validate"])
def tensors(scenario: "Scenario") -> List[CheckReport]:
    metric, cloud = scenario.metric, scenario.cloud
    residuals = tensors_for(metric).residuals()
    tol = metric.tolerances.tol_check
    table = CheckReport.from_residuals(
        "tensors",
        residuals,
        {k: tol for k in residuals},
        statistics={"s_norm": s_tensor_norm(metric)},
    )
    return [
        table,
        tg_identity_check(metric, cloud),
        oneill_horizontal_check(metric, cloud),
        discriminant_check(metric, cloud),
        nonnegative_curvature_scan(metric, cloud),
    ]


@check("wnn", requires=["tensors"])
def wnn(scenario: "Scenario") -> List[CheckReport]:
    metric = scenario.metric
    estimate = scenario.wnn_estimate
    tol = metric.tolerances.tol_check
    report = CheckReport.from_residuals(
        "wnn",
        {"near_kernel": estimate.near_kernel_diagnostic},
        {"near_kernel": tol},
        statistics={
            "tau_hat": estimate.tau_hat,
            "excluded_fraction": estimate.excluded_fraction,
            "n_samples": float(estimate.n_samples),
        },
        certificates=estimate.max_ratio_sample,
        rows=wnn_table(metric, scenario.cloud, scenario.n_workers),
    )
    if estimate.flags:
        report.message = ", ".join(estimate.flags)
    if estimate.indeterminate and report.status == CheckStatus.PASS:
        report.status = CheckStatus.INCONCLUSIVE
        report.verdict = "Indeterminate"
    return [report]


@check("invariance", requires=["tensors"])
def invariance(scenario: "Scenario") -> List[CheckReport]:
    run = scenario.config.run
    reports = [
        wnn_metric_invariance_check(
            scenario.metric, P_rel, scenario.cloud, scenario.times, scenario.n_workers
        )
        for P_rel in scenario.deformations(run.n_deformations)
    ]
    return [worst_case("invariance", reports)]


@check("fat", requires=["tensors"])
def fat(scenario: "Scenario") -> List[CheckReport]:
    return [scenario.fatness]


@check("flatgeo", requires=["wnn", "fat"])
def flatgeo(scenario: "Scenario") -> List[CheckReport]:
    run = scenario.config.run
    fat_report = scenario.fatness
    if fat_report.verdict != "NotFat":
        return [
            CheckReport(
                name="flatgeo",
                status=CheckStatus.NOT_APPLICABLE,
                message=f"No flat pair to propagate (fatness: {fat_report.verdict})",
            )
        ]
    if scenario.wnn_estimate.indeterminate:
        return [
            CheckReport(
                name="flatgeo",
                status=CheckStatus.NOT_APPLICABLE,
                message="Metric not shown to be WNN on the samples",
            )
        ]
    x, xi = fat_report.certificates["x"], fat_report.certificates["xi"]
    return [
        flat_pair_persistence(scenario.metric, x, xi, run.horizon, run.grid_size)
    ]


@check("gronwall", requires=["wnn"])
def gronwall(scenario: "Scenario") -> List[CheckReport]:
    run = scenario.config.run
    tau = scenario.wnn_estimate.tau_hat
    reports = [
        gronwall_check(scenario.metric, x, nu, tau, run.horizon, run.grid_size)
        for x, nu in scenario.directions(run.n_directions, offset=1)
    ]
    return [worst_case("gronwall", reports, statistics={"tau": tau})]


@check("eqK", requires=["tensors"])
def eq_k(scenario: "Scenario") -> List[CheckReport]:
    run = scenario.config.run
    metrics = [scenario.metric]
    metrics += [scenario.metric.deformed(P) for P in scenario.deformations(1)]
    reports = [
        curvature_identity_residual(metric, x, nu, scenario.times)
        for metric in metrics
        for x, nu in scenario.directions(run.n_directions, offset=2)
    ]
    return [worst_case("curvature_identity", reports)]


@check("dualrel", requires=["tensors"])
def dualrel(scenario: "Scenario") -> List[CheckReport]:
    run = scenario.config.run
    reports = [
        dual_relation_check(
            generators(scenario.metric, x), scenario.dual_times, scenario.n_workers
        )
        for x, _ in scenario.directions(run.n_directions, offset=3)
    ]
    return [worst_case("dual_relation", reports)]


@check("bounded", requires=["tensors"])
def bounded(scenario: "Scenario") -> List[CheckReport]:
    run = scenario.config.run
    reports = []
    sup_ratio = 0.0
    for x, nu in scenario.directions(run.n_directions, offset=4):
        prop = generators(scenario.metric, x)
        report = boundedness_check(prop, nu, run.horizon, "dual", run.grid_size)
        sup_ratio = max(sup_ratio, report.statistics["sup_ratio"])
        reports.append(report)
    return [worst_case("bounded", reports, statistics={"sup_ratio": sup_ratio})]


@check("obstruction", requires=["fat"])
def obstruction(scenario: "Scenario") -> List[CheckReport]:
    run = scenario.config.run
    return [
        obstruction_report(scenario.metric, scenario.cloud, run.horizon, run.grid_size)
    ]


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(a - b).max() / max(1.0, np.abs(b).max()))


@check("oracles", requires=["validate"])
def oracles(scenario: "Scenario") -> List[CheckReport]:
    """Nomizu connection, curvature, A-tensor and ∇A* against finite
    differences in the exponential chart"""
    metric = scenario.metric
    t = scenario.triple
    rng = scenario.cloud.rng(5)
    connection = parallel = curvature = a_residual = nabla = 0.0
    for _ in range(N_ORACLE_SAMPLES):
        x, w, y = (t.from_p(rng.standard_normal(t.dim_p)) for _ in range(3))
        expected = t.from_p(metric.N(t.to_p(x)) @ t.to_p(w))
        connection = max(
            connection, _relative(fd_connection_oracle(metric, x, w), expected)
        )
        transported = fd_connection_oracle(metric, x, w, kind="parallel")
        parallel = max(parallel, float(np.abs(transported).max()))
        curvature = max(
            curvature,
            _relative(
                np.array(fd_sectional_curvature(metric, x, y)),
                np.array(sectional_curvature(metric, x, y)),
            ),
        )
        if t.dim_m:
            xm, ym = (t.from_m(rng.standard_normal(t.dim_m)) for _ in range(2))
            oracle_a = fd_a_tensor(metric, xm, ym)
            a_residual = max(a_residual, _relative(oracle_a, a_tensor(metric, xm, ym)))
        if t.dim_m and t.dim_q:
            z, xm = (t.from_m(rng.standard_normal(t.dim_m)) for _ in range(2))
            xi = t.from_q(rng.standard_normal(t.dim_q))
            oracle_nabla = fd_nabla_a_star(metric, z, xm, xi)
            nabla = max(nabla, _relative(oracle_nabla, nabla_a_star(metric, z, xm, xi)))
    residuals = {
        "connection": connection,
        "parallel": parallel,
        "curvature": curvature,
        "a_tensor": a_residual,
        "nabla_a_star": nabla,
    }
    return [
        CheckReport.from_residuals(
            "oracles",
            residuals,
            {k: ORACLE_TOL for k in residuals},
            statistics={"n_samples": float(N_ORACLE_SAMPLES)},
        )
    ]
