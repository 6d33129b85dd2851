import csv
import time
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import catalogue
import numpy as np
from pydantic import BaseModel, Field
from wasabi import Printer

from wnncheck.analysis import estimate_wnn_tau, fatness_scan
from wnncheck.catalog import build_triple
from wnncheck.checks import registry as check_registry
from wnncheck.connection import AdaptedMetric, SubmersionTriple, random_admissible_P
from wnncheck.constants import (
    CHECK_ORDER,
    DUAL_TIMES,
    EXIT_FAIL,
    EXIT_OK,
    ORACLE_CHECK,
    REPORT_VERSION,
)
from wnncheck.errors import ConfigError, WnnCheckError
from wnncheck.hashing import cloud_hash, config_hash
from wnncheck.holonomy import time_grid
from wnncheck.liealg import LieAlgebraBasis, build_algebra
from wnncheck.sample import SampleCloud
from wnncheck.types import (
    AlgebraSpec,
    CheckReport,
    CheckStatus,
    ScenarioConfig,
    WnnEstimate,
)
from wnncheck.util import ensure_path, json_dumps, normalize


def algebra_from_spec(spec: AlgebraSpec, tol_struct: float) -> LieAlgebraBasis:
    """Build the algebra named or spelled out by an AlgebraSpec

    Raises:
        ConfigError: If the catalog id is unknown
        NotClosed: If the matrices are not closed under commutator
        Degenerate: If the trace form is not positive-definite
    """
    if spec.catalog is not None:
        try:
            return build_algebra(spec.catalog, tol_struct=tol_struct)
        except catalogue.RegistryError:
            raise ConfigError(f"Unknown catalog algebra '{spec.catalog}'") from None
    assert spec.matrices is not None
    return build_algebra(
        [np.asarray(m, dtype=float) for m in spec.matrices],
        form_scale=spec.form_scale,
        labels=spec.labels,
        tol_struct=tol_struct,
    )


class Scenario:
    """Container for one configured submersion: the algebra, the chain, the
    adapted metric and the sample cloud every check runs against.
    Quantities several checks share are computed once and cached.
    """

    def __init__(
        self,
        config: ScenarioConfig,
        triple: SubmersionTriple,
        metric: AdaptedMetric,
        cloud: SampleCloud,
    ):
        self._config = config
        self._triple = triple
        self._metric = metric
        self._cloud = cloud

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "Scenario":
        """Build a Scenario from a validated ScenarioConfig

        Args:
            config (ScenarioConfig): Scenario configuration

        Raises:
            ConfigError: If the algebra, chain or metric violates an invariant

        Returns:
            Scenario: The configured scenario
        """
        tol = config.tolerances
        try:
            if config.scenario is not None:
                triple = build_triple(config.scenario, tol_struct=tol.tol_struct)
            else:
                assert config.algebra is not None and config.chain is not None
                algebra = algebra_from_spec(config.algebra, tol.tol_struct)
                triple = build_triple(config.chain, algebra, tol.tol_struct)
            P = None if config.metric.P == "identity" else config.metric.P
            metric = AdaptedMetric(triple, P, tol)
        except ConfigError:
            raise
        except WnnCheckError as e:
            raise ConfigError(f"{type(e).__name__}: {e}") from e
        sampling = config.sampling
        cloud = SampleCloud(
            metric,
            n_x=sampling.n_x,
            n_xi=sampling.n_xi,
            seed=sampling.seed,
            include_basis=sampling.include_basis,
            refine=config.run.refine,
        )
        return cls(config, triple, metric, cloud)

    @property
    def id(self) -> str:
        return self._config.scenario or self._config.name

    @property
    def config(self) -> ScenarioConfig:
        return self._config

    @property
    def algebra(self) -> LieAlgebraBasis:
        return self._triple.algebra

    @property
    def triple(self) -> SubmersionTriple:
        return self._triple

    @property
    def metric(self) -> AdaptedMetric:
        return self._metric

    @property
    def cloud(self) -> SampleCloud:
        return self._cloud

    @property
    def n_workers(self) -> int:
        return self._config.sampling.n_workers

    @property
    def times(self) -> np.ndarray:
        """Default grid on [0, T]"""
        run = self._config.run
        return time_grid(run.horizon, run.grid_size)

    @property
    def dual_times(self) -> List[float]:
        """The fixed times of the duality check merged into the default grid"""
        return sorted(set(DUAL_TIMES) | {float(t) for t in self.times})

    @cached_property
    def wnn_estimate(self) -> WnnEstimate:
        return estimate_wnn_tau(self._metric, self._cloud, self.n_workers)

    @cached_property
    def fatness(self) -> CheckReport:
        return fatness_scan(self._metric, self._cloud)

    def directions(
        self, n: int, offset: int = 0
    ) -> List[Tuple[np.ndarray, np.ndarray]]:
        """n seeded pairs (x, ν0) of unit horizontal and unit-g vertical
        vectors in algebra coordinates, independent of the cloud draws"""
        t = self._triple
        if not (t.dim_m and t.dim_q):
            return []
        rng = self._cloud.rng(offset)
        pairs = []
        for _ in range(n):
            x = normalize(rng.standard_normal(t.dim_m))
            nu = normalize(rng.standard_normal(t.dim_q), self._metric.P)
            pairs.append((t.from_m(x), t.from_q(nu)))
        return pairs

    def deformations(self, n: int, offset: int = 100) -> List[np.ndarray]:
        """n seeded relative tensors P_rel with g(P_rel·, ·) admissible"""
        rng = self._cloud.rng(offset)
        P_inv = self._metric.P_inv
        return [P_inv @ random_admissible_P(self._triple, rng) for _ in range(n)]

    def __repr__(self) -> str:
        return f"Scenario({self.id}, metric={self._metric})"


class ReportBundle(BaseModel):
    """Everything a run produces: the ordered check reports plus enough
    metadata to reproduce and compare runs."""

    version: str = REPORT_VERSION
    scenario: str
    config_hash: int
    cloud_hash: int
    seed: int
    reports: List[CheckReport]
    exit_code: int
    samples: List[Dict[str, Any]] = Field(default=[], exclude=True)

    def get(self, name: str) -> CheckReport:
        for report in self.reports:
            if report.name == name:
                return report
        raise KeyError(f"No report named {name}")

    def to_disk(self, output_dir: Union[str, Path], csv_rows: bool = True) -> None:
        """Write report.json and, when per-sample rows exist, samples.csv.
        Floats in both files carry 17 significant digits.

        Args:
            output_dir (Union[str, Path]): Directory to write to, created if missing
            csv_rows (bool): Write samples.csv
        """
        out = ensure_path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        report = json_dumps(self.model_dump(mode="json"))
        (out / "report.json").write_text(report + "\n", encoding="utf8")
        if csv_rows and self.samples:
            write_samples_csv(out / "samples.csv", self.samples)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_samples_csv(path: Path, samples: List[Dict[str, Any]]) -> None:
    """Per-sample CSV: sample_id, x coordinates, xi coordinates, then the
    scalar columns. Floats are written with 17 significant digits."""
    first = samples[0]
    scalar_keys = [
        k
        for k, v in first.items()
        if k not in ("sample_id", "x", "xi") and isinstance(v, (int, float))
    ]
    header = (
        ["sample_id"]
        + [f"x_{i}" for i in range(len(first["x"]))]
        + [f"xi_{i}" for i in range(len(first["xi"]))]
        + scalar_keys
    )
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in samples:
            values = [str(row["sample_id"])]
            values += [_fmt(v) for v in row["x"]]
            values += [_fmt(v) for v in row["xi"]]
            for k in scalar_keys:
                v = row.get(k, float("nan"))
                values.append(str(int(v)) if isinstance(v, bool) else _fmt(float(v)))
            writer.writerow(values)


def check_order(names: Sequence[str], with_oracles: bool = False) -> List[str]:
    """Requested checks plus their prerequisites, in dependency order

    Raises:
        ConfigError: If a name is not a known check
    """
    pending = list(names) + ([ORACLE_CHECK] if with_oracles else [])
    selected = set()
    while pending:
        name = pending.pop()
        if name in selected:
            continue
        try:
            check = check_registry.checks.get(name)
        except catalogue.RegistryError:
            raise ConfigError(f"Unknown check '{name}'") from None
        selected.add(name)
        pending.extend(check.requires)
    order = CHECK_ORDER + [ORACLE_CHECK]
    return sorted(selected, key=order.index)


def exit_code(reports: Sequence[CheckReport]) -> int:
    """0 unless some report failed. Inconclusive is not a failure."""
    if any(r.status == CheckStatus.FAIL for r in reports):
        return EXIT_FAIL
    return EXIT_OK


def sample_rows(
    scenario: Scenario, wnn_rows: List[Dict[str, Any]]
) -> List[Dict[str, Any]]:
    """Per-sample WNN records joined with σ_min(A*_x) of their x"""
    sigma = [r["sigma_min"] for r in scenario.fatness.rows]
    n_xi = len(scenario.cloud.xis_q)
    rows = []
    for row in wnn_rows:
        rows.append({**row, "sigma_min": sigma[row["sample_id"] // n_xi]})
    return rows


def run_scenario(
    config: ScenarioConfig, scenario: Optional[Scenario] = None, verbose: bool = False
) -> ReportBundle:
    """Execute the configured checks in dependency order

    Args:
        config (ScenarioConfig): Validated scenario configuration
        scenario (Scenario, optional): Prebuilt scenario for config
        verbose (bool): Print progress

    Raises:
        ConfigError: If the scenario cannot be built from config

    Returns:
        ReportBundle: Reports, hashes and the process exit code
    """
    msg = Printer(no_print=not verbose)
    scenario = scenario or Scenario.from_config(config)
    names = check_order(config.run.checks, config.run.with_oracles)
    reports: List[CheckReport] = []
    for name in names:
        start = time.time()
        check = check_registry.checks.get(name)
        produced = check(scenario)
        if not config.run.timing:
            for report in produced:
                report.wall_time = 0.0
        reports.extend(produced)
        statuses = ", ".join(r.status.value for r in produced)
        msg.info(f"{name}: {statuses} ({time.time() - start:.2f}s)")

    samples: List[Dict[str, Any]] = []
    wnn = [r for r in reports if r.name == "wnn" and r.rows]
    if config.run.csv and wnn:
        samples = sample_rows(scenario, wnn[0].rows)
    return ReportBundle(
        scenario=scenario.id,
        config_hash=config_hash(config),
        cloud_hash=cloud_hash(scenario.cloud),
        seed=config.sampling.seed,
        reports=reports,
        exit_code=exit_code(reports),
        samples=samples,
    )
