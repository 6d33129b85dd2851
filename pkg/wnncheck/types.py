import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from wnncheck.constants import (
    CHECK_ORDER,
    DEFAULT_SEED,
    FAT_EPS,
    GRID_SIZE,
    HORIZON,
    KERNEL_EPS,
    N_DEFORMATIONS,
    N_DIRECTIONS,
    N_SAMPLES,
    ORACLE_CHECK,
    TOL_CHECK,
    TOL_STRUCT,
)


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not_applicable"
    INCONCLUSIVE = "inconclusive"
    WITNESSED = "witnessed"


def _within(value: float, tol: float) -> bool:
    # NaN never counts as within tolerance
    return bool(value <= tol)


class CheckReport(BaseModel):
    """Machine-readable outcome of a single verification.

    Attributes:
        name (str): Check name
        status (CheckStatus): Outcome of the check
        verdict (str, optional): Domain verdict, e.g. "Fat" or "ObstructionWitnessed"
        residuals (Dict[str, float]): Named residuals compared against `tolerances`
        tolerances (Dict[str, float]): Tolerance for each residual, same keys
        statistics (Dict[str, float]): Named scalars that are reported, not asserted
        certificates (Dict[str, List[float]]): Named vectors in algebra coordinates
        wall_time (float): Seconds spent computing the report
    """

    name: str
    status: CheckStatus
    verdict: Optional[str] = None
    residuals: Dict[str, float] = {}
    tolerances: Dict[str, float] = {}
    statistics: Dict[str, float] = {}
    certificates: Dict[str, List[float]] = {}
    message: str = ""
    wall_time: float = 0.0
    rows: List[Dict[str, Any]] = Field(default=[], exclude=True)

    @model_validator(mode="after")
    def fail_records_violation(self) -> "CheckReport":
        if self.status == CheckStatus.FAIL and not self.violations():
            raise ValueError(
                f"Check {self.name} failed without a residual exceeding its tolerance"
            )
        return self

    @classmethod
    def from_residuals(
        cls,
        name: str,
        residuals: Dict[str, float],
        tolerances: Dict[str, float],
        **kwargs: Any,
    ) -> "CheckReport":
        """Build a report whose status is pass iff every residual
        is within its tolerance.

        Args:
            name (str): Check name
            residuals (Dict[str, float]): Named residuals
            tolerances (Dict[str, float]): Tolerances keyed like residuals

        Returns:
            CheckReport: Report with status pass or fail
        """
        residuals = {k: float(v) for k, v in residuals.items()}
        ok = all(_within(v, tolerances[k]) for k, v in residuals.items())
        status = CheckStatus.PASS if ok else CheckStatus.FAIL
        return cls(
            name=name,
            status=status,
            residuals=residuals,
            tolerances=dict(tolerances),
            **kwargs,
        )

    def violations(self) -> List[str]:
        return [
            k
            for k, v in self.residuals.items()
            if k in self.tolerances and not _within(v, self.tolerances[k])
        ]

    @property
    def ok(self) -> bool:
        return self.status != CheckStatus.FAIL

    def __str__(self) -> str:
        return self.model_dump_json(indent=4)


class ExcludedSample(BaseModel):
    """A WNN sample where A*_x ξ vanishes and the ratio is undefined.
    The numerator is kept for the near-kernel diagnostic."""

    numerator: float
    denominator: float


class WnnEstimate(BaseModel):
    """Estimate of the WNN constant τ over a sample cloud

    Attributes:
        tau_hat (float): max over non-excluded samples of max(ratio, 0)
        max_ratio_sample (Dict[str, List[float]]): (x, xi) attaining tau_hat
        excluded_fraction (float): Share of samples with ||A*_x xi|| < kernel_eps
        near_kernel_diagnostic (float): Max numerator among excluded samples
        flags (List[str]): "Indeterminate", "NearKernelViolation"
    """

    tau_hat: float
    max_ratio_sample: Dict[str, List[float]] = {}
    excluded_fraction: float
    near_kernel_diagnostic: float = 0.0
    n_samples: int
    flags: List[str] = []

    @property
    def indeterminate(self) -> bool:
        return "Indeterminate" in self.flags


class NormSeries(BaseModel):
    """||ν(t)||² of a dual holonomy field with its exact first and second
    time derivatives"""

    times: List[float]
    norm_sq: List[float]
    d1: List[float]
    d2: List[float]


class CatalogEntry(BaseModel):
    id: str
    algebra: str
    description: str
    dim_k: int
    dim_q: int
    dim_m: int
    flags: List[str] = []


class Tolerances(BaseModel):
    tol_struct: float = TOL_STRUCT
    tol_check: float = TOL_CHECK
    kernel_eps: float = KERNEL_EPS
    fat_eps: float = FAT_EPS

    @field_validator("tol_struct", "tol_check", "kernel_eps", "fat_eps")
    @classmethod
    def positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("tolerances must be positive")
        return v


class SamplingConfig(BaseModel):
    n_x: int = N_SAMPLES
    n_xi: int = N_SAMPLES
    seed: int = DEFAULT_SEED
    include_basis: bool = True
    n_workers: int = 1

    @field_validator("n_x", "n_xi", "n_workers")
    @classmethod
    def at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("sample counts and n_workers must be >= 1")
        return v


class RunConfig(BaseModel):
    checks: List[str] = list(CHECK_ORDER)
    horizon: float = HORIZON
    grid_size: int = GRID_SIZE
    n_directions: int = N_DIRECTIONS
    n_deformations: int = N_DEFORMATIONS
    refine: bool = True
    with_oracles: bool = False
    csv: bool = True
    timing: bool = False

    @field_validator("checks")
    @classmethod
    def known_checks(cls, v: List[str]) -> List[str]:
        vocabulary = set(CHECK_ORDER) | {ORACLE_CHECK}
        unknown = [c for c in v if c not in vocabulary]
        if unknown:
            raise ValueError(
                f"Unknown checks {unknown}. Available: {', '.join(CHECK_ORDER)}"
            )
        return v

    @field_validator("horizon")
    @classmethod
    def positive_horizon(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("horizon T must be positive")
        return v

    @field_validator("grid_size")
    @classmethod
    def enough_points(cls, v: int) -> int:
        if v < 2:
            raise ValueError("grid_size must be >= 2")
        return v


class AlgebraSpec(BaseModel):
    """Either a catalog id or an explicit list of real square matrices"""

    catalog: Optional[str] = None
    matrices: Optional[List[List[List[float]]]] = None
    form_scale: float = 1.0
    labels: Optional[List[str]] = None

    @model_validator(mode="after")
    def one_source(self) -> "AlgebraSpec":
        if (self.catalog is None) == (self.matrices is None):
            raise ValueError("algebra needs exactly one of 'catalog' or 'matrices'")
        return self


class ChainSpec(BaseModel):
    """The chain 𝔨 ⊂ 𝔥 as index lists into the algebra basis,
    explicit coefficient vectors, or a catalog chain id."""

    catalog: Optional[str] = None
    h: Optional[List[int]] = None
    k: List[int] = []
    h_vectors: Optional[List[List[float]]] = None
    k_vectors: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def one_source(self) -> "ChainSpec":
        sources = [self.catalog, self.h, self.h_vectors]
        if sum(s is not None for s in sources) != 1:
            raise ValueError("chain needs exactly one of 'catalog', 'h' or 'h_vectors'")
        return self


class MetricSpec(BaseModel):
    P: Union[Literal["identity"], List[List[float]]] = "identity"

    @field_validator("P")
    @classmethod
    def symmetric(
        cls, v: Union[str, List[List[float]]]
    ) -> Union[str, List[List[float]]]:
        if isinstance(v, str):
            return v
        n = len(v)
        if any(len(row) != n for row in v):
            raise ValueError("P must be a square matrix")
        for i in range(n):
            for j in range(i + 1, n):
                if not math.isclose(v[i][j], v[j][i], rel_tol=1e-12, abs_tol=1e-12):
                    raise ValueError("P must be symmetric")
        return v


class ScenarioConfig(BaseModel):
    """Full description of one run: which submersion, which metric,
    how to sample and which checks to execute."""

    name: str = "scenario"
    scenario: Optional[str] = None
    algebra: Optional[AlgebraSpec] = None
    chain: Optional[ChainSpec] = None
    metric: MetricSpec = MetricSpec()
    sampling: SamplingConfig = SamplingConfig()
    tolerances: Tolerances = Tolerances()
    run: RunConfig = RunConfig()

    @model_validator(mode="after")
    def submersion_source(self) -> "ScenarioConfig":
        if self.scenario is None and (self.algebra is None or self.chain is None):
            raise ValueError(
                "config needs either a catalog 'scenario' or both 'algebra' and 'chain'"
            )
        return self
