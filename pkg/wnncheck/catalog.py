"""Catalog of homogeneous submersions G/K → G/H used as test scenarios."""

from typing import Callable, List, Optional, Union

import catalogue
import numpy as np

from wnncheck.connection import SubmersionTriple
from wnncheck.constants import TOL_STRUCT
from wnncheck.errors import ConfigError
from wnncheck.liealg import (
    LieAlgebraBasis,
    Subspace,
    berger_generators,
    build_algebra,
)
from wnncheck.types import CatalogEntry, ChainSpec


class registry:
    scenarios = catalogue.create("wnncheck", "scenarios", entry_points=True)


ChainFactory = Callable[[LieAlgebraBasis], SubmersionTriple]


class CatalogChain:
    """A registered chain 𝔨 ⊂ 𝔥 ⊂ 𝔤 together with the catalog algebra it
    lives in and a short description"""

    def __init__(
        self,
        name: str,
        algebra: str,
        description: str,
        factory: ChainFactory,
        flags: List[str],
    ):
        self.name = name
        self.algebra = algebra
        self.description = description
        self.factory = factory
        self.flags = flags

    def __call__(self, tol_struct: float = TOL_STRUCT) -> SubmersionTriple:
        alg = build_algebra(self.algebra, tol_struct=tol_struct)
        return self.factory(alg)

    def __repr__(self) -> str:
        return f"CatalogChain({self.name}, algebra={self.algebra})"


class catalog_chain:
    """Decorator registering a chain factory as a catalog scenario.

    ```
    @catalog_chain("hopf", algebra="su2", description="S³ → S²")
    def hopf(alg: LieAlgebraBasis) -> SubmersionTriple:
        ...
    ```
    """

    def __init__(
        self, name: str, *, algebra: str, description: str, flags: List[str] = []
    ):
        self.name = name
        self.algebra = algebra
        self.description = description
        self.flags = flags

    def __call__(self, factory: ChainFactory) -> ChainFactory:
        registry.scenarios.register(self.name)(
            CatalogChain(
                self.name, self.algebra, self.description, factory, list(self.flags)
            )
        )
        return factory


def _span(alg: LieAlgebraBasis, labels: List[str], name: str) -> Subspace:
    return Subspace(alg, np.array([alg.e(label) for label in labels]), name=name)


@catalog_chain(
    "hopf",
    algebra="su2",
    description="su2/u1: Hopf fibration S³ → S², K trivial",
    flags=["fat"],
)
def hopf(alg: LieAlgebraBasis) -> SubmersionTriple:
    return SubmersionTriple(alg, _span(alg, ["E1"], "𝔥"), name="hopf")


@catalog_chain(
    "torus",
    algebra="u1xu1",
    description="u1xu1/u1: T² → S¹, K trivial",
    flags=["all-flat", "abelian"],
)
def torus(alg: LieAlgebraBasis) -> SubmersionTriple:
    return SubmersionTriple(alg, _span(alg, ["e1"], "𝔥"), name="torus")


@catalog_chain(
    "so4_s3",
    algebra="so4",
    description="so4/so3: SO(4) → S³, K trivial",
    flags=["not-fat"],
)
def so4_s3(alg: LieAlgebraBasis) -> SubmersionTriple:
    h = _span(alg, ["L12", "L13", "L23"], "𝔥")
    return SubmersionTriple(alg, h, name="so4_s3")


@catalog_chain(
    "berger",
    algebra="so5",
    description="so5/so3_irr: Spin(5) → B⁷, so3 irreducible, K trivial",
)
def berger(alg: LieAlgebraBasis) -> SubmersionTriple:
    rows = np.array([alg.coordinates(m) for m in berger_generators()])
    return SubmersionTriple(alg, Subspace(alg, rows, name="𝔥"), name="berger")


@catalog_chain(
    "stiefel",
    algebra="so4",
    description="so4/so2 → so4/so3: V₄,₂ → S³, K = SO(2)",
    flags=["k-nontrivial"],
)
def stiefel(alg: LieAlgebraBasis) -> SubmersionTriple:
    h = _span(alg, ["L12", "L13", "L23"], "𝔥")
    k = _span(alg, ["L12"], "𝔨")
    return SubmersionTriple(alg, h, k, name="stiefel")


def build_triple(
    spec: Union[str, ChainSpec],
    algebra: Optional[LieAlgebraBasis] = None,
    tol_struct: float = TOL_STRUCT,
) -> SubmersionTriple:
    """Build a SubmersionTriple from a catalog id or a chain spec.

    Args:
        spec (Union[str, ChainSpec]): Catalog id or chain spec
        algebra (LieAlgebraBasis, optional): Algebra the chain spec indexes into.
            Required unless the spec names a catalog chain
        tol_struct (float): Structural tolerance for catalog algebras

    Raises:
        ConfigError: If the id is unknown, indices are out of range or
            the algebra is missing
        NotClosed: If the chain violates an algebraic invariant

    Returns:
        SubmersionTriple: The split 𝔤 = 𝔨 ⊕ 𝔮 ⊕ 𝔪
    """
    if isinstance(spec, ChainSpec) and spec.catalog is not None:
        spec = spec.catalog
    if isinstance(spec, str):
        try:
            chain = registry.scenarios.get(spec)
        except catalogue.RegistryError:
            available = ", ".join(sorted(registry.scenarios.get_all()))
            raise ConfigError(
                f"Unknown catalog scenario '{spec}'. Available: {available}"
            ) from None
        if algebra is not None and algebra.name == chain.algebra:
            return chain.factory(algebra)
        return chain(tol_struct)

    if algebra is None:
        raise ConfigError("A chain spec without a catalog id needs an algebra")
    h_rows = _rows(algebra, spec.h, spec.h_vectors, "h")
    k_rows = _rows(algebra, spec.k, spec.k_vectors, "k")
    h = Subspace(algebra, h_rows, name="𝔥")
    k = Subspace(algebra, k_rows, name="𝔨") if len(k_rows) else None
    return SubmersionTriple(algebra, h, k, name="custom")


def _rows(
    alg: LieAlgebraBasis,
    indices: Optional[List[int]],
    vectors: Optional[List[List[float]]],
    name: str,
) -> np.ndarray:
    if vectors is not None:
        return np.asarray(vectors, dtype=float).reshape(-1, alg.dim)
    indices = indices or []
    bad = [i for i in indices if not 0 <= i < alg.dim]
    if bad:
        raise ConfigError(
            f"Indices {bad} in chain '{name}' are out of range for dim {alg.dim}"
        )
    return np.eye(alg.dim)[indices].reshape(-1, alg.dim)


def list_catalog(tol_struct: float = TOL_STRUCT) -> List[CatalogEntry]:
    """All catalog scenarios with the dimensions of 𝔨, 𝔮 and 𝔪

    Returns:
        List[CatalogEntry]: One entry per registered scenario, sorted by id
    """
    entries = []
    for name, chain in sorted(registry.scenarios.get_all().items()):
        triple = chain(tol_struct)
        entries.append(
            CatalogEntry(
                id=name,
                algebra=chain.algebra,
                description=chain.description,
                dim_k=triple.dim_k,
                dim_q=triple.dim_q,
                dim_m=triple.dim_m,
                flags=chain.flags,
            )
        )
    return entries
