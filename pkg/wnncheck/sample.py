from typing import Iterator, List, Optional, Tuple

import numpy as np

from wnncheck.connection import AdaptedMetric
from wnncheck.constants import DEFAULT_SEED, N_SAMPLES
from wnncheck.util import freeze, normalize


class SampleCloud:
    """Seeded unit vectors in 𝔪 and 𝔮 (the latter of unit g-norm).

    When include_basis is set the orthonormal basis directions come first,
    followed by n_x (n_xi) normalized Gaussian draws. Vectors are stored in
    algebra coordinates and in subspace coordinates.
    """

    def __init__(
        self,
        metric: AdaptedMetric,
        n_x: int = N_SAMPLES,
        n_xi: int = N_SAMPLES,
        seed: int = DEFAULT_SEED,
        include_basis: bool = True,
        refine: bool = False,
    ):
        """Draw a SampleCloud.

        Args:
            metric (AdaptedMetric): Metric used to normalize vertical vectors
            n_x (int): Number of random horizontal directions
            n_xi (int): Number of random vertical directions
            seed (int): Seed for np.random.default_rng
            include_basis (bool): Prepend the orthonormal basis directions
            refine (bool): Whether scans over this cloud run sphere refinement
        """
        triple = metric.triple
        rng = np.random.default_rng(seed)
        dm, dq = triple.dim_m, triple.dim_q

        xs_m: List[np.ndarray] = list(np.eye(dm)) if include_basis else []
        xis_q: List[np.ndarray] = []
        if include_basis:
            xis_q = [e / np.sqrt(metric.P[i, i]) for i, e in enumerate(np.eye(dq))]
        if dm:
            xs_m += [normalize(rng.standard_normal(dm)) for _ in range(n_x)]
        if dq:
            xis_q += [
                normalize(rng.standard_normal(dq), metric.P) for _ in range(n_xi)
            ]

        self.metric = metric
        self.seed = seed
        self.n_x = n_x
        self.n_xi = n_xi
        self.include_basis = include_basis
        self.refine = refine
        self.xs_m = freeze(np.array(xs_m).reshape(-1, dm))
        self.xis_q = freeze(np.array(xis_q).reshape(-1, dq))
        self.xs = freeze(self.xs_m @ triple.m_space.span)
        self.xis = freeze(self.xis_q @ triple.q_space.span)

    def __len__(self) -> int:
        return len(self.xs_m) * len(self.xis_q)

    def pairs(self) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
        """Yield (sample_id, x, xi) over the product of directions,
        in 𝔪- and 𝔮-coordinates"""
        sample_id = 0
        for x in self.xs_m:
            for xi in self.xis_q:
                yield sample_id, x, xi
                sample_id += 1

    def horizontal_pairs(self) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Yield pairs (x_i, x_j), i < j, of horizontal directions"""
        for i in range(len(self.xs_m)):
            for j in range(i + 1, len(self.xs_m)):
                yield self.xs_m[i], self.xs_m[j]

    def rng(self, offset: int = 0) -> np.random.Generator:
        """A generator derived from the cloud seed, for follow-up sampling"""
        return np.random.default_rng([self.seed, offset])

    def __repr__(self) -> str:
        return (
            f"SampleCloud(seed={self.seed}, n_x={len(self.xs_m)}, "
            f"n_xi={len(self.xis_q)})"
        )


def sample_cloud(
    metric: AdaptedMetric,
    n_x: int = N_SAMPLES,
    n_xi: int = N_SAMPLES,
    seed: Optional[int] = None,
    include_basis: bool = True,
    refine: bool = False,
) -> SampleCloud:
    return SampleCloud(
        metric,
        n_x=n_x,
        n_xi=n_xi,
        seed=DEFAULT_SEED if seed is None else seed,
        include_basis=include_basis,
        refine=refine,
    )
