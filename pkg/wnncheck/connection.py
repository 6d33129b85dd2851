"""Levi-Civita connection and curvature of invariant adapted metrics on G/K.

Everything is expressed in orthonormal coordinates of 𝔭 = 𝔮 ⊕ 𝔪, with the
𝔮-coordinates first. Public operations take and return coefficient vectors
in the basis of the ambient algebra, so certificates always live in one
coordinate system.
"""

from typing import Any, Optional

import numpy as np
from scipy.linalg import block_diag, expm, null_space

from wnncheck.errors import (
    DimensionMismatch,
    InvalidP,
    NotClosed,
    NotHorizontal,
    NotInP,
    NotVertical,
)
from wnncheck.liealg import LieAlgebraBasis, Subspace, gram_schmidt
from wnncheck.types import CheckReport, Tolerances
from wnncheck.util import as_vector, freeze


class SubmersionTriple:
    """The chain 𝔨 ⊂ 𝔥 ⊂ 𝔤 split as 𝔤 = 𝔨 ⊕ 𝔮 ⊕ 𝔪.

    𝔮 is the complement of 𝔨 in 𝔥 (vertical), 𝔪 the complement of 𝔥
    in 𝔤 (horizontal). Construction fails with NotClosed if 𝔥 or 𝔨 is
    not a subalgebra or if ℋ is not invariant.
    """

    def __init__(
        self,
        algebra: LieAlgebraBasis,
        h_space: Subspace,
        k_space: Optional[Subspace] = None,
        name: str = "custom",
    ):
        """Initialize a SubmersionTriple.

        Args:
            algebra (LieAlgebraBasis): The algebra 𝔤
            h_space (Subspace): The subalgebra 𝔥
            k_space (Subspace, optional): The subalgebra 𝔨 ⊂ 𝔥. Trivial if None
            name (str): Scenario name

        Raises:
            NotClosed: If an algebraic invariant of the chain is violated
        """
        if k_space is None:
            k_space = Subspace(algebra, np.zeros((0, algebra.dim)), name="𝔨")
        self._algebra = algebra
        self._name = name
        self._h = h_space
        self._k = Subspace(algebra, k_space.span, name="𝔨")

        for row in self._k.span:
            if not h_space.contains(row):
                raise NotClosed("𝔨 is not contained in 𝔥")

        k_proj = self._k.span.T @ self._k.span @ algebra.gram
        q_rows = gram_schmidt(
            h_space.span - h_space.span @ k_proj.T, algebra.gram, drop_dependent=True
        )
        self._q = Subspace(algebra, q_rows, name="𝔮")
        self._m = h_space.complement(name="𝔪")
        self._p = Subspace(algebra, np.vstack([self._q.span, self._m.span]), name="𝔭")

        self._build_tables()
        self._validate()

    def _build_tables(self) -> None:
        alg = self._algebra
        p_rows = self._p.span
        k_rows = self._k.span
        # Bp[a, b, :] = pr_𝔭[p_a, p_b], Bk[a, b, :] = pr_𝔨[p_a, p_b]
        brackets = np.einsum("ai,bj,ijk->abk", p_rows, p_rows, alg.structure_constants)
        self._Bp = freeze(brackets @ alg.gram @ p_rows.T)
        self._Bk = freeze(brackets @ alg.gram @ k_rows.T)
        # Kp[κ, b, :] = pr_𝔭[k_κ, p_b]
        k_brackets = np.einsum(
            "ai,bj,ijk->abk", k_rows, p_rows, alg.structure_constants
        )
        self._Kp = freeze(k_brackets @ alg.gram @ p_rows.T)

    def _validate(self) -> None:
        alg = self._algebra
        tol = alg.tol_struct
        dims = self._k.rank + self._q.rank + self._m.rank
        if dims != alg.dim:
            raise NotClosed(f"dims of 𝔨, 𝔮, 𝔪 sum to {dims}, expected {alg.dim}")
        for name, residual in self.invariant_residuals().items():
            if residual > tol:
                raise NotClosed(f"Chain invariant '{name}' violated: {residual:.3e}")

    def invariant_residuals(self) -> dict:
        """Residuals of the algebraic invariants of the chain"""
        alg = self._algebra
        c = alg.structure_constants

        def leak(a_rows: np.ndarray, b_rows: np.ndarray, target: Subspace) -> float:
            if not len(a_rows) or not len(b_rows):
                return 0.0
            brackets = np.einsum("ai,bj,ijk->abk", a_rows, b_rows, c)
            return max(target.residual(v) for v in brackets.reshape(-1, alg.dim))

        k, q, m, h = self._k.span, self._q.span, self._m.span, self._h.span
        cross = np.vstack([k, q, m])
        gram_cross = cross @ alg.gram @ cross.T - np.eye(len(cross))
        return {
            "h_subalgebra": leak(h, h, self._h),
            "k_subalgebra": leak(k, k, self._k),
            "k_q_invariant": leak(k, q, self._q),
            "h_m_invariant": leak(h, m, self._m),
            "orthogonality": float(np.abs(gram_cross).max()) if cross.size else 0.0,
        }

    def validate(self, tol: Optional[float] = None) -> CheckReport:
        tol = self._algebra.tol_struct if tol is None else tol
        residuals = self.invariant_residuals()
        return CheckReport.from_residuals(
            "validate_triple",
            residuals,
            {k: tol for k in residuals},
            statistics={
                "dim_k": float(self.dim_k),
                "dim_q": float(self.dim_q),
                "dim_m": float(self.dim_m),
            },
        )

    @property
    def name(self) -> str:
        return self._name

    @property
    def algebra(self) -> LieAlgebraBasis:
        return self._algebra

    @property
    def h_space(self) -> Subspace:
        return self._h

    @property
    def k_space(self) -> Subspace:
        return self._k

    @property
    def q_space(self) -> Subspace:
        return self._q

    @property
    def m_space(self) -> Subspace:
        return self._m

    @property
    def p_space(self) -> Subspace:
        return self._p

    @property
    def dim_k(self) -> int:
        return self._k.rank

    @property
    def dim_q(self) -> int:
        return self._q.rank

    @property
    def dim_m(self) -> int:
        return self._m.rank

    @property
    def dim_p(self) -> int:
        return self._p.rank

    @property
    def bracket_p(self) -> np.ndarray:
        return self._Bp

    @property
    def bracket_k(self) -> np.ndarray:
        return self._Bk

    @property
    def k_action(self) -> np.ndarray:
        return self._Kp

    @property
    def q_slice(self) -> slice:
        return slice(0, self.dim_q)

    @property
    def m_slice(self) -> slice:
        return slice(self.dim_q, self.dim_p)

    def _tol(self, v: np.ndarray) -> float:
        return self._algebra.tol_struct * max(1.0, float(np.linalg.norm(v)))

    def to_p(self, v: Any, name: str = "vector") -> np.ndarray:
        """𝔭-coordinates of an algebra vector

        Raises:
            NotInP: If v has a 𝔨-component above tolerance
        """
        v = as_vector(v, self._algebra.dim, name)
        if self._p.residual(v) > self._tol(v):
            raise NotInP(f"{name} has a component along 𝔨")
        return self._p.coordinates(v)

    def to_m(self, v: Any, name: str = "x") -> np.ndarray:
        """𝔪-coordinates of a horizontal algebra vector

        Raises:
            NotHorizontal: If v leaves 𝔪
        """
        v = as_vector(v, self._algebra.dim, name)
        if self._m.residual(v) > self._tol(v):
            raise NotHorizontal(f"{name} is not horizontal")
        return self._m.coordinates(v)

    def to_q(self, v: Any, name: str = "xi") -> np.ndarray:
        """𝔮-coordinates of a vertical algebra vector

        Raises:
            NotVertical: If v leaves 𝔮
        """
        v = as_vector(v, self._algebra.dim, name)
        if self._q.residual(v) > self._tol(v):
            raise NotVertical(f"{name} is not vertical")
        return self._q.coordinates(v)

    def from_p(self, coords: np.ndarray) -> np.ndarray:
        return self._p.lift(coords)

    def from_m(self, coords: np.ndarray) -> np.ndarray:
        return self._m.lift(coords)

    def from_q(self, coords: np.ndarray) -> np.ndarray:
        return self._q.lift(coords)

    def embed_m(self, m_coords: np.ndarray) -> np.ndarray:
        """𝔭-coordinates of an 𝔪-coordinate vector"""
        out = np.zeros(self.dim_p)
        out[self.m_slice] = m_coords
        return out

    def embed_q(self, q_coords: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim_p)
        out[self.q_slice] = q_coords
        return out

    def ad_p(self, z: np.ndarray) -> np.ndarray:
        """Matrix of w ↦ pr_𝔭[z, w] on 𝔭 for z in 𝔭-coordinates"""
        return np.einsum("a,abc->cb", z, self._Bp)

    def ad_k(self, u: np.ndarray) -> np.ndarray:
        """Matrix of w ↦ [u, w] on 𝔭 for u in 𝔨-coordinates"""
        return np.einsum("k,kbc->cb", u, self._Kp)

    def bracket_parts(self, x: np.ndarray, y: np.ndarray):
        """(pr_𝔭[x, y], pr_𝔨[x, y]) for x, y in 𝔭-coordinates"""
        return (
            np.einsum("a,b,abc->c", x, y, self._Bp),
            np.einsum("a,b,abk->k", x, y, self._Bk),
        )

    def __repr__(self) -> str:
        return (
            f"SubmersionTriple({self._name}, {self._algebra.name}, "
            f"k={self.dim_k}, q={self.dim_q}, m={self.dim_m})"
        )


class LinearMap:
    """Linear map between two subspaces in their orthonormal coordinates"""

    def __init__(self, domain: Subspace, codomain: Subspace, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (codomain.rank, domain.rank):
            raise DimensionMismatch(
                f"Matrix shape {matrix.shape} does not match "
                f"({codomain.rank}, {domain.rank})"
            )
        self.domain = domain
        self.codomain = codomain
        self.matrix = freeze(matrix)

    def __call__(self, v: Any) -> np.ndarray:
        """Apply the map to an algebra vector in the domain,
        returning an algebra vector in the codomain"""
        v = as_vector(v, self.domain.parent.dim, "v")
        return self.codomain.lift(self.matrix @ self.domain.coordinates(v))

    def __repr__(self) -> str:
        return f"LinearMap({self.domain.name} -> {self.codomain.name})"


class AdaptedMetric:
    """Invariant adapted metric on G/K: the normal metric on 𝔪 and
    g(ξ, η) = ⟨Pξ, η⟩ on 𝔮.

    Precomputes the Nomizu tensor so that N_z = Σ z_a N[a].
    """

    def __init__(
        self,
        triple: SubmersionTriple,
        P: Optional[Any] = None,
        tolerances: Optional[Tolerances] = None,
    ):
        """Initialize an AdaptedMetric.

        Args:
            triple (SubmersionTriple): The submersion
            P (array-like, optional): Vertical tensor in 𝔮-coordinates.
                The normal metric (identity) if None
            tolerances (Tolerances, optional): Tolerances used by reports

        Raises:
            InvalidP: If P is not symmetric, positive-definite and Ad(𝔨)-invariant
        """
        dq = triple.dim_q
        P = np.eye(dq) if P is None else np.asarray(P, dtype=float)
        if P.shape != (dq, dq):
            raise InvalidP(f"P must be {dq}x{dq} to match dim 𝔮, got {P.shape}")
        tol = triple.algebra.tol_struct
        scale = max(1.0, float(np.abs(P).max())) if P.size else 1.0
        if P.size and np.abs(P - P.T).max() > tol * scale:
            raise InvalidP("P is not symmetric")
        if P.size and np.linalg.eigvalsh(P).min() <= 0:
            raise InvalidP("P is not positive-definite")

        self._triple = triple
        self._P = freeze(0.5 * (P + P.T))
        self._tolerances = tolerances or Tolerances()

        invariance = self.invariance_residual()
        if invariance > tol * scale:
            raise InvalidP(f"P is not Ad(𝔨)-invariant (residual {invariance:.3e})")

        self._gram_p = freeze(block_diag(self._P, np.eye(triple.dim_m)))
        self._gram_p_inv = freeze(np.linalg.inv(self._gram_p))
        self._P_inv = freeze(np.linalg.inv(self._P) if dq else self._P)
        self._nomizu = freeze(
            np.stack([self._nomizu_matrix(e) for e in np.eye(triple.dim_p)])
            if triple.dim_p
            else np.zeros((0, 0, 0))
        )

    def _nomizu_matrix(self, z: np.ndarray) -> np.ndarray:
        t = self._triple
        Bp = t.bracket_p
        G = self._gram_p
        ad_z = t.ad_p(z)
        t1 = np.einsum("vbc,b,cj->vj", Bp, z, G)
        t2 = np.einsum("vjc,c->vj", Bp, G @ z)
        return 0.5 * ad_z + 0.5 * self._gram_p_inv @ (t1 + t2)

    @property
    def triple(self) -> SubmersionTriple:
        return self._triple

    @property
    def P(self) -> np.ndarray:
        return self._P

    @property
    def P_inv(self) -> np.ndarray:
        return self._P_inv

    @property
    def gram_p(self) -> np.ndarray:
        return self._gram_p

    @property
    def tolerances(self) -> Tolerances:
        return self._tolerances

    @property
    def is_normal(self) -> bool:
        return bool(np.array_equal(self._P, np.eye(self._triple.dim_q)))

    def invariance_residual(self) -> float:
        """max over 𝔨 basis z of ‖P∘ad(z)|𝔮 − ad(z)|𝔮∘P‖"""
        t = self._triple
        worst = 0.0
        if t.dim_q == 0:
            return worst
        for z in np.eye(t.dim_k):
            ad = t.ad_k(z)[t.q_slice, t.q_slice]
            worst = max(worst, float(np.abs(self._P @ ad - ad @ self._P).max()))
        return worst

    def inner_p(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(a @ self._gram_p @ b)

    def inner_q(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(a @ self._P @ b)

    def norm_q(self, a: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner_q(a, a), 0.0)))

    def N(self, z: np.ndarray) -> np.ndarray:
        """Nomizu matrix N_z on 𝔭 for z in 𝔭-coordinates"""
        return np.einsum("a,abc->bc", z, self._nomizu)

    def curvature_p(self, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        """R(x, y)z with all arguments in 𝔭-coordinates"""
        t = self._triple
        Nx, Ny = self.N(x), self.N(y)
        bp, bk = t.bracket_parts(x, y)
        return Nx @ (Ny @ z) - Ny @ (Nx @ z) - self.N(bp) @ z - t.ad_k(bk) @ z

    def sectional_p(self, x: np.ndarray, y: np.ndarray) -> float:
        return self.inner_p(self.curvature_p(x, y, y), x)

    def deformed(self, P_rel: Any) -> "AdaptedMetric":
        """The metric g' with g'(ξ, η) = g(P_rel ξ, η) on 𝔮

        Raises:
            InvalidP: If the resulting vertical tensor is not admissible
        """
        P_rel = np.asarray(P_rel, dtype=float)
        return AdaptedMetric(self._triple, self._P @ P_rel, self._tolerances)

    def __repr__(self) -> str:
        return f"AdaptedMetric({self._triple.name}, normal={self.is_normal})"


class ParallelPropagator:
    """Parallel transport along t ↦ exp(tx)·o in the frame carried by the
    isometries exp(tx). The flow at t is exp(−t N_x)."""

    def __init__(self, metric: AdaptedMetric, x: np.ndarray, generator: np.ndarray):
        self.metric = metric
        self.x = freeze(x)
        self.generator = freeze(generator)

    def flow(self, t: float) -> np.ndarray:
        return expm(t * self.generator)

    def transport(self, t: float, w: Any) -> np.ndarray:
        triple = self.metric.triple
        return triple.from_p(self.flow(t) @ triple.to_p(w, "w"))


def nomizu_operator(metric: AdaptedMetric, z: Any) -> LinearMap:
    """Nomizu operator N_z = ½ pr_𝔭 ad(z) + U(z, ·) on 𝔭.

    Args:
        metric (AdaptedMetric): Adapted metric
        z (array-like): Vector in 𝔭, algebra coordinates

    Raises:
        NotInP: If z has a component along 𝔨

    Returns:
        LinearMap: N_z as a map 𝔭 → 𝔭
    """
    t = metric.triple
    return LinearMap(t.p_space, t.p_space, metric.N(t.to_p(z, "z")))


def curvature_tensor(metric: AdaptedMetric, x: Any, y: Any, z: Any) -> np.ndarray:
    """R(x, y)z = N_x N_y z − N_y N_x z − N_{pr_𝔭[x,y]} z − [pr_𝔨[x,y], z]

    Raises:
        NotInP: If an argument has a component along 𝔨
    """
    t = metric.triple
    r = metric.curvature_p(t.to_p(x, "x"), t.to_p(y, "y"), t.to_p(z, "z"))
    return t.from_p(r)


def sectional_curvature(metric: AdaptedMetric, x: Any, y: Any) -> float:
    """Unreduced sectional curvature ⟨R(x, y)y, x⟩_g (no denominator)

    Raises:
        NotInP: If x or y has a component along 𝔨
    """
    t = metric.triple
    return metric.sectional_p(t.to_p(x, "x"), t.to_p(y, "y"))


def parallel_propagator(metric: AdaptedMetric, x: Any) -> ParallelPropagator:
    """Parallel transport along the horizontal geodesic exp(tx)·o

    Raises:
        NotHorizontal: If x is not in 𝔪
    """
    t = metric.triple
    xp = t.embed_m(t.to_m(x))
    return ParallelPropagator(metric, xp, -metric.N(xp))


def base_metric(metric: AdaptedMetric) -> AdaptedMetric:
    """Normal metric of the base G/H, modelled by the reductive pair (𝔥, 𝔪)"""
    t = metric.triple
    base = SubmersionTriple(t.algebra, t.h_space, t.h_space, name=f"{t.name}_base")
    return AdaptedMetric(base, None, metric.tolerances)


def _random_p(metric: AdaptedMetric, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(metric.triple.dim_p)


def metric_skewness_residual(
    metric: AdaptedMetric, n_samples: int = 100, seed: int = 0
) -> float:
    """max over seeded random (z, w, v) of |⟨N_z w, v⟩_g + ⟨w, N_z v⟩_g|"""
    rng = np.random.default_rng(seed)
    G = metric.gram_p
    worst = 0.0
    for _ in range(n_samples):
        z, w, v = (_random_p(metric, rng) for _ in range(3))
        Nz = metric.N(z)
        worst = max(worst, abs((Nz @ w) @ G @ v + w @ G @ (Nz @ v)))
    return float(worst)


def curvature_symmetry_check(
    metric: AdaptedMetric, n_samples: int = 200, seed: int = 0
) -> CheckReport:
    """Antisymmetry, pair symmetry and first Bianchi identity of R on
    seeded random quadruples, together with g-skewness of N.

    Args:
        metric (AdaptedMetric): Adapted metric
        n_samples (int): Number of random quadruples
        seed (int): Seed for the generator

    Returns:
        CheckReport: pass iff every residual is within tol_check
    """
    rng = np.random.default_rng(seed)
    G = metric.gram_p
    anti = pair = bianchi = 0.0
    for _ in range(n_samples):
        x, y, z, w = (_random_p(metric, rng) for _ in range(4))
        rxy = metric.curvature_p(x, y, z)
        anti = max(anti, float(np.abs(rxy + metric.curvature_p(y, x, z)).max()))
        lhs = rxy @ G @ w
        rhs = metric.curvature_p(z, w, x) @ G @ y
        pair = max(pair, abs(lhs - rhs))
        cyc = rxy + metric.curvature_p(y, z, x) + metric.curvature_p(z, x, y)
        bianchi = max(bianchi, float(np.abs(cyc).max()))
    residuals = {
        "antisymmetry": anti,
        "pair_symmetry": float(pair),
        "bianchi": bianchi,
        "nomizu_skewness": metric_skewness_residual(metric, n_samples, seed),
    }
    tol = metric.tolerances.tol_check
    return CheckReport.from_residuals(
        "curvature_symmetry", residuals, {k: tol for k in residuals}
    )


def random_admissible_P(
    triple: SubmersionTriple, rng: np.random.Generator, spread: float = 0.5
) -> np.ndarray:
    """Random symmetric positive-definite P commuting with ad(𝔨)|𝔮.

    The symmetric commutant of ad(𝔨)|𝔮 is computed as a null space and a
    random element S of it gives P = I + spread·S/‖S‖, so the eigenvalues
    of P lie in [1 − spread, 1 + spread].

    Args:
        triple (SubmersionTriple): The submersion
        rng (np.random.Generator): Random generator
        spread (float): Maximum deviation of the eigenvalues from 1, below 1

    Returns:
        np.ndarray: Admissible P in 𝔮-coordinates
    """
    dq = triple.dim_q
    if dq == 0:
        return np.zeros((0, 0))
    sym_basis = []
    for i in range(dq):
        for j in range(i, dq):
            e = np.zeros((dq, dq))
            e[i, j] = e[j, i] = 1.0
            sym_basis.append(e)
    constraints = []
    for z in np.eye(triple.dim_k):
        ad = triple.ad_k(z)[triple.q_slice, triple.q_slice]
        constraints.append(np.stack([(e @ ad - ad @ e).ravel() for e in sym_basis], 1))
    if constraints:
        coeffs = null_space(np.vstack(constraints))
    else:
        coeffs = np.eye(len(sym_basis))
    weights = coeffs @ rng.standard_normal(coeffs.shape[1])
    S = np.einsum("i,ijk->jk", weights, np.stack(sym_basis))
    S_norm = np.linalg.norm(S, 2)
    if S_norm == 0:
        return np.eye(dq)
    return np.eye(dq) + spread * S / S_norm
