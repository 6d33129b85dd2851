"""The Gray-O'Neill tensors A, A* and S of G/K → G/H and the identities
they satisfy when the fibers are totally geodesic.

Sign convention: A_x y := pr_𝔮(N_x y), which equals ½ pr_𝔮[x, y] and agrees
with half the vertical part of the bracket of horizontal extensions.
"""

import weakref
from typing import Any, Optional

import numpy as np

from wnncheck.connection import AdaptedMetric, base_metric
from wnncheck.sample import SampleCloud
from wnncheck.types import CheckReport, CheckStatus
from wnncheck.util import freeze


class OneillTensors:
    """Tables of A_x: 𝔪 → 𝔮, A*_x: 𝔮 → 𝔪 and S_x: 𝔮 → 𝔮 for each
    basis vector x of 𝔪. All maps are linear in x, so general x is a
    contraction with the tables."""

    def __init__(self, metric: AdaptedMetric):
        triple = metric.triple
        q, m = triple.q_slice, triple.m_slice
        self.metric = metric
        self.triple = triple

        a_maps, a_star_maps, s_maps = [], [], []
        q_nomizu = [metric.N(triple.embed_q(e))[q, m] for e in np.eye(triple.dim_q)]
        for e in np.eye(triple.dim_m):
            Nx = metric.N(triple.embed_m(e))
            A = Nx[q, m]
            a_maps.append(A)
            a_star_maps.append(A.T @ metric.P)
            # S_x ξ = −pr_𝔮 N_ξ x
            S = np.zeros((triple.dim_q, triple.dim_q))
            for j, Nq in enumerate(q_nomizu):
                S[:, j] = -Nq @ e
            s_maps.append(S)

        dq, dm = triple.dim_q, triple.dim_m
        self.a_maps = freeze(np.array(a_maps).reshape(dm, dq, dm))
        self.a_star_maps = freeze(np.array(a_star_maps).reshape(dm, dm, dq))
        self.s_maps = freeze(np.array(s_maps).reshape(dm, dq, dq))

    def A(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,ijk->jk", x, self.a_maps)

    def A_star(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,ijk->jk", x, self.a_star_maps)

    def S(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,ijk->jk", x, self.s_maps)

    def nabla_A_star(self, z: np.ndarray, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """(∇_z A*)_x ξ with z, x in 𝔪-coordinates and ξ in 𝔮-coordinates"""
        triple = self.triple
        q, m = triple.q_slice, triple.m_slice
        Nz = self.metric.N(triple.embed_m(z))
        value = self.A_star(x) @ xi
        term = (Nz @ triple.embed_m(value))[m]
        term = term - self.A_star((Nz @ triple.embed_m(x))[m]) @ xi
        term = term - self.A_star(x) @ (Nz @ triple.embed_q(xi))[q]
        return term

    def residuals(self) -> dict:
        """Structural residuals of the tables over basis triples"""
        triple = self.triple
        P = self.metric.P
        dm = triple.dim_m
        if not (dm and triple.dim_q):
            names = ("antisymmetry", "duality", "orthogonality", "s_symmetry")
            return {k: 0.0 for k in names}
        anti = max(float(np.abs(self.A(e) @ e).max()) for e in np.eye(dm))
        # ⟨A*_x ξ, y⟩ = ⟨A_x y, ξ⟩_g for basis x, y, ξ
        lhs = self.a_star_maps.transpose(0, 2, 1)
        rhs = np.einsum("ijk,jl->ilk", self.a_maps, P)
        duality = float(np.abs(lhs - rhs).max())
        ortho = max(float(np.abs(e @ self.A_star(e)).max()) for e in np.eye(dm))
        ps = np.einsum("ij,xjk->xik", P, self.s_maps)
        symmetry = float(np.abs(ps - ps.transpose(0, 2, 1)).max())
        return {
            "antisymmetry": anti,
            "duality": duality,
            "orthogonality": ortho,
            "s_symmetry": symmetry,
        }


_TENSORS: "weakref.WeakKeyDictionary[AdaptedMetric, OneillTensors]" = (
    weakref.WeakKeyDictionary()
)


def tensors_for(metric: AdaptedMetric) -> OneillTensors:
    """Cached OneillTensors of a metric"""
    tensors = _TENSORS.get(metric)
    if tensors is None:
        tensors = OneillTensors(metric)
        _TENSORS[metric] = tensors
    return tensors


def a_tensor(metric: AdaptedMetric, x: Any, y: Any) -> np.ndarray:
    """A_x y = pr_𝔮(N_x y)

    Args:
        metric (AdaptedMetric): Adapted metric. The value does not depend on P
        x (array-like): Horizontal vector, algebra coordinates
        y (array-like): Horizontal vector, algebra coordinates

    Raises:
        NotHorizontal: If x or y is not in 𝔪

    Returns:
        np.ndarray: Vertical vector, algebra coordinates
    """
    t = metric.triple
    xm, ym = t.to_m(x, "x"), t.to_m(y, "y")
    return t.from_q(tensors_for(metric).A(xm) @ ym)


def a_star(metric: AdaptedMetric, x: Any, xi: Any) -> np.ndarray:
    """g-dual A*_x ξ of the A-tensor

    Raises:
        NotHorizontal: If x is not in 𝔪
        NotVertical: If xi is not in 𝔮
    """
    t = metric.triple
    xm, xiq = t.to_m(x, "x"), t.to_q(xi, "xi")
    return t.from_m(tensors_for(metric).A_star(xm) @ xiq)


def s_tensor(metric: AdaptedMetric, x: Any, xi: Any) -> np.ndarray:
    """Second fundamental form of the fibers, S_x ξ = −pr_𝔮(N_ξ x)

    Raises:
        NotHorizontal: If x is not in 𝔪
        NotVertical: If xi is not in 𝔮
    """
    t = metric.triple
    xm, xiq = t.to_m(x, "x"), t.to_q(xi, "xi")
    return t.from_q(tensors_for(metric).S(xm) @ xiq)


def nabla_a_star(metric: AdaptedMetric, z: Any, x: Any, xi: Any) -> np.ndarray:
    """(∇_z A*)_x ξ = pr_𝔪 N_z(A*_x ξ) − A*_{pr_𝔪 N_z x} ξ − A*_x(pr_𝔮 N_z ξ)

    Raises:
        NotHorizontal: If z or x is not in 𝔪
        NotVertical: If xi is not in 𝔮
    """
    t = metric.triple
    zm, xm, xiq = t.to_m(z, "z"), t.to_m(x, "x"), t.to_q(xi, "xi")
    return t.from_m(tensors_for(metric).nabla_A_star(zm, xm, xiq))


def s_tensor_norm(metric: AdaptedMetric) -> float:
    """max g-norm of S_x ξ over basis pairs"""
    tensors = tensors_for(metric)
    if not tensors.s_maps.size:
        return 0.0
    sq = np.einsum("xiq,ij,xjq->xq", tensors.s_maps, metric.P, tensors.s_maps)
    return float(np.sqrt(max(sq.max(), 0.0)))


def _default_cloud(metric: AdaptedMetric, cloud: Optional[SampleCloud]) -> SampleCloud:
    return SampleCloud(metric) if cloud is None else cloud


def tg_identity_check(
    metric: AdaptedMetric, cloud: Optional[SampleCloud] = None
) -> CheckReport:
    """O'Neill identities for totally geodesic fibers on sampled (X, ξ):
    R(X, A*_Xξ, ξ, X) = ⟨(∇_X A*)_X ξ, A*_X ξ⟩ and K(ξ, X) = ‖A*_X ξ‖².

    Args:
        metric (AdaptedMetric): Adapted metric
        cloud (SampleCloud, optional): Samples. A default seeded cloud if None

    Returns:
        CheckReport: not_applicable unless S vanishes, else pass iff both
            residuals are within tol_check
    """
    tol = metric.tolerances.tol_check
    s_norm = s_tensor_norm(metric)
    if s_norm > tol:
        return CheckReport(
            name="tg_identity",
            status=CheckStatus.NOT_APPLICABLE,
            statistics={"s_norm": s_norm},
            message="Fibers are not totally geodesic (S ≠ 0)",
        )
    cloud = _default_cloud(metric, cloud)
    t = metric.triple
    tensors = tensors_for(metric)
    mixed = vertizontal = 0.0
    for _, x, xi in cloud.pairs():
        xp, xip = t.embed_m(x), t.embed_q(xi)
        y = tensors.A_star(x) @ xi
        yp = t.embed_m(y)
        lhs = metric.inner_p(metric.curvature_p(xp, yp, xip), xp)
        rhs = float(tensors.nabla_A_star(x, x, xi) @ y)
        mixed = max(mixed, abs(lhs - rhs))
        vertizontal = max(vertizontal, abs(metric.sectional_p(xip, xp) - float(y @ y)))
    residuals = {"mixed_curvature": mixed, "vertizontal_curvature": vertizontal}
    return CheckReport.from_residuals(
        "tg_identity",
        residuals,
        {k: tol for k in residuals},
        statistics={"s_norm": s_norm, "n_samples": float(len(cloud))},
    )


def oneill_horizontal_check(
    metric: AdaptedMetric, cloud: Optional[SampleCloud] = None
) -> CheckReport:
    """Horizontal O'Neill equation K_B(x, y) = K_M(x, y) + 3‖A_x y‖²_g on
    sampled horizontal pairs, with K_B from the normal metric of the base"""
    cloud = _default_cloud(metric, cloud)
    t = metric.triple
    base = base_metric(metric)
    bt = base.triple
    tensors = tensors_for(metric)
    worst = 0.0
    n_pairs = 0
    for x, y in cloud.horizontal_pairs():
        ax, ay = t.from_m(x), t.from_m(y)
        k_base = base.sectional_p(bt.to_p(ax), bt.to_p(ay))
        k_total = metric.sectional_p(t.embed_m(x), t.embed_m(y))
        a = tensors.A(x) @ y
        worst = max(worst, abs(k_base - k_total - 3 * metric.inner_q(a, a)))
        n_pairs += 1
    tol = metric.tolerances.tol_check
    return CheckReport.from_residuals(
        "oneill_horizontal",
        {"horizontal_equation": worst},
        {"horizontal_equation": tol},
        statistics={"n_pairs": float(n_pairs)},
    )


def discriminant_check(
    metric: AdaptedMetric, cloud: Optional[SampleCloud] = None
) -> CheckReport:
    """The quadratic λ ↦ K(X, λA*_Xξ + ξ) = c + 2λb + λ²a on sampled (X, ξ).

    Reports the expansion residual at λ ∈ {−1, 1, 2}, the discriminant margin
    min(a·c − b²) and the curvature bound τ_K = max a / (‖X‖²‖A*_Xξ‖²).
    The margin is only asserted when every sampled value of the quadratic
    is non-negative, otherwise the report is inconclusive.
    """
    cloud = _default_cloud(metric, cloud)
    t = metric.triple
    tensors = tensors_for(metric)
    tol = metric.tolerances.tol_check
    kernel_eps = metric.tolerances.kernel_eps
    expansion = 0.0
    margin = np.inf
    tau_k = 0.0
    min_curvature = np.inf
    for _, x, xi in cloud.pairs():
        xp, xip = t.embed_m(x), t.embed_q(xi)
        y = tensors.A_star(x) @ xi
        yp = t.embed_m(y)
        a = metric.sectional_p(xp, yp)
        b = metric.inner_p(metric.curvature_p(xp, yp, xip), xp)
        c = metric.sectional_p(xp, xip)
        for lam in (-1.0, 1.0, 2.0):
            value = metric.sectional_p(xp, lam * yp + xip)
            expansion = max(expansion, abs(value - (c + 2 * lam * b + lam**2 * a)))
            min_curvature = min(min_curvature, value)
        min_curvature = min(min_curvature, a, c)
        margin = min(margin, a * c - b**2)
        y_norm = float(np.linalg.norm(y))
        if y_norm > kernel_eps:
            tau_k = max(tau_k, a / (float(x @ x) * y_norm**2))

    margin = 0.0 if margin == np.inf else float(margin)
    min_curvature = 0.0 if min_curvature == np.inf else float(min_curvature)
    statistics = {"tau_k": tau_k, "min_curvature": min_curvature, "margin": margin}
    if min_curvature < -tol:
        residuals = {"expansion": expansion}
        report = CheckReport.from_residuals(
            "discriminant", residuals, {"expansion": tol}, statistics=statistics
        )
        if report.status == CheckStatus.PASS:
            report.status = CheckStatus.INCONCLUSIVE
            report.message = "Sampled curvature is negative, margin not asserted"
        return report
    return CheckReport.from_residuals(
        "discriminant",
        {"expansion": expansion, "negative_margin": max(-margin, 0.0)},
        {"expansion": tol, "negative_margin": tol},
        statistics=statistics,
    )
