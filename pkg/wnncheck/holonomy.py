"""Holonomy and dual holonomy fields along horizontal geodesics exp(tx)·o.

In the frame carried by the isometries exp(tx) both fields solve linear
constant-coefficient equations on 𝔮:

    ξ' = M_hol ξ,   M_hol = −pr_𝔮 N_x|𝔮 − S_x
    ν' = M_dual ν,  M_dual = −pr_𝔮 N_x|𝔮 + S_x

so ĉ(t) = exp(t M_hol) and ν(t) = exp(t M_dual) ν(0).
"""

from typing import Any, Dict, List, Literal, Sequence

import numpy as np
from scipy.linalg import cholesky, expm

from wnncheck.connection import AdaptedMetric
from wnncheck.constants import DEFECTIVE_COND, GRID_SIZE
from wnncheck.errors import ZeroVector
from wnncheck.oneill import tensors_for
from wnncheck.types import CheckReport, NormSeries
from wnncheck.util import freeze, map_ordered

FieldKind = Literal["holonomy", "dual"]


class HolonomyPropagator:
    """Generators of the holonomy and dual holonomy flows for one
    unit horizontal direction x"""

    def __init__(
        self,
        metric: AdaptedMetric,
        x: np.ndarray,
        M_hol: np.ndarray,
        M_dual: np.ndarray,
        build_residuals: Dict[str, float],
    ):
        self.metric = metric
        self.x = freeze(x)
        self.M_hol = freeze(M_hol)
        self.M_dual = freeze(M_dual)
        self.build_residuals = build_residuals

    def generator(self, kind: FieldKind = "dual") -> np.ndarray:
        return self.M_dual if kind == "dual" else self.M_hol

    def flow(self, t: float, kind: FieldKind = "dual") -> np.ndarray:
        return expm(t * self.generator(kind))

    def g_adjoint(self, T: np.ndarray) -> np.ndarray:
        """g-adjoint P⁻¹TᵀP of an operator on 𝔮"""
        return self.metric.P_inv @ T.T @ self.metric.P

    def __repr__(self) -> str:
        return f"HolonomyPropagator(dim_q={len(self.M_hol)})"


def generators(metric: AdaptedMetric, x: Any) -> HolonomyPropagator:
    """Holonomy and dual holonomy generators along exp(tx)·o.

    Args:
        metric (AdaptedMetric): Adapted metric
        x (array-like): Nonzero horizontal vector, normalized internally

    Raises:
        NotHorizontal: If x is not in 𝔪
        ZeroVector: If x vanishes

    Returns:
        HolonomyPropagator: Generators with their build residuals
    """
    t = metric.triple
    xm = t.to_m(x, "x")
    norm = float(np.linalg.norm(xm))
    if norm < metric.tolerances.kernel_eps:
        raise ZeroVector("Geodesic direction x must be nonzero")
    xm = xm / norm
    tensors = tensors_for(metric)
    Nx = metric.N(t.embed_m(xm))
    q, m = t.q_slice, t.m_slice
    S = tensors.S(xm)
    M_hol = -Nx[q, q] - S
    M_dual = -Nx[q, q] + S

    dq = t.dim_q
    consistency = (
        float(np.abs(Nx[m, q] + tensors.A_star(xm)).max()) if dq and t.dim_m else 0.0
    )
    adjoint = metric.P_inv @ M_hol.T @ metric.P
    duality = float(np.abs(M_dual + adjoint).max()) if dq else 0.0
    residuals = {"horizontal_consistency": consistency, "generator_duality": duality}
    return HolonomyPropagator(metric, xm, M_hol, M_dual, residuals)


def propagate(
    prop: HolonomyPropagator, t: float, w0: Any, kind: FieldKind = "dual"
) -> np.ndarray:
    """w(t) = exp(t M) w0 for a holonomy or dual holonomy field

    Args:
        prop (HolonomyPropagator): Generators
        t (float): Time
        w0 (array-like): Initial vertical vector, algebra coordinates
        kind (str): "holonomy" or "dual"

    Returns:
        np.ndarray: w(t) in algebra coordinates
    """
    triple = prop.metric.triple
    wq = triple.to_q(w0, "w0")
    return triple.from_q(prop.flow(t, kind) @ wq)


def time_grid(horizon: float, grid_size: int = GRID_SIZE, symmetric: bool = False):
    """grid_size points on [0, T], or on [−T, T] when symmetric"""
    start = -horizon if symmetric else 0.0
    return np.linspace(start, horizon, grid_size)


def dual_relation_check(
    prop: HolonomyPropagator, times: Sequence[float], n_workers: int = 1
) -> CheckReport:
    """max over the grid of ‖exp(t M_dual) − (exp(t M_hol))^{−*}‖, the
    g-dual taken with P"""

    def residual(t: float) -> float:
        hol = prop.flow(t, "holonomy")
        expected = np.linalg.inv(prop.g_adjoint(hol))
        return float(np.abs(prop.flow(t, "dual") - expected).max()) if hol.size else 0.0

    worst = max(map_ordered(residual, list(times), n_workers), default=0.0)
    tol = prop.metric.tolerances.tol_check
    residuals = {"dual_relation": worst, **prop.build_residuals}
    return CheckReport.from_residuals(
        "dual_relation", residuals, {k: tol for k in residuals}
    )


def norm_evolution(
    prop: HolonomyPropagator, w0: Any, times: Sequence[float]
) -> NormSeries:
    """‖ν(t)‖²_g of the dual field with exact first and second derivatives
    from the generator

    Returns:
        NormSeries: Values and derivatives on the grid
    """
    triple = prop.metric.triple
    wq = triple.to_q(w0, "w0")
    P = prop.metric.P
    M = prop.M_dual
    norm_sq: List[float] = []
    d1: List[float] = []
    d2: List[float] = []
    for t in times:
        w = prop.flow(t) @ wq
        Mw = M @ w
        MMw = M @ Mw
        norm_sq.append(float(w @ P @ w))
        d1.append(float(Mw @ P @ w + w @ P @ Mw))
        d2.append(float(MMw @ P @ w + 2 * Mw @ P @ Mw + w @ P @ MMw))
    return NormSeries(
        times=[float(t) for t in times], norm_sq=norm_sq, d1=d1, d2=d2
    )


def curvature_identity_residual(
    metric: AdaptedMetric, x: Any, w0: Any, times: Sequence[float]
) -> CheckReport:
    """K(ċ, ν(t)) = ½ d²/dt²‖ν‖² − 3‖S_ċ ν‖² + ‖A*_ċ ν‖² along the grid,
    both sides computed independently

    Raises:
        NotHorizontal: If x is not in 𝔪
    """
    prop = generators(metric, x)
    triple = metric.triple
    tensors = tensors_for(metric)
    series = norm_evolution(prop, w0, times)
    wq = triple.to_q(w0, "w0")
    xp = triple.embed_m(prop.x)
    S, A_star = tensors.S(prop.x), tensors.A_star(prop.x)
    worst = 0.0
    rows = []
    for t, d2 in zip(series.times, series.d2):
        w = prop.flow(t) @ wq
        lhs = metric.sectional_p(xp, triple.embed_q(w))
        Sw, Aw = S @ w, A_star @ w
        rhs = 0.5 * d2 - 3 * metric.inner_q(Sw, Sw) + float(Aw @ Aw)
        worst = max(worst, abs(lhs - rhs))
        rows.append({"t": t, "lhs": lhs, "rhs": rhs})
    tol = metric.tolerances.tol_check
    return CheckReport.from_residuals(
        "curvature_identity",
        {"eq_k": worst},
        {"eq_k": tol},
        rows=rows,
    )


def spectral_growth_bound(M: np.ndarray, P: np.ndarray) -> float:
    """Bound on sup_t ‖exp(tM)‖²_g when the spectrum of M is imaginary.

    With M = V D V⁻¹ in P-orthonormal coordinates the flow norm is at most
    cond(V). A numerically defective M gets the bound 1, so any polynomial
    growth registers as an excess.
    """
    if not M.size:
        return 1.0
    L = cholesky(P, lower=True)
    white = L.T @ M @ np.linalg.inv(L.T)
    _, V = np.linalg.eig(white)
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > DEFECTIVE_COND:
        return 1.0
    return cond**2


def boundedness_check(
    prop: HolonomyPropagator,
    w0: Any,
    horizon: float,
    kind: FieldKind = "dual",
    grid_size: int = GRID_SIZE,
) -> CheckReport:
    """sup of ‖w(t)‖²/‖w0‖² over a dense grid on [−T, T] together with the
    spectrum of the generator. Bounded iff every eigenvalue is imaginary and
    the sup stays under the growth bound of the eigenbasis.

    Raises:
        ZeroVector: If w0 vanishes
    """
    triple = prop.metric.triple
    wq = triple.to_q(w0, "w0")
    base = prop.metric.inner_q(wq, wq)
    if base < prop.metric.tolerances.kernel_eps**2:
        raise ZeroVector("w0 must be nonzero")
    M = prop.generator(kind)
    real_part = float(np.abs(np.linalg.eigvals(M).real).max()) if M.size else 0.0
    bound = spectral_growth_bound(M, prop.metric.P)
    best, attained = 1.0, 0.0
    for t in time_grid(horizon, 4 * grid_size, symmetric=True):
        w = prop.flow(t, kind) @ wq
        ratio = prop.metric.inner_q(w, w) / base
        if ratio > best:
            best, attained = ratio, float(t)
    excess = max(0.0, best / bound - 1.0) if np.isfinite(best) else np.inf
    tol = prop.metric.tolerances.tol_check
    return CheckReport.from_residuals(
        "bounded",
        {"spectral_real_part": real_part, "growth_excess": excess},
        {"spectral_real_part": tol, "growth_excess": tol},
        statistics={
            "sup_ratio": best,
            "attained_time": attained,
            "spectral_bound": bound,
            "horizon": horizon,
        },
    )


def dual_conjugation_residual(
    metric: AdaptedMetric, P_rel: Any, x: Any, times: Sequence[float]
) -> float:
    """max over the grid of ‖exp(t M'_dual) − P⁻¹ exp(t M_dual) P‖ for the
    deformed metric g' = g(P·, ·), the generator form of ν'(t) = P⁻¹ν(t)"""
    P_rel = np.asarray(P_rel, dtype=float)
    deformed = metric.deformed(P_rel)
    prop = generators(metric, x)
    prop_def = generators(deformed, x)
    P_inv = np.linalg.inv(P_rel)
    worst = 0.0
    for t in times:
        lhs = prop_def.flow(t)
        rhs = P_inv @ prop.flow(t) @ P_rel
        if lhs.size:
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst
