"""Finite-difference oracles, independent of the Nomizu formulas.

The oracles work in the chart y ↦ exp(Σ y_a p_a)·o around the base point,
with the metric coefficients read off the left-trivialized derivative of the
matrix exponential. Christoffel symbols and covariant derivatives then come
from plain central differences with one Richardson refinement. They are slow
and only meant for tests and the `oracles` check.
"""

from typing import Any, Callable, Literal

import numpy as np
from scipy.linalg import expm

from wnncheck.connection import AdaptedMetric
from wnncheck.constants import FD_CURVATURE_STEP, FD_MIN_STEP, FD_STEP
from wnncheck.errors import StepTooSmall
from wnncheck.oneill import tensors_for

FieldKind = Literal["invariant", "parallel"]


def _check_step(h: float) -> None:
    if h < FD_MIN_STEP:
        raise StepTooSmall(f"Finite-difference step {h:g} is below {FD_MIN_STEP:g}")


def richardson(func: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    """Central difference of func at 0 with one Richardson refinement"""

    def central(step: float) -> np.ndarray:
        return (func(step) - func(-step)) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


def _dexp(Y: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Derivative of expm at Y in direction E (block-matrix identity)"""
    n = Y.shape[0]
    block = np.zeros((2 * n, 2 * n), dtype=np.result_type(Y, E))
    block[:n, :n] = Y
    block[n:, n:] = Y
    block[:n, n:] = E
    return expm(block)[:n, n:]


def chart_frame(metric: AdaptedMetric, y: np.ndarray) -> np.ndarray:
    """Columns are the 𝔭-parts of exp(−Y)·d exp(Y)[p_a], the coordinate
    vectors of the chart at y pulled back to the base point."""
    triple = metric.triple
    alg = triple.algebra
    p_mats = np.einsum("ai,ijk->ajk", triple.p_space.span, alg.basis)
    Y = np.einsum("a,ajk->jk", y, p_mats)
    exp_neg = expm(-Y)
    cols = [
        triple.p_space.coordinates(alg.coordinates(exp_neg @ _dexp(Y, E)))
        for E in p_mats
    ]
    return np.stack(cols, axis=1)


def chart_metric(metric: AdaptedMetric, y: Any) -> np.ndarray:
    """Metric coefficients g_ab(y) of the exponential chart

    Args:
        metric (AdaptedMetric): Adapted metric
        y (array-like): Chart coordinates in 𝔭

    Returns:
        np.ndarray: Symmetric (dim 𝔭, dim 𝔭) matrix
    """
    B = chart_frame(metric, np.asarray(y, dtype=float))
    return B.T @ metric.gram_p @ B


def christoffel(metric: AdaptedMetric, y: Any, h: float = FD_STEP) -> np.ndarray:
    """Christoffel symbols of the second kind, Γ[l, i, j] = Γ^l_ij, at y

    Raises:
        StepTooSmall: If h is below the minimum step
    """
    _check_step(h)
    y = np.asarray(y, dtype=float)
    n = len(y)
    dg = np.stack(
        [
            richardson(lambda s, e=e: chart_metric(metric, y + s * e), h)
            for e in np.eye(n)
        ]
    )
    # first kind: Γ_{k,ij} = ½(∂_i g_jk + ∂_j g_ik − ∂_k g_ij)
    first = 0.5 * (
        np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg) - dg
    )
    g_inv = np.linalg.inv(chart_metric(metric, y))
    return np.einsum("lk,kij->lij", g_inv, first)


def fd_connection_oracle(
    metric: AdaptedMetric,
    x: Any,
    w: Any,
    kind: FieldKind = "invariant",
    h: float = FD_STEP,
) -> np.ndarray:
    """Covariant derivative at o along t ↦ exp(tx)·o of a field given by
    its pulled-back coefficient curve.

    "invariant" is the field exp(tx)_* w, whose derivative is N_x w.
    "parallel" is exp(tx)_* exp(−t N_x) w, whose derivative vanishes.

    Args:
        metric (AdaptedMetric): Adapted metric
        x (array-like): Direction in 𝔭, algebra coordinates
        w (array-like): Initial value in 𝔭, algebra coordinates
        kind (str): "invariant" or "parallel"
        h (float): Finite-difference step

    Raises:
        StepTooSmall: If h is below the minimum step
        NotInP: If x or w has a component along 𝔨

    Returns:
        np.ndarray: Covariant derivative in algebra coordinates
    """
    _check_step(h)
    triple = metric.triple
    xp = triple.to_p(x, "x")
    wp = triple.to_p(w, "w")
    Nx = metric.N(xp)

    def components(t: float) -> np.ndarray:
        field = wp if kind == "invariant" else expm(-t * Nx) @ wp
        return np.linalg.solve(chart_frame(metric, t * xp), field)

    gamma = christoffel(metric, np.zeros(triple.dim_p), h)
    cov = richardson(components, h) + np.einsum("lij,i,j->l", gamma, xp, wp)
    return triple.from_p(cov)


def fd_sectional_curvature(
    metric: AdaptedMetric, x: Any, y: Any, h: float = FD_CURVATURE_STEP
) -> float:
    """Unreduced sectional curvature ⟨R(x, y)y, x⟩ from chart Christoffel
    symbols, with R(x, y)y = ∂_xΓ(y, y) − ∂_yΓ(x, y) + Γ(x, Γ(y, y)) − Γ(y, Γ(x, y))

    Raises:
        StepTooSmall: If h is below the minimum step
    """
    _check_step(h)
    triple = metric.triple
    xp = triple.to_p(x, "x")
    yp = triple.to_p(y, "y")
    origin = np.zeros(triple.dim_p)

    def gamma_at(point: np.ndarray) -> np.ndarray:
        return christoffel(metric, point, h)

    d_x = richardson(
        lambda s: np.einsum("lij,i,j->l", gamma_at(s * xp), yp, yp), h
    )
    d_y = richardson(
        lambda s: np.einsum("lij,i,j->l", gamma_at(s * yp), xp, yp), h
    )
    g0 = gamma_at(origin)
    gyy = np.einsum("lij,i,j->l", g0, yp, yp)
    gxy = np.einsum("lij,i,j->l", g0, xp, yp)
    r = (
        d_x
        - d_y
        + np.einsum("lij,i,j->l", g0, xp, gyy)
        - np.einsum("lij,i,j->l", g0, yp, gxy)
    )
    return metric.inner_p(r, xp)


def fd_a_tensor(
    metric: AdaptedMetric, x: Any, y: Any, h: float = FD_STEP
) -> np.ndarray:
    """A_x y as half the vertical part of the bracket of the horizontal
    extensions y' ↦ exp(Y')_* x and y' ↦ exp(Y')_* y

    Raises:
        StepTooSmall: If h is below the minimum step
        NotHorizontal: If x or y is not in 𝔪
    """
    _check_step(h)
    triple = metric.triple
    xp = triple.embed_m(triple.to_m(x, "x"))
    yp = triple.embed_m(triple.to_m(y, "y"))

    def extension(direction: np.ndarray, value: np.ndarray):
        return lambda s: np.linalg.solve(chart_frame(metric, s * direction), value)

    bracket = richardson(extension(xp, yp), h) - richardson(extension(yp, xp), h)
    return triple.from_q(0.5 * bracket[triple.q_slice])


def fd_nabla_a_star(
    metric: AdaptedMetric, z: Any, x: Any, xi: Any, h: float = FD_STEP
) -> np.ndarray:
    """(∇_z A*)_x ξ as the derivative of the transported curve
    exp(t N_z) A*_{x(t)} ξ(t), with x(t), ξ(t) parallel along exp(tz)·o
    and each slot projected back to 𝔪 and 𝔮

    Raises:
        StepTooSmall: If h is below the minimum step
    """
    _check_step(h)
    triple = metric.triple
    tensors = tensors_for(metric)
    zp = triple.embed_m(triple.to_m(z, "z"))
    xp = triple.embed_m(triple.to_m(x, "x"))
    xip = triple.embed_q(triple.to_q(xi, "xi"))
    Nz = metric.N(zp)

    def curve(t: float) -> np.ndarray:
        back = expm(-t * Nz)
        x_t = (back @ xp)[triple.m_slice]
        xi_t = (back @ xip)[triple.q_slice]
        value = triple.embed_m(tensors.A_star(x_t) @ xi_t)
        return expm(t * Nz) @ value

    return triple.from_m(richardson(curve, h)[triple.m_slice])
