import numpy as np
import pytest

from wnncheck.connection import (
    AdaptedMetric,
    SubmersionTriple,
    base_metric,
    curvature_symmetry_check,
    curvature_tensor,
    metric_skewness_residual,
    nomizu_operator,
    parallel_propagator,
    random_admissible_P,
    sectional_curvature,
)
from wnncheck.errors import InvalidP, NotClosed, NotHorizontal, NotInP
from wnncheck.liealg import LieAlgebraBasis, Subspace
from wnncheck.oneill import a_tensor
from wnncheck.types import CheckStatus


def test_triple_dimensions(
    hopf: SubmersionTriple, so4_s3: SubmersionTriple, stiefel: SubmersionTriple
):
    assert (hopf.dim_k, hopf.dim_q, hopf.dim_m) == (0, 1, 2)
    assert (so4_s3.dim_k, so4_s3.dim_q, so4_s3.dim_m) == (0, 3, 3)
    assert (stiefel.dim_k, stiefel.dim_q, stiefel.dim_m) == (1, 2, 3)
    assert stiefel.validate().status == CheckStatus.PASS


def test_triple_h_not_subalgebra(su2: LieAlgebraBasis):
    h = Subspace(su2, [su2.e("E1"), su2.e("E2")])
    with pytest.raises(NotClosed):
        SubmersionTriple(su2, h)


def test_triple_k_not_in_h(so4: LieAlgebraBasis):
    h = Subspace(so4, [so4.e("L12"), so4.e("L13"), so4.e("L23")])
    k = Subspace(so4, [so4.e("L34")])
    with pytest.raises(NotClosed):
        SubmersionTriple(so4, h, k)


def test_to_p_rejects_isotropy(stiefel: SubmersionTriple, so4: LieAlgebraBasis):
    with pytest.raises(NotInP):
        stiefel.to_p(so4.e("L12"))
    with pytest.raises(NotHorizontal):
        stiefel.to_m(so4.e("L13"))


def test_invalid_P(hopf: SubmersionTriple, so4_s3: SubmersionTriple):
    with pytest.raises(InvalidP):
        AdaptedMetric(hopf, [[-1.0]])
    with pytest.raises(InvalidP):
        AdaptedMetric(hopf, np.eye(2))
    with pytest.raises(InvalidP):
        AdaptedMetric(so4_s3, [[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def test_P_must_commute_with_isotropy(stiefel: SubmersionTriple):
    with pytest.raises(InvalidP):
        AdaptedMetric(stiefel, np.diag([1.0, 2.0]))
    metric = AdaptedMetric(stiefel, 3.0 * np.eye(2))
    assert metric.invariance_residual() < 1e-12
    assert not metric.is_normal


def test_normal_metric_nomizu_is_half_bracket(so4_metric: AdaptedMetric):
    alg = so4_metric.triple.algebra
    rng = np.random.default_rng(1)
    z, w = rng.standard_normal(6), rng.standard_normal(6)
    N = nomizu_operator(so4_metric, z)
    assert np.allclose(N(w), 0.5 * alg.bracket(z, w))


def test_bi_invariant_sectional_curvature(so4_metric: AdaptedMetric):
    alg = so4_metric.triple.algebra
    rng = np.random.default_rng(2)
    for _ in range(5):
        x, y = rng.standard_normal(6), rng.standard_normal(6)
        b = alg.bracket(x, y)
        assert sectional_curvature(so4_metric, x, y) == pytest.approx(
            0.25 * float(b @ b), abs=1e-12
        )


def test_hopf_round_curvatures(hopf_metric: AdaptedMetric, su2: LieAlgebraBasis):
    e1, e2, e3 = su2.e("E1"), su2.e("E2"), su2.e("E3")
    # vertizontal pair
    assert sectional_curvature(hopf_metric, e2, e1) == pytest.approx(0.25)
    assert sectional_curvature(hopf_metric, e2, e3) == pytest.approx(0.25)
    assert sectional_curvature(hopf_metric, e3, e1) == pytest.approx(0.25)


def test_hopf_berger_curvatures(hopf_metric_2: AdaptedMetric, su2: LieAlgebraBasis):
    e1, e2, e3 = su2.e("E1"), su2.e("E2"), su2.e("E3")
    # horizontal K drops to 1 - 3 * ‖A‖² = -1/2, ⟨E1, E1⟩_g = 2
    assert sectional_curvature(hopf_metric_2, e2, e3) == pytest.approx(-0.5)
    assert sectional_curvature(hopf_metric_2, e2, e1) == pytest.approx(1.0)


def test_curvature_tensor_antisymmetric(stiefel_metric: AdaptedMetric):
    t = stiefel_metric.triple
    rng = np.random.default_rng(4)
    x, y, z = (t.from_p(rng.standard_normal(t.dim_p)) for _ in range(3))
    assert np.allclose(
        curvature_tensor(stiefel_metric, x, y, z),
        -curvature_tensor(stiefel_metric, y, x, z),
    )


@pytest.mark.parametrize(
    "fixture", ["hopf_metric_2", "so4_metric_deformed", "stiefel_metric"]
)
def test_curvature_symmetries(fixture: str, request: pytest.FixtureRequest):
    metric = request.getfixturevalue(fixture)
    report = curvature_symmetry_check(metric, n_samples=20)
    assert report.status == CheckStatus.PASS
    assert metric_skewness_residual(metric, n_samples=20) < 1e-12


@pytest.mark.parametrize("fixture", ["hopf_metric", "hopf_metric_2"])
def test_base_metric_of_hopf_is_round_sphere(
    fixture: str, request: pytest.FixtureRequest, su2: LieAlgebraBasis
):
    metric = request.getfixturevalue(fixture)
    base = base_metric(metric)
    assert base.triple.dim_k == 1
    assert base.triple.dim_q == 0
    e2, e3 = su2.e("E2"), su2.e("E3")
    assert sectional_curvature(base, e2, e3) == pytest.approx(1.0)


def test_gray_oneill_horizontal_hopf(hopf_metric: AdaptedMetric, su2: LieAlgebraBasis):
    e2, e3 = su2.e("E2"), su2.e("E3")
    a = a_tensor(hopf_metric, e2, e3)
    total = sectional_curvature(hopf_metric, e2, e3) + 3 * float(a @ a)
    assert total == pytest.approx(1.0, abs=1e-9)
    assert total == pytest.approx(
        sectional_curvature(base_metric(hopf_metric), e2, e3), abs=1e-9
    )


def test_parallel_transport_preserves_norm(
    hopf_metric_2: AdaptedMetric, su2: LieAlgebraBasis
):
    prop = parallel_propagator(hopf_metric_2, su2.e("E2"))
    t = hopf_metric_2.triple
    w = su2.e("E3") + su2.e("E1")
    moved = prop.transport(2.5, w)
    wp, mp = t.to_p(w), t.to_p(moved)
    assert hopf_metric_2.inner_p(mp, mp) == pytest.approx(hopf_metric_2.inner_p(wp, wp))
    with pytest.raises(NotHorizontal):
        parallel_propagator(hopf_metric_2, su2.e("E1"))


def test_random_admissible_P(stiefel: SubmersionTriple, so4_s3: SubmersionTriple):
    rng = np.random.default_rng(0)
    P = random_admissible_P(stiefel, rng)
    # the commutant of a rotation generator holds only multiples of I
    assert np.allclose(P, P[0, 0] * np.eye(2))
    AdaptedMetric(stiefel, P)
    P = random_admissible_P(so4_s3, rng)
    assert np.allclose(P, P.T)
    assert np.linalg.eigvalsh(P).min() >= 0.5 - 1e-12
    AdaptedMetric(so4_s3, P)
