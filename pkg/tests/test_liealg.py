import numpy as np
import pytest

from wnncheck.errors import ConfigError, Degenerate, DimensionMismatch, NotClosed
from wnncheck.liealg import (
    LieAlgebraBasis,
    Subspace,
    berger_generators,
    bracket,
    build_algebra,
    elementary_so,
    project,
    validate_structure,
)
from wnncheck.types import CheckStatus


def test_su2_basis_is_orthonormal(su2: LieAlgebraBasis):
    assert su2.dim == 3
    assert su2.labels == ["E1", "E2", "E3"]
    assert su2.form_scale == 2.0
    assert np.allclose(su2.gram, np.eye(3))


def test_su2_brackets_are_cyclic(su2: LieAlgebraBasis):
    e1, e2, e3 = su2.e("E1"), su2.e("E2"), su2.e("E3")
    assert np.allclose(bracket(su2, e1, e2), e3)
    assert np.allclose(bracket(su2, e2, e3), e1)
    assert np.allclose(bracket(su2, e3, e1), e2)
    assert np.allclose(bracket(su2, e2, e1), -e3)


def test_so4_bracket(so4: LieAlgebraBasis):
    assert so4.labels == ["L12", "L13", "L14", "L23", "L24", "L34"]
    assert np.allclose(so4.bracket(so4.e("L12"), so4.e("L23")), so4.e("L13"))
    assert np.allclose(so4.bracket(so4.e("L14"), so4.e("L24")), -so4.e("L12"))


def test_ad_matches_bracket(so4: LieAlgebraBasis):
    rng = np.random.default_rng(3)
    a, b = rng.standard_normal(6), rng.standard_normal(6)
    assert np.allclose(so4.ad(a) @ b, so4.bracket(a, b))


def test_coordinates_invert_matrix(so4: LieAlgebraBasis):
    coeffs = np.arange(6, dtype=float)
    assert np.allclose(so4.coordinates(so4.matrix(coeffs)), coeffs)


@pytest.mark.parametrize("name", ["su2", "u1xu1", "so3", "so4", "so5"])
def test_validate_structure_catalog(name: str):
    report = validate_structure(build_algebra(name))
    assert report.status == CheckStatus.PASS
    assert report.residuals["jacobi"] < 1e-12
    assert report.residuals["gram_identity"] < 1e-12


def test_build_algebra_not_closed():
    mats, _ = elementary_so(3)
    with pytest.raises(NotClosed):
        build_algebra([mats[0], mats[1]], form_scale=0.5)


def test_build_algebra_non_compact():
    with pytest.raises(Degenerate):
        build_algebra([np.diag([1.0, -1.0])])


def test_build_algebra_orthonormalizes_custom_input():
    mats, labels = elementary_so(3)
    alg = build_algebra([2.0 * m for m in mats], form_scale=0.5, labels=labels)
    assert np.allclose(alg.gram, np.eye(3))
    assert np.allclose(alg.basis, np.stack(mats))


def test_build_algebra_label_mismatch():
    mats, labels = elementary_so(3)
    with pytest.raises(ConfigError, match="2 labels for 3"):
        build_algebra(mats, form_scale=0.5, labels=labels[:2])


def test_bracket_dimension_mismatch(su2: LieAlgebraBasis):
    with pytest.raises(DimensionMismatch):
        su2.bracket([1.0, 0.0], [0.0, 1.0, 0.0])


def test_subspace_projection_and_complement(so4: LieAlgebraBasis):
    h = Subspace(so4, [so4.e("L12"), so4.e("L13"), so4.e("L23")], name="𝔥")
    m = h.complement(name="𝔪")
    assert h.rank == 3
    assert m.rank == 3
    assert m.contains(so4.e("L14"))
    assert not m.contains(so4.e("L12"))
    v = so4.e("L12") + so4.e("L34")
    assert np.allclose(project(v, h), so4.e("L12"))
    assert np.allclose(project(v, m), so4.e("L34"))
    assert h.residual(v) == pytest.approx(1.0)


def test_subspace_dependent_vectors(su2: LieAlgebraBasis):
    with pytest.raises(Degenerate):
        Subspace(su2, [su2.e(0), 2 * su2.e(0)])


def test_berger_generators_represent_so3():
    r12, r13, r23 = berger_generators()
    for r in (r12, r13, r23):
        assert np.allclose(r, -r.T)
    # [L12, L13] = -L23 in so3
    assert np.allclose(r12 @ r13 - r13 @ r12, -r23)
