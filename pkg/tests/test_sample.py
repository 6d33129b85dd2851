import numpy as np

from wnncheck.connection import AdaptedMetric
from wnncheck.hashing import array_hash, cloud_hash
from wnncheck.sample import SampleCloud, sample_cloud


def test_cloud_sizes(hopf_metric_2: AdaptedMetric):
    cloud = SampleCloud(hopf_metric_2, n_x=5, n_xi=3)
    assert cloud.xs_m.shape == (2 + 5, 2)
    assert cloud.xis_q.shape == (1 + 3, 1)
    assert cloud.xs.shape == (7, 3)
    assert len(cloud) == 7 * 4
    assert len(list(cloud.pairs())) == len(cloud)
    assert len(list(cloud.horizontal_pairs())) == 7 * 6 // 2


def test_cloud_without_basis(so4_metric: AdaptedMetric):
    cloud = SampleCloud(so4_metric, n_x=2, n_xi=2, include_basis=False)
    assert len(cloud.xs_m) == 2
    assert len(cloud.xis_q) == 2


def test_cloud_normalization(so4_metric_deformed: AdaptedMetric):
    cloud = SampleCloud(so4_metric_deformed, n_x=6, n_xi=6)
    P = so4_metric_deformed.P
    assert np.allclose(np.linalg.norm(cloud.xs_m, axis=1), 1.0)
    assert np.allclose(np.einsum("ij,jk,ik->i", cloud.xis_q, P, cloud.xis_q), 1.0)


def test_cloud_is_deterministic(hopf_metric: AdaptedMetric):
    a = SampleCloud(hopf_metric, seed=11)
    b = sample_cloud(hopf_metric, seed=11)
    c = SampleCloud(hopf_metric, seed=12)
    assert np.array_equal(a.xs, b.xs)
    assert np.array_equal(a.xis, b.xis)
    assert cloud_hash(a) == cloud_hash(b)
    assert cloud_hash(a) != cloud_hash(c)
    assert np.array_equal(a.rng(3).standard_normal(4), b.rng(3).standard_normal(4))


def test_cloud_arrays_are_read_only(hopf_metric: AdaptedMetric):
    cloud = SampleCloud(hopf_metric)
    assert not cloud.xs.flags.writeable


def test_array_hash_depends_on_shape():
    arr = np.arange(6, dtype=float)
    assert array_hash(arr) == array_hash(arr.copy())
    assert array_hash(arr) != array_hash(arr.reshape(2, 3))
