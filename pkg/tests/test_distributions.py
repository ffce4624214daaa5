import numpy as np
import pytest

from qhistories.distributions import (component_sum_cdf,
                                      max_component_cdf_complex,
                                      max_component_cdf_real_approx,
                                      max_dhc_cdf, two_orthonormal_density)


def _sphere(rng, n, dim, field):
    if field == "real":
        x = rng.normal(size=(n, dim))
    else:
        x = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


@pytest.mark.parametrize("field,d,k", [("real", 9, 3), ("complex", 8, 3),
                                       ("complex", 12, 5)])
def test_component_sum_cdf_vs_sampling(field, d, k):
    rng = np.random.default_rng(0)
    z = _sphere(rng, 50000, d, field)
    sums = (np.abs(z[:, :k]) ** 2).sum(axis=1)
    for lam in (0.05, 0.2, 0.5, 0.8):
        assert abs(component_sum_cdf(lam, k, d, field)
                   - np.mean(sums <= lam)) < 0.01


def test_component_sum_cdf_limits():
    assert component_sum_cdf(0.0, 3, 8, "complex") == 0.0
    assert component_sum_cdf(1.0, 3, 8, "complex") == pytest.approx(1.0)
    # k = d: the sum is identically 1
    assert component_sum_cdf(0.999, 5, 5, "complex") == 0.0
    assert component_sum_cdf(1.0, 5, 5, "complex") == 1.0


@pytest.mark.parametrize("d,k", [(8, 3), (12, 5)])
def test_max_component_cdf_complex_vs_sampling(d, k):
    rng = np.random.default_rng(1)
    z = _sphere(rng, 50000, d, "complex")
    maxs = (np.abs(z[:, :k]) ** 2).max(axis=1)
    for lam in (0.1, 0.3, 0.5, 0.7):
        assert abs(max_component_cdf_complex(lam, k, d)
                   - np.mean(maxs <= lam)) < 0.01


def test_max_component_cdf_real_approx_vs_sampling():
    d, k = 9, 3
    rng = np.random.default_rng(2)
    x = _sphere(rng, 50000, d, "real")
    maxs = (x[:, :k] ** 2).max(axis=1)
    # correction terms are asymptotic; a few percent accuracy expected
    for lam in (0.1, 0.3, 0.5):
        assert abs(max_component_cdf_real_approx(lam, k, d)
                   - np.mean(maxs <= lam)) < 0.05


def test_max_dhc_cdf_vs_sampling():
    # max of k squared components of a real unit vector in dimension d-1
    d, k = 8, 3
    rng = np.random.default_rng(3)
    x = _sphere(rng, 50000, d - 1, "real")
    maxs = (x[:, :k] ** 2).max(axis=1)
    for lam in (0.1, 0.3, 0.6):
        assert abs(max_dhc_cdf(lam, k, d) - np.mean(maxs <= lam)) < 0.01


def test_max_dhc_cdf_monotone_and_bounded():
    lams = np.linspace(0.01, 0.99, 25)
    vals = [max_dhc_cdf(l, 3, 8) for l in lams]
    assert all(0.0 <= v <= 1.0 + 1e-12 for v in vals)
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


def test_cdfs_monotone():
    lams = np.linspace(0.0, 1.0, 40)
    for f in (lambda l: component_sum_cdf(l, 3, 8, "complex"),
              lambda l: max_component_cdf_complex(l, 3, 8)):
        vals = [f(l) for l in lams]
        assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


def test_two_orthonormal_density_support():
    d, k = 10, 3
    x = np.zeros(k)
    y = np.zeros(k)
    assert two_orthonormal_density(x, y, k, d) > 0.0
    x_big = np.array([1.0, 0.0, 0.0])
    assert two_orthonormal_density(x_big, x_big, k, d) == 0.0
