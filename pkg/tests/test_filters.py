import numpy as np
import numpy.testing as npt
import pytest

import oracles
from densitop import filters, problem


def test_impulse_response_matches_dense_oracle():
    x = np.zeros((9, 9))
    x[4, 4] = 1.0
    got = filters.gaussian_filter(x, 1.0)
    want = oracles.dense_gaussian_filter(x, 1.0)
    npt.assert_allclose(got, want, rtol=0, atol=1e-12)
    # Frozen values of the truncated, normalized kernel.
    npt.assert_allclose(got[4, 4], 0.15915589174187972, rtol=0, atol=1e-12)
    npt.assert_allclose(got[4, 5], 0.09653292801535476, rtol=0, atol=1e-12)
    npt.assert_allclose(got[4, 3], got[4, 5], rtol=0, atol=0)
    npt.assert_allclose(got[3, 4], got[5, 4], rtol=0, atol=0)


@pytest.mark.parametrize("shape,width", [((7, 5), 1.0), ((5, 9), 1.5), ((6, 6), 0.7)])
def test_random_fields_match_dense_oracle(shape, width, rng):
    for _ in range(3):
        x = rng.uniform(size=shape)
        npt.assert_allclose(filters.gaussian_filter(x, width),
                            oracles.dense_gaussian_filter(x, width),
                            rtol=0, atol=1e-12)


def test_constant_fields_are_preserved():
    for width in (0.5, 1.0, 2.0):
        x = np.full((6, 11), 0.37)
        npt.assert_allclose(filters.gaussian_filter(x, width), x, rtol=0, atol=1e-14)


def test_interior_impulse_conserves_mass():
    # Support radius is ceil(4 * 1) = 4, so an impulse at the center of a
    # 15x15 grid never touches the boundary and total mass is conserved.
    x = np.zeros((15, 15))
    x[7, 7] = 2.5
    npt.assert_allclose(filters.gaussian_filter(x, 1.0).sum(), 2.5, rtol=1e-12)


def test_filter_is_linear(rng):
    a = rng.normal(size=(7, 5))
    b = rng.normal(size=(7, 5))
    lhs = filters.gaussian_filter(2.0 * a - 3.0 * b, 1.0)
    rhs = 2.0 * filters.gaussian_filter(a, 1.0) - 3.0 * filters.gaussian_filter(b, 1.0)
    npt.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)


def test_adjoint_identity(rng):
    # <filter(x), y> == <x, adjoint(y)> for arbitrary fields.
    for width in (1.0, 1.5):
        for _ in range(5):
            x = rng.normal(size=(7, 5))
            y = rng.normal(size=(7, 5))
            lhs = np.sum(filters.gaussian_filter(x, width) * y)
            rhs = np.sum(x * filters.gaussian_filter_adjoint(y, width))
            npt.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_adjoint_of_zero_is_zero():
    npt.assert_array_equal(filters.gaussian_filter_adjoint(np.zeros((4, 6)), 1.0),
                           np.zeros((4, 6)))


def test_width_must_be_positive():
    with pytest.raises(ValueError, match="width"):
        filters.gaussian_filter(np.zeros((3, 3)), 0.0)
    with pytest.raises(ValueError, match="width"):
        filters.gaussian_filter(np.zeros((3, 3)), -1.0)


def test_physical_density_reshapes_and_masks():
    spec = problem.mbb_beam(4, 3)
    x = np.arange(12, dtype=float) / 12.0
    # Flat input is reshaped to (nely, nelx) row-major.
    no_filter = filters.physical_density(x, spec, use_filter=False)
    npt.assert_array_equal(no_filter, x.reshape(3, 4))

    mask = np.ones((3, 4))
    mask[1, 2] = 0.0
    masked_spec = problem.mbb_beam(4, 3, mask=mask)
    masked = filters.physical_density(x, masked_spec, use_filter=False)
    assert masked[1, 2] == 0.0
    npt.assert_array_equal(masked[0], x.reshape(3, 4)[0])


def test_physical_density_applies_blur():
    spec = problem.mbb_beam(5, 5, filter_width=1.0)
    x = np.zeros((5, 5))
    x[2, 2] = 1.0
    npt.assert_allclose(filters.physical_density(x, spec),
                        filters.gaussian_filter(x, 1.0), rtol=0, atol=0)


def test_mean_density_uniform_field():
    spec = problem.mbb_beam(6, 4)
    x = np.full(24, 0.4)
    npt.assert_allclose(filters.mean_density(x, spec), 0.4, rtol=1e-13)
    npt.assert_allclose(filters.mean_density(x, spec, use_filter=False), 0.4,
                        rtol=1e-15)
    assert filters.mean_density(np.zeros(24), spec) == 0.0


def test_mean_density_ignores_masked_cells():
    # Mask out half the cells; live cells hold 0.4.  The mean over live cells
    # alone is 0.4 even though the raw grid mean is 0.2.
    mask = np.ones((2, 2))
    mask[:, 1] = 0.0
    spec = problem.mbb_beam(2, 2, mask=mask)
    x = np.full((2, 2), 0.4)
    npt.assert_allclose(filters.mean_density(x, spec, use_filter=False), 0.4,
                        rtol=1e-15)
