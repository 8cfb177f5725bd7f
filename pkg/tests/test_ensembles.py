"""Random-field generators and resolution nesting."""

import numpy as np

from oldroyd2d.ensembles import (
    nested_scalar,
    nested_vector,
    random_scalar,
    restrict_scalar,
)
from oldroyd2d.grid import TorusGrid
from oldroyd2d.operators import l2_norm


def test_random_scalar_is_deterministic_and_normalized(grid32):
    a = random_scalar(grid32, seed=5, amplitude=0.7)
    b = random_scalar(grid32, seed=5, amplitude=0.7)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert abs(l2_norm(a) - 0.7) < 1e-12
    assert a.coeffs[0, 0] == 0


def test_random_scalar_band_limited(grid32):
    f = random_scalar(grid32, seed=1)
    assert np.all(f.coeffs[~grid32.dealias_mask] == 0)


def test_restriction_matches_master_on_shared_modes(grid32):
    master = random_scalar(TorusGrid(128), seed=3, band_limited=False)
    sub = restrict_scalar(master, grid32)
    # mode (2, -3) lives at index (2, -3 mod n) on either grid
    assert sub.coeffs[2, -3 % 32] == master.coeffs[2, -3 % 128]
    assert np.all(sub.coeffs[~grid32.dealias_mask] == 0)


def test_restriction_is_nested():
    master = TorusGrid(128)
    direct = nested_scalar(TorusGrid(32), seed=9)
    via_64 = restrict_scalar(nested_scalar(TorusGrid(64), seed=9), TorusGrid(32))
    assert np.array_equal(direct.coeffs, via_64.coeffs)


def test_nested_vector_stays_solenoidal():
    v = nested_vector(TorusGrid(32), seed=2)
    assert v.solenoidal_defect() < 1e-12
