"""Seeded random fields with power-law spectra.

Used for initial data, for the estimate-checking ensembles, and by the
test suite.  All generators start from physical white noise, so the
coefficients are Hermitian by construction, and are band-limited to the
dealiasing region by default so that quadratic expressions formed from
them stay alias-free on the grid.
"""

import numpy as np

from .fields import SpectralScalar, SpectralSymTensor, SpectralVector
from .grid import TorusGrid
from .operators import leray_project


def random_scalar(grid: TorusGrid, seed: int, decay: float = 2.5,
                  amplitude: float = 1.0, band_limited: bool = True) -> SpectralScalar:
    """Random real scalar with |c_k| ~ |k|^{-decay} and L2 norm = amplitude.

    The mean mode is always zero.  Fixing the seed fixes the field
    bit-for-bit.
    """
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((grid.n, grid.n))
    coeffs = np.fft.fft2(noise) / grid.n ** 2
    safe = np.where(grid.k_sq > 0, grid.k_abs, 1.0)
    coeffs = coeffs * np.where(grid.k_sq > 0, safe ** -decay, 0.0)
    if band_limited:
        coeffs = coeffs * grid.dealias_mask
    norm = np.sqrt((np.abs(coeffs) ** 2).sum())
    if norm > 0:
        coeffs *= amplitude / (2.0 * np.pi * norm)
    return SpectralScalar(grid, coeffs)


def random_vector(grid: TorusGrid, seed: int, decay: float = 2.5,
                  amplitude: float = 1.0, solenoidal: bool = True) -> SpectralVector:
    """Random vector field, projected divergence-free unless asked not to.

    Component seeds are derived from the base seed, so vector and tensor
    draws with the same base seed do not share noise.
    """
    v = SpectralVector(
        random_scalar(grid, seed * 7 + 1, decay, amplitude),
        random_scalar(grid, seed * 7 + 2, decay, amplitude),
    )
    return leray_project(v) if solenoidal else v


def random_tensor(grid: TorusGrid, seed: int, decay: float = 2.5,
                  amplitude: float = 1.0) -> SpectralSymTensor:
    return SpectralSymTensor(
        random_scalar(grid, seed * 7 + 3, decay, amplitude),
        random_scalar(grid, seed * 7 + 4, decay, amplitude),
        random_scalar(grid, seed * 7 + 5, decay, amplitude),
    )


def restrict_scalar(source: SpectralScalar, target: TorusGrid) -> SpectralScalar:
    """Truncate a field to a coarser grid's retained wavenumbers.

    The integer lattice of the target is a subset of the source lattice
    (the target must not be finer), so this is plain coefficient
    restriction followed by the target's dealiasing mask.  Restrictions
    of one master field to several resolutions are nested truncations of
    the same function, which is what a resolution sweep should compare.
    """
    if target.n > source.grid.n:
        raise ValueError("target grid must not be finer than the source")
    k = np.fft.fftfreq(target.n, d=1.0 / target.n).astype(np.int64)
    idx = np.mod(k, source.grid.n)
    coeffs = source.coeffs[np.ix_(idx, idx)] * target.dealias_mask
    return SpectralScalar(target, coeffs)


def _restrict(field, target: TorusGrid):
    comps = [restrict_scalar(c, target) for c in field.components]
    if isinstance(field, SpectralScalar):
        return comps[0]
    if isinstance(field, SpectralVector):
        return SpectralVector(*comps)
    return SpectralSymTensor(*comps)


def nested_scalar(target: TorusGrid, seed: int, decay: float = 2.5,
                  amplitude: float = 1.0, master_n: int = 128) -> SpectralScalar:
    """One master realization restricted to the requested resolution.

    Drawing the master field at a fixed size and truncating makes fields
    across a resolution sweep approximations of the same function with a
    growing frequency cutoff, rather than independent draws.
    """
    master = random_scalar(TorusGrid(master_n), seed, decay, amplitude)
    return restrict_scalar(master, target)


def nested_vector(target: TorusGrid, seed: int, decay: float = 2.5,
                  amplitude: float = 1.0, master_n: int = 128,
                  solenoidal: bool = True) -> SpectralVector:
    master = random_vector(TorusGrid(master_n), seed, decay, amplitude, solenoidal)
    return _restrict(master, target)


def nested_tensor(target: TorusGrid, seed: int, decay: float = 2.5,
                  amplitude: float = 1.0, master_n: int = 128) -> SpectralSymTensor:
    master = random_tensor(TorusGrid(master_n), seed, decay, amplitude)
    return _restrict(master, target)
