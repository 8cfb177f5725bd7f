"""Spectral field containers: scalar, velocity vector, symmetric 2-tensor.

Coefficients are stored in Fourier-series normalization,

    f(x) = sum_k c_k exp(i k.x),   c_k = fft2(f)[k] / n^2,

on the full complex lattice k in [-n/2, n/2)^2.  Real-valued fields are
Hermitian-symmetric: c_{-k} = conj(c_k).  With this normalization the
grid mean of |f|^2 equals sum_k |c_k|^2, i.e. the (1/n^4)-normalized sum
of squared fft2 amplitudes.
"""

import numpy as np

from .errors import GridMismatchError
from .grid import TorusGrid


def _reflect(coeffs: np.ndarray) -> np.ndarray:
    """Return the array c[-k] (indices negated modulo n on both axes)."""
    return np.roll(coeffs[::-1, ::-1], 1, axis=(0, 1))


def hermitian_symmetrize(coeffs: np.ndarray) -> np.ndarray:
    """Project a coefficient array onto the Hermitian (real-field) part."""
    return 0.5 * (coeffs + np.conj(_reflect(coeffs)))


def hermitian_defect(coeffs: np.ndarray) -> float:
    """Max deviation from Hermitian symmetry, relative to the largest mode."""
    scale = np.abs(coeffs).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(coeffs - np.conj(_reflect(coeffs))).max() / scale)


class SpectralScalar:
    """A real scalar field held as its Fourier coefficients."""

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: TorusGrid, coeffs: np.ndarray):
        if coeffs.shape != (grid.n, grid.n):
            raise GridMismatchError(
                f"coefficient array has shape {coeffs.shape}, expected {(grid.n, grid.n)}"
            )
        self.grid = grid
        self.coeffs = np.asarray(coeffs, dtype=np.complex128)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SpectralScalar":
        return cls(grid, np.zeros((grid.n, grid.n), dtype=np.complex128))

    @classmethod
    def from_physical(cls, grid: TorusGrid, values: np.ndarray) -> "SpectralScalar":
        values = np.asarray(values)
        if values.shape != (grid.n, grid.n):
            raise GridMismatchError(
                f"physical array has shape {values.shape}, expected {(grid.n, grid.n)}"
            )
        if np.iscomplexobj(values):
            raise TypeError("physical data must be real")
        return cls(grid, np.fft.fft2(values) / grid.n ** 2)

    def to_physical(self) -> np.ndarray:
        """Collocation values; the imaginary round-off part is discarded."""
        return np.real(np.fft.ifft2(self.coeffs) * self.grid.n ** 2)

    def copy(self) -> "SpectralScalar":
        return SpectralScalar(self.grid, self.coeffs.copy())

    def hermitianized(self) -> "SpectralScalar":
        return SpectralScalar(self.grid, hermitian_symmetrize(self.coeffs))

    def is_real_field(self, tol: float = 1e-10) -> bool:
        return hermitian_defect(self.coeffs) <= tol

    def mean(self) -> float:
        return float(self.coeffs[0, 0].real)

    @property
    def components(self):
        return (self,)

    @property
    def component_weights(self):
        return (1.0,)

    def __add__(self, other):
        self._check_same_grid(other)
        return SpectralScalar(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_same_grid(other)
        return SpectralScalar(self.grid, self.coeffs - other.coeffs)

    def __neg__(self):
        return SpectralScalar(self.grid, -self.coeffs)

    def __mul__(self, scalar):
        return SpectralScalar(self.grid, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def _check_same_grid(self, other):
        if not isinstance(other, SpectralScalar):
            raise TypeError(f"expected SpectralScalar, got {type(other).__name__}")
        if other.grid != self.grid:
            raise GridMismatchError("fields live on different grids")


class SpectralVector:
    """A real 2-component vector field (typically a velocity)."""

    __slots__ = ("u1", "u2")

    def __init__(self, u1: SpectralScalar, u2: SpectralScalar):
        if u1.grid != u2.grid:
            raise GridMismatchError("vector components live on different grids")
        self.u1 = u1
        self.u2 = u2

    @property
    def grid(self) -> TorusGrid:
        return self.u1.grid

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SpectralVector":
        return cls(SpectralScalar.zeros(grid), SpectralScalar.zeros(grid))

    @classmethod
    def from_physical(cls, grid, v1, v2) -> "SpectralVector":
        return cls(
            SpectralScalar.from_physical(grid, v1),
            SpectralScalar.from_physical(grid, v2),
        )

    def to_physical(self):
        return self.u1.to_physical(), self.u2.to_physical()

    def copy(self):
        return SpectralVector(self.u1.copy(), self.u2.copy())

    def hermitianized(self):
        return SpectralVector(self.u1.hermitianized(), self.u2.hermitianized())

    def is_real_field(self, tol: float = 1e-10) -> bool:
        return self.u1.is_real_field(tol) and self.u2.is_real_field(tol)

    def solenoidal_defect(self) -> float:
        """Relative size of k.u_hat(k), zero for divergence-free fields."""
        grid = self.grid
        div = grid.k1 * self.u1.coeffs + grid.k2 * self.u2.coeffs
        scale = (grid.k_abs * np.maximum(np.abs(self.u1.coeffs), np.abs(self.u2.coeffs))).max()
        if scale == 0.0:
            return 0.0
        return float(np.abs(div).max() / scale)

    def is_solenoidal(self, tol: float = 1e-10) -> bool:
        return self.solenoidal_defect() <= tol

    @property
    def components(self):
        return (self.u1, self.u2)

    @property
    def component_weights(self):
        return (1.0, 1.0)

    def __add__(self, other):
        return SpectralVector(self.u1 + other.u1, self.u2 + other.u2)

    def __sub__(self, other):
        return SpectralVector(self.u1 - other.u1, self.u2 - other.u2)

    def __neg__(self):
        return SpectralVector(-self.u1, -self.u2)

    def __mul__(self, scalar):
        return SpectralVector(self.u1 * scalar, self.u2 * scalar)

    __rmul__ = __mul__


class SpectralSymTensor:
    """A real symmetric 2x2 tensor field stored as (t11, t12, t22).

    L2-type pairings weight the off-diagonal component twice, matching the
    Frobenius inner product of the full tensor.
    """

    __slots__ = ("t11", "t12", "t22")

    def __init__(self, t11: SpectralScalar, t12: SpectralScalar, t22: SpectralScalar):
        if t11.grid != t12.grid or t11.grid != t22.grid:
            raise GridMismatchError("tensor components live on different grids")
        self.t11 = t11
        self.t12 = t12
        self.t22 = t22

    @property
    def grid(self) -> TorusGrid:
        return self.t11.grid

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SpectralSymTensor":
        z = SpectralScalar.zeros(grid)
        return cls(z, z.copy(), z.copy())

    @classmethod
    def from_physical(cls, grid, v11, v12, v22) -> "SpectralSymTensor":
        return cls(
            SpectralScalar.from_physical(grid, v11),
            SpectralScalar.from_physical(grid, v12),
            SpectralScalar.from_physical(grid, v22),
        )

    def to_physical(self):
        return self.t11.to_physical(), self.t12.to_physical(), self.t22.to_physical()

    def copy(self):
        return SpectralSymTensor(self.t11.copy(), self.t12.copy(), self.t22.copy())

    def hermitianized(self):
        return SpectralSymTensor(
            self.t11.hermitianized(), self.t12.hermitianized(), self.t22.hermitianized()
        )

    def is_real_field(self, tol: float = 1e-10) -> bool:
        return all(c.is_real_field(tol) for c in self.components)

    @property
    def components(self):
        return (self.t11, self.t12, self.t22)

    @property
    def component_weights(self):
        return (1.0, 2.0, 1.0)

    def __add__(self, other):
        return SpectralSymTensor(
            self.t11 + other.t11, self.t12 + other.t12, self.t22 + other.t22
        )

    def __sub__(self, other):
        return SpectralSymTensor(
            self.t11 - other.t11, self.t12 - other.t12, self.t22 - other.t22
        )

    def __neg__(self):
        return SpectralSymTensor(-self.t11, -self.t12, -self.t22)

    def __mul__(self, scalar):
        return SpectralSymTensor(self.t11 * scalar, self.t12 * scalar, self.t22 * scalar)

    __rmul__ = __mul__


def same_kind(field, coeff_arrays):
    """Rebuild a field of the same rank from raw coefficient arrays."""
    grid = field.grid
    scalars = [SpectralScalar(grid, c) for c in coeff_arrays]
    if isinstance(field, SpectralScalar):
        (out,) = scalars
        return out
    if isinstance(field, SpectralVector):
        return SpectralVector(*scalars)
    if isinstance(field, SpectralSymTensor):
        return SpectralSymTensor(*scalars)
    raise TypeError(f"not a spectral field: {type(field).__name__}")
