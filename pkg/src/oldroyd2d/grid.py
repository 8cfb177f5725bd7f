"""Uniform Fourier grid on the periodic square [0, 2pi)^2."""

from fractions import Fraction

import numpy as np


class TorusGrid:
    """Square collocation grid with integer wavenumbers in [-n/2, n/2)^2.

    The grid owns the wavenumber lattice, the squared/absolute wavenumber
    arrays and the dealiasing mask.  Modes with
    max(|k1|, |k2|) > dealias_fraction * n/2 are dropped by the mask; the
    comparison is done in exact integer arithmetic so the cutoff does not
    depend on floating-point rounding.
    """

    def __init__(self, n: int, dealias_fraction=Fraction(2, 3)):
        if n % 2 != 0:
            raise ValueError("n must be even")
        if n < 16:
            raise ValueError("n must be at least 16")
        frac = Fraction(dealias_fraction)
        if not 0 < frac <= 1:
            raise ValueError("dealias_fraction must lie in (0, 1]")
        self.n = int(n)
        self.dealias_fraction = frac

        k = np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)
        self.k1 = k[:, None] * np.ones(self.n, dtype=np.int64)[None, :]
        self.k2 = np.ones(self.n, dtype=np.int64)[:, None] * k[None, :]
        self.k_sq = self.k1 ** 2 + self.k2 ** 2
        self.k_abs = np.sqrt(self.k_sq.astype(np.float64))

        # keep max(|k1|,|k2|) * 2 * den <= num * n, i.e. max|k| <= frac*n/2
        max_abs = np.maximum(np.abs(self.k1), np.abs(self.k2))
        self.dealias_mask = (
            2 * max_abs * frac.denominator <= frac.numerator * self.n
        )

        x = 2.0 * np.pi * np.arange(self.n) / self.n
        self.x1 = x[:, None] * np.ones(self.n)[None, :]
        self.x2 = np.ones(self.n)[:, None] * x[None, :]

    @property
    def cell_area(self) -> float:
        return (2.0 * np.pi / self.n) ** 2

    def __eq__(self, other):
        return (
            isinstance(other, TorusGrid)
            and self.n == other.n
            and self.dealias_fraction == other.dealias_fraction
        )

    def __hash__(self):
        return hash((self.n, self.dealias_fraction))

    def __repr__(self):
        return f"TorusGrid(n={self.n}, dealias_fraction={self.dealias_fraction})"
