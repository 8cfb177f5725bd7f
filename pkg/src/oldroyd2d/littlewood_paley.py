"""Dyadic frequency decomposition and the norms built on it.

The partition of unity follows the classical construction: a radial bump
chi equal to 1 on {|xi| <= 3/4} and 0 on {|xi| >= 4/3}, smoothed with the
exp(-1/t) mollifier profile, and phi(xi) = chi(xi/2) - chi(xi) supported
on the annulus {3/4 <= |xi| <= 8/3}.  Telescoping gives

    chi(xi) + sum_{j>=0} phi(2^-j xi) = 1          (all xi)
    sum_{j in Z} phi(2^-j xi) = 1                  (xi != 0)

and blocks two or more octaves apart have disjoint supports.

Norm conventions: L^p uses the uniform quadrature weight (2pi/n)^2;
multi-component fields (vectors, symmetric tensors, gradient stacks) are
measured through their pointwise weighted Euclidean magnitude.  Besov
norms sum dyadic blocks over the j-window active on the grid.  On the
integer lattice the smallest nonzero frequency is 1, so homogeneous
blocks vanish identically below j = -1; the reported j-window makes that
truncation explicit.
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PartitionValidationError
from .fields import SpectralScalar, same_kind
from .operators import fractional_power, partial_derivative

INF = math.inf


def _bump(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C-infinity monotone step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    a = _bump(t)
    b = _bump(1.0 - t)
    return a / (a + b)


class DyadicPartition:
    """Radial profiles chi/phi and their lattice multipliers (cached)."""

    def __init__(self, profile_kind: str = "exp_bump", validate: bool = True):
        if profile_kind != "exp_bump":
            raise ValueError(f"unknown profile kind {profile_kind!r}")
        self.profile_kind = profile_kind
        self._lattice_cache = {}
        if validate:
            self.validate()

    def chi(self, r) -> np.ndarray:
        """Low-pass profile: 1 on r <= 3/4, 0 on r >= 4/3, smooth between."""
        r = np.asarray(r, dtype=np.float64)
        return _smoothstep((4.0 / 3.0 - r) / (4.0 / 3.0 - 3.0 / 4.0))

    def phi(self, r) -> np.ndarray:
        return self.chi(np.asarray(r, dtype=np.float64) / 2.0) - self.chi(r)

    def validate(self, samples: int = 10_000, tol: float = 1e-12) -> None:
        """Check partition-of-unity and support identities on sampled radii."""
        rng = np.random.default_rng(0)
        r = 10.0 ** rng.uniform(-6, 4, samples)

        j_hi = int(math.ceil(math.log2(r.max() * 4.0 / 3.0))) + 2
        total = self.chi(r).copy()
        for j in range(0, j_hi + 1):
            total += self.phi(r / 2.0 ** j)
        if np.abs(total - 1.0).max() > tol:
            raise PartitionValidationError(
                "inhomogeneous partition sum deviates from 1 by "
                f"{np.abs(total - 1.0).max():.3e}"
            )

        j_lo = -int(math.ceil(math.log2(4.0 / 3.0 / r.min()))) - 2
        total = np.zeros_like(r)
        for j in range(j_lo, j_hi + 1):
            total += self.phi(r / 2.0 ** j)
        if np.abs(total - 1.0).max() > tol:
            raise PartitionValidationError(
                "homogeneous partition sum deviates from 1 by "
                f"{np.abs(total - 1.0).max():.3e}"
            )

        r_line = np.linspace(0.0, 4.0, 4001)
        phi_vals = self.phi(r_line)
        if np.abs(phi_vals[(r_line < 0.75) | (r_line > 8.0 / 3.0)]).max() > tol:
            raise PartitionValidationError("phi leaks outside [3/4, 8/3]")
        chi_vals = self.chi(r_line)
        if np.abs(chi_vals[r_line <= 0.75] - 1.0).max() > tol:
            raise PartitionValidationError("chi is not 1 on [0, 3/4]")
        if np.abs(chi_vals[r_line >= 4.0 / 3.0]).max() > tol:
            raise PartitionValidationError("chi does not vanish on [4/3, inf)")
        # blocks two or more octaves apart never overlap
        if np.abs(phi_vals * self.phi(r_line / 4.0)).max() > tol:
            raise PartitionValidationError("phi overlaps its 2-shifted copy")

    def _lattice(self, grid, j: int, kind: str) -> np.ndarray:
        key = (grid.n, grid.dealias_fraction, j, kind)
        mult = self._lattice_cache.get(key)
        if mult is None:
            fn = self.chi if kind == "chi" else self.phi
            mult = fn(grid.k_abs / 2.0 ** j)
            self._lattice_cache[key] = mult
        return mult

    def chi_lattice(self, grid, j: int = 0) -> np.ndarray:
        return self._lattice(grid, j, "chi")

    def phi_lattice(self, grid, j: int) -> np.ndarray:
        return self._lattice(grid, j, "phi")


@lru_cache(maxsize=4)
def build_partition(profile_kind: str = "exp_bump") -> DyadicPartition:
    """Validated partition, memoized; raises PartitionValidationError on failure."""
    return DyadicPartition(profile_kind, validate=True)


def _partition(partition) -> DyadicPartition:
    return partition if partition is not None else build_partition()


def j_max(grid) -> int:
    """Highest dyadic index that can be active on the grid."""
    return int(math.ceil(math.log2(grid.n / 2))) + 1


J_MIN = -1  # lowest index whose annulus meets the nonzero integer lattice


def block(field, j: int, homogeneous: bool = False, partition=None):
    """Dyadic block: phi(2^-j |k|) multiplier; inhomogeneous j=-1 is the
    chi low-pass and j <= -2 gives the zero field."""
    part = _partition(partition)
    grid = field.grid
    if not homogeneous:
        if j <= -2:
            return same_kind(field, [np.zeros_like(c.coeffs) for c in field.components])
        if j == -1:
            mult = part.chi_lattice(grid, 0)
            return same_kind(field, [c.coeffs * mult for c in field.components])
    mult = part.phi_lattice(grid, j)
    return same_kind(field, [c.coeffs * mult for c in field.components])


def low_pass(field, j: int, homogeneous: bool = False, partition=None):
    """Running low-pass chi(2^-j |k|); the inhomogeneous version is zero
    for j <= -1."""
    part = _partition(partition)
    if not homogeneous and j <= -1:
        return same_kind(field, [np.zeros_like(c.coeffs) for c in field.components])
    mult = part.chi_lattice(field.grid, j)
    return same_kind(field, [c.coeffs * mult for c in field.components])


def _component_list(obj):
    """Normalize a field or an explicit [(scalar, weight), ...] list."""
    if isinstance(obj, (list, tuple)):
        return list(obj)
    return list(zip(obj.components, obj.component_weights))


def gradient_components(field):
    """All first partials of every component, for gradient-magnitude norms."""
    out = []
    for comp, w in _component_list(field):
        out.append((partial_derivative(comp, 1), w))
        out.append((partial_derivative(comp, 2), w))
    return out


def _magnitude(obj) -> np.ndarray:
    comps = _component_list(obj)
    total = None
    for comp, w in comps:
        phys = comp.to_physical()
        term = w * phys ** 2
        total = term if total is None else total + term
    return np.sqrt(total)


def _grid_of(obj):
    comps = _component_list(obj)
    return comps[0][0].grid


def lp_norm(obj, p) -> float:
    """L^p norm by uniform quadrature; p=inf is the grid max."""
    if p < 1:
        raise ValueError("p must be at least 1")
    mag = _magnitude(obj)
    if p == INF:
        return float(mag.max())
    grid = _grid_of(obj)
    return float((mag ** p).sum() * grid.cell_area) ** (1.0 / p)


def lq_norm_exact(obj, q: int) -> float:
    """L^q norm with even integer q, exact for band-limited fields.

    The integrand |f|^q is a trigonometric polynomial; the field is
    resampled on a grid fine enough that the uniform rule integrates it
    exactly.
    """
    if q % 2 != 0 or q < 2:
        raise ValueError("q must be an even integer >= 2")
    comps = _component_list(obj)
    grid = _grid_of(obj)
    scale = max(np.abs(c.coeffs).max() for c, _ in comps)
    if scale == 0.0:
        return 0.0
    band = 0
    for comp, _ in comps:
        active = np.abs(comp.coeffs) > 1e-14 * scale
        if active.any():
            band = max(
                band,
                int(np.abs(grid.k1[active]).max()),
                int(np.abs(grid.k2[active]).max()),
            )
    m = grid.n
    while m <= q * band:
        m *= 2
    total = None
    for comp, w in comps:
        phys = _resample_physical(comp, m)
        term = w * phys ** 2
        total = term if total is None else total + term
    return float((total ** (q // 2)).sum() * (2.0 * np.pi / m) ** 2) ** (1.0 / q)


def _resample_physical(comp: SpectralScalar, m: int) -> np.ndarray:
    """Collocation values of a scalar on an m x m grid (m >= n)."""
    n = comp.grid.n
    if m == n:
        return comp.to_physical()
    fine = np.zeros((m, m), dtype=np.complex128)
    half = n // 2
    rows = np.r_[0:half, m - half : m]
    src_rows = np.r_[0:half, n - half : n]
    fine[np.ix_(rows, rows)] = comp.coeffs[np.ix_(src_rows, src_rows)]
    return np.real(np.fft.ifft2(fine) * m ** 2)


@dataclass(frozen=True)
class BesovSpec:
    """Parameters of a Besov norm B^s_{p,q}."""

    s: float
    p: float
    q: float
    homogeneous: bool = False

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError("Besov integrability indices must be >= 1")


def _check_mean_for_homogeneous(obj, tol=1e-12):
    comps = _component_list(obj)
    scale = max(np.abs(c.coeffs).max() for c, _ in comps)
    mean = max(abs(c.coeffs[0, 0]) for c, _ in comps)
    if scale > 0 and mean > tol * scale:
        warnings.warn(
            "homogeneous norm of a field with nonzero mean: the k=0 mode is excluded",
            stacklevel=3,
        )


def besov_norm(obj, spec: BesovSpec, partition=None) -> float:
    """Block-sum Besov norm over the j-window active on the grid."""
    part = _partition(partition)
    grid = _grid_of(obj)
    comps = _component_list(obj)
    if spec.homogeneous:
        _check_mean_for_homogeneous(obj)
    j_lo, j_hi = J_MIN, j_max(grid)
    terms = []
    for j in range(j_lo, j_hi + 1):
        blocked = [(block(c, j, spec.homogeneous, part), w) for c, w in comps]
        terms.append(2.0 ** (j * spec.s) * lp_norm(blocked, spec.p))
    return _lq_sequence(terms, spec.q)


def besov_norm_lowpass(obj, spec: BesovSpec, partition=None) -> float:
    """Low-pass form of B^s_{p,q} for s < 0: the l^q sum of 2^{js}||S_j f||_p.

    Past the index where the low-pass saturates on the grid the terms are
    a geometric sequence; their tail is added in closed form.
    """
    if spec.s >= 0:
        raise ValueError("the low-pass Besov form requires s < 0")
    part = _partition(partition)
    grid = _grid_of(obj)
    comps = _component_list(obj)
    if spec.homogeneous:
        _check_mean_for_homogeneous(obj)
        comps = [
            (SpectralScalar(grid, np.where(grid.k_sq > 0, c.coeffs, 0.0)), w)
            for c, w in comps
        ]
    k_top = math.sqrt(2.0) * grid.n / 2.0
    j_sat = int(math.ceil(math.log2(k_top / 0.75)))
    terms = []
    for j in range(0, j_sat + 1):
        lowed = [(low_pass(c, j, spec.homogeneous, part), w) for c, w in comps]
        terms.append(2.0 ** (j * spec.s) * lp_norm(lowed, spec.p))
    full = lp_norm(comps, spec.p)
    if spec.q == INF:
        tail = 2.0 ** ((j_sat + 1) * spec.s) * full
        return max(max(terms), tail)
    ratio = 2.0 ** (spec.s * spec.q)
    tail = full ** spec.q * ratio ** (j_sat + 1) / (1.0 - ratio)
    return float((sum(t ** spec.q for t in terms) + tail) ** (1.0 / spec.q))


def _lq_sequence(terms, q) -> float:
    if q == INF:
        return float(max(terms)) if terms else 0.0
    return float(sum(t ** q for t in terms) ** (1.0 / q))


def sobolev_norm(obj, s: float, homogeneous: bool = False) -> float:
    """H^s (or the seminorm form) through the |k|^s multiplier."""
    comps = _component_list(obj)
    shifted = [(fractional_power(c, s), w) for c, w in comps]
    dot = lp_norm(shifted, 2.0)
    if homogeneous:
        return dot
    return lp_norm(comps, 2.0) + dot


def bmo_seminorm(f: SpectralScalar) -> float:
    """Mean-oscillation seminorm over dyadic squares.

    Squares of side 2pi/2^m for m = 0 .. log2(n), at every grid translate
    (periodic).  The coarsest scale is the full square, for which every
    translate gives the same oscillation.
    """
    phys = f.to_physical()
    n = f.grid.n
    best = float(np.abs(phys - phys.mean()).mean())
    levels = int(math.log2(n))
    for m in range(1, levels + 1):
        side = n >> m
        if side < 2:
            break
        wrapped = np.pad(phys, ((0, side), (0, side)), mode="wrap")
        csum = wrapped.cumsum(axis=0).cumsum(axis=1)
        csum = np.pad(csum, ((1, 0), (1, 0)))
        box = (
            csum[side:, side:]
            - csum[:-side, side:]
            - csum[side:, :-side]
            + csum[:-side, :-side]
        )
        mu = box[:n, :n] / side ** 2
        acc = np.zeros((n, n))
        for d1 in range(side):
            rows = np.roll(phys, -d1, axis=0)
            windows = np.lib.stride_tricks.sliding_window_view(
                np.pad(rows, ((0, 0), (0, side - 1)), mode="wrap"), side, axis=1
            )
            acc += np.abs(windows - mu[:, :, None]).sum(axis=2)
        best = max(best, float(acc.max()) / side ** 2)
    return best


def bernstein_ratio(
    obj,
    gamma: float,
    p: float,
    q: float,
    j: int,
    k_lo: float = 0.75,
    k_hi: float = 8.0 / 3.0,
):
    """Measured constants for the two shell inequalities.

    For a field spectrally supported in {k_lo 2^j <= |k| <= k_hi 2^j},
    returns (lower_ratio, upper_ratio) with

        lower_ratio = ||(-Lap)^g f||_q / (2^{2gj} ||f||_q)
        upper_ratio = ||(-Lap)^g f||_q / (2^{2gj + 2j(1/p - 1/q)} ||f||_p)

    so the lower (upper) inequality asserts the ratio stays above (below)
    a fixed constant.  Requires p <= q.
    """
    if p > q:
        raise ValueError("bernstein_ratio requires p <= q")
    if p < 1 or q < 1:
        raise ValueError("integrability indices must be >= 1")
    comps = _component_list(obj)
    grid = _grid_of(comps)
    scale = max(np.abs(c.coeffs).max() for c, _ in comps)
    if scale == 0.0:
        raise ValueError("field is identically zero")
    lo, hi = k_lo * 2.0 ** j, k_hi * 2.0 ** j
    outside = (grid.k_abs < lo - 1e-9) | (grid.k_abs > hi + 1e-9)
    for c, _ in comps:
        if np.abs(c.coeffs[outside]).max() > 1e-13 * scale:
            raise ValueError(
                f"field is not supported in the shell [{lo:.3g}, {hi:.3g}]"
            )
    powered = [(fractional_power(c, 2.0 * gamma), w) for c, w in comps]
    lhs = lp_norm(powered, q)
    inv_p = 0.0 if p == INF else 1.0 / p
    inv_q = 0.0 if q == INF else 1.0 / q
    lower = lhs / (2.0 ** (2.0 * gamma * j) * lp_norm(comps, q))
    upper = lhs / (
        2.0 ** (2.0 * gamma * j + 2.0 * j * (inv_p - inv_q)) * lp_norm(comps, p)
    )
    return lower, upper


@dataclass(frozen=True)
class NormRequest:
    """One norm evaluation: kind in {lp, sobolev, besov, besov_lowpass, bmo}."""

    kind: str
    s: float = 0.0
    p: float = 2.0
    q: float = 2.0
    homogeneous: bool = False
    of_gradient: bool = False


@dataclass(frozen=True)
class NormResult:
    field_id: str
    norm_kind: str
    s: float
    p: float
    q: float
    homogeneous: bool
    value: float
    j_min: int | None
    j_max: int | None


def evaluate_norm(field, request: NormRequest, partition=None) -> tuple:
    """Returns (value, j_min, j_max); the j-window is None for non-dyadic norms."""
    obj = gradient_components(field) if request.of_gradient else field
    grid = _grid_of(_component_list(obj))
    if request.kind == "lp":
        return lp_norm(obj, request.p), None, None
    if request.kind == "sobolev":
        return sobolev_norm(obj, request.s, request.homogeneous), None, None
    if request.kind == "besov":
        spec = BesovSpec(request.s, request.p, request.q, request.homogeneous)
        return besov_norm(obj, spec, partition), J_MIN, j_max(grid)
    if request.kind == "besov_lowpass":
        spec = BesovSpec(request.s, request.p, request.q, request.homogeneous)
        return besov_norm_lowpass(obj, spec, partition), 0, j_max(grid)
    if request.kind == "bmo":
        if not isinstance(field, SpectralScalar) or request.of_gradient:
            raise ValueError("bmo is defined here for scalar fields only")
        return bmo_seminorm(field), None, None
    raise ValueError(f"unknown norm kind {request.kind!r}")
