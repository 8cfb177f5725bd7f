"""Multiplier calculus and pointwise products on spectral fields."""

import numpy as np

from .errors import GridMismatchError
from .fields import (
    SpectralScalar,
    SpectralSymTensor,
    SpectralVector,
    same_kind,
)


def _map_components(field, fn):
    return same_kind(field, [fn(c.coeffs) for c in field.components])


def fractional_power(field, s: float):
    """Apply |k|^s mode-wise (any rank).

    The k=0 mode is multiplied by zero for s > 0, left unchanged for s = 0,
    and zeroed for s < 0 (the inverse power is only defined on mean-zero
    fields; callers get the projection onto them).
    """
    grid = field.grid
    if s == 0:
        return _map_components(field, lambda c: c.copy())
    with np.errstate(divide="ignore"):
        mult = np.where(grid.k_sq > 0, grid.k_abs, 1.0) ** s
    mult[0, 0] = 0.0
    return _map_components(field, lambda c: c * mult)


def partial_derivative(f: SpectralScalar, axis: int) -> SpectralScalar:
    """d/dx_axis as the multiplier i*k_axis (axis is 1 or 2)."""
    grid = f.grid
    if axis == 1:
        k = grid.k1
    elif axis == 2:
        k = grid.k2
    else:
        raise ValueError("axis must be 1 or 2")
    return SpectralScalar(grid, 1j * k * f.coeffs)


def gradient(f: SpectralScalar) -> SpectralVector:
    return SpectralVector(partial_derivative(f, 1), partial_derivative(f, 2))


def divergence(v: SpectralVector) -> SpectralScalar:
    grid = v.grid
    return SpectralScalar(grid, 1j * (grid.k1 * v.u1.coeffs + grid.k2 * v.u2.coeffs))


def tensor_divergence(t: SpectralSymTensor) -> SpectralVector:
    """(div t)_i = d_j t_ij for the symmetric tensor t."""
    grid = t.grid
    d1 = 1j * (grid.k1 * t.t11.coeffs + grid.k2 * t.t12.coeffs)
    d2 = 1j * (grid.k1 * t.t12.coeffs + grid.k2 * t.t22.coeffs)
    return SpectralVector(SpectralScalar(grid, d1), SpectralScalar(grid, d2))


def curl(v: SpectralVector) -> SpectralScalar:
    """Scalar vorticity d_1 u_2 - d_2 u_1."""
    grid = v.grid
    return SpectralScalar(grid, 1j * (grid.k1 * v.u2.coeffs - grid.k2 * v.u1.coeffs))


def tensor_curl_divergence(t: SpectralSymTensor) -> SpectralScalar:
    """curl(div t) = (d_1^2 - d_2^2) t_12 + d_1 d_2 (t_22 - t_11)."""
    grid = t.grid
    c = (grid.k2 ** 2 - grid.k1 ** 2) * t.t12.coeffs - grid.k1 * grid.k2 * (
        t.t22.coeffs - t.t11.coeffs
    )
    return SpectralScalar(grid, c)


def laplacian(field):
    grid = field.grid
    return _map_components(field, lambda c: -grid.k_sq * c)


_DERIVATIVE_KINDS = {
    "grad": (SpectralScalar, gradient),
    "div_vec": (SpectralVector, divergence),
    "div_tensor": (SpectralSymTensor, tensor_divergence),
    "curl_vec": (SpectralVector, curl),
    "curl_div_tensor": (SpectralSymTensor, tensor_curl_divergence),
    "laplacian": (object, laplacian),
}


def apply_derivative(field, kind: str):
    """Dispatch on a named derivative; raises TypeError on rank mismatch."""
    try:
        expected, fn = _DERIVATIVE_KINDS[kind]
    except KeyError:
        raise ValueError(
            f"unknown derivative kind {kind!r}; known: {sorted(_DERIVATIVE_KINDS)}"
        ) from None
    if expected is not object and not isinstance(field, expected):
        raise TypeError(
            f"derivative {kind!r} expects {expected.__name__}, got {type(field).__name__}"
        )
    return fn(field)


def leray_project(v: SpectralVector) -> SpectralVector:
    """Remove the gradient part: v - k (k.v)/|k|^2; the k=0 mode passes through."""
    grid = v.grid
    ksq = np.where(grid.k_sq > 0, grid.k_sq, 1).astype(np.float64)
    kv = (grid.k1 * v.u1.coeffs + grid.k2 * v.u2.coeffs) / ksq
    p1 = v.u1.coeffs - grid.k1 * kv
    p2 = v.u2.coeffs - grid.k2 * kv
    return SpectralVector(SpectralScalar(grid, p1), SpectralScalar(grid, p2))


def deformation_and_rotation(u: SpectralVector):
    """Symmetric gradient Du and the rotation scalar w = (d_1 u_2 - d_2 u_1)/2.

    w is the single independent entry of the antisymmetric part of the
    velocity gradient, i.e. half the vorticity.
    """
    d11 = partial_derivative(u.u1, 1)
    d22 = partial_derivative(u.u2, 2)
    d12 = 0.5 * (partial_derivative(u.u2, 1) + partial_derivative(u.u1, 2))
    w = 0.5 * curl(u)
    return SpectralSymTensor(d11, d12, d22), w


def dealias(field):
    """Zero all modes outside the grid's dealiasing region."""
    mask = field.grid.dealias_mask
    return _map_components(field, lambda c: c * mask)


def multiply(f: SpectralScalar, g: SpectralScalar) -> SpectralScalar:
    """Dealiased pointwise product of two scalar fields."""
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")
    prod = SpectralScalar.from_physical(f.grid, f.to_physical() * g.to_physical())
    return dealias(prod)


def advect(u: SpectralVector, field, u_phys=None):
    """Dealiased advection u.grad(field), computed in physical space.

    u_phys can carry precomputed collocation values of u to avoid repeated
    inverse transforms in inner loops.
    """
    if u.grid != field.grid:
        raise GridMismatchError("fields live on different grids")
    grid = u.grid
    if u_phys is None:
        u_phys = u.to_physical()
    a1, a2 = u_phys
    out = []
    for comp in field.components:
        g1 = partial_derivative(comp, 1).to_physical()
        g2 = partial_derivative(comp, 2).to_physical()
        prod = SpectralScalar.from_physical(grid, a1 * g1 + a2 * g2)
        out.append(dealias(prod).coeffs)
    return same_kind(field, out)


def l2_inner(f, g) -> float:
    """L2 inner product over the domain via Parseval (tensor-weighted)."""
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")
    if type(f) is not type(g):
        raise TypeError("fields must have the same rank")
    total = 0.0
    for cf, cg, w in zip(f.components, g.components, f.component_weights):
        total += w * float(np.real(np.vdot(cf.coeffs, cg.coeffs)))
    return 4.0 * np.pi ** 2 * total


def l2_norm_sq(field) -> float:
    return l2_inner(field, field)


def l2_norm(field) -> float:
    return float(np.sqrt(max(l2_norm_sq(field), 0.0)))
