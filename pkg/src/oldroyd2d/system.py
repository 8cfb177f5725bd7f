"""The coupled velocity/stress system and its derived diagnostics.

The model evolves a solenoidal velocity u and a symmetric stress tensor
tau on the periodic square:

    d_t u + u.grad u + nu Lam^{2a} u + grad p = kappa div tau
    d_t tau + u.grad tau + beta1 tau + eta Lam^{2b} tau = Q(grad u, tau) + alpha1 Du
    div u = 0

with Lam = (-Lap)^{1/2}, Du the symmetric velocity gradient, and the
quadratic interaction Q(grad u, tau) = W tau - tau W + b(Du tau + tau Du)
built from the rotation part W.  The "reduced" setting is kappa = alpha1
= 1, beta1 = 0, Q off; there the L2 energy of (u, tau) obeys an exact
balance and the combination gamma = omega - R_a tau, with R_a the
zero-or-negative-order operator (1/nu) Lam^{-2a} curl div, satisfies a
transport equation whose right-hand side is controlled by a commutator.
"""

from dataclasses import dataclass, replace


from .errors import UnsupportedConfigurationError
from .fields import SpectralScalar, SpectralSymTensor, SpectralVector
from .operators import (
    advect,
    curl,
    dealias,
    deformation_and_rotation,
    fractional_power,
    l2_norm,
    leray_project,
    tensor_curl_divergence,
    tensor_divergence,
)


@dataclass(frozen=True)
class SystemParams:
    """Model coefficients; see the module docstring for their roles."""

    nu: float = 1.0
    alpha: float = 1.0
    eta: float = 0.0
    beta: float = 0.0
    kappa: float = 1.0
    alpha1: float = 1.0
    beta1: float = 0.0
    b: float = 0.0
    q_enabled: bool = False

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("nu must be nonnegative")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.alpha1 <= 0:
            raise ValueError("alpha1 must be positive")
        if self.beta1 < 0:
            raise ValueError("beta1 must be nonnegative")
        if not -1.0 <= self.b <= 1.0:
            raise ValueError("b must lie in [-1, 1]")

    @classmethod
    def reduced(cls, nu: float, alpha: float, eta: float = 0.0, beta: float = 0.0):
        """The setting with unit couplings, no stress damping and Q off."""
        return cls(nu=nu, alpha=alpha, eta=eta, beta=beta)

    @property
    def is_reduced(self) -> bool:
        return (
            self.kappa == 1.0
            and self.alpha1 == 1.0
            and self.beta1 == 0.0
            and not self.q_enabled
        )

    @property
    def supports_gamma(self) -> bool:
        """Whether the gamma diagnostics are defined for these coefficients."""
        return self.nu > 0 and self.alpha >= 1.0

    def with_(self, **kw) -> "SystemParams":
        return replace(self, **kw)


class State:
    """Velocity, stress and the current time; validated on construction."""

    __slots__ = ("u", "tau", "time")

    def __init__(self, u: SpectralVector, tau: SpectralSymTensor, time: float = 0.0,
                 check: bool = True):
        if u.grid != tau.grid:
            raise ValueError("velocity and stress live on different grids")
        if check:
            if not u.is_real_field(1e-8) or not tau.is_real_field(1e-8):
                raise ValueError("state fields must be real (Hermitian coefficients)")
            if not u.is_solenoidal(1e-8):
                raise ValueError("velocity must be divergence-free")
        self.u = u
        self.tau = tau
        self.time = float(time)

    @property
    def grid(self):
        return self.u.grid

    def copy(self) -> "State":
        return State(self.u.copy(), self.tau.copy(), self.time, check=False)


def q_term(u: SpectralVector, tau: SpectralSymTensor, b: float) -> SpectralSymTensor:
    """Quadratic interaction W tau - tau W + b (Du tau + tau Du).

    Computed pointwise in physical space and dealiased.  The rotation
    bracket is trace-free and L2-orthogonal to tau.
    """
    if not -1.0 <= b <= 1.0:
        raise ValueError("b must lie in [-1, 1]")
    grid = u.grid
    du, w = deformation_and_rotation(u)
    d11, d12, d22 = (c.to_physical() for c in du.components)
    wp = w.to_physical()
    t11, t12, t22 = tau.to_physical()

    q11 = 2.0 * wp * t12
    q12 = wp * (t22 - t11)
    q22 = -2.0 * wp * t12
    if b != 0.0:
        q11 = q11 + b * 2.0 * (d11 * t11 + d12 * t12)
        q12 = q12 + b * (d12 * (t11 + t22) + t12 * (d11 + d22))
        q22 = q22 + b * 2.0 * (d12 * t12 + d22 * t22)
    out = SpectralSymTensor.from_physical(grid, q11, q12, q22)
    return dealias(out)


def riesz_alpha(tau: SpectralSymTensor, alpha: float, nu: float) -> SpectralScalar:
    """R_a tau = (1/nu) Lam^{-2a} curl div tau (defined for nu > 0, a >= 1)."""
    if nu <= 0:
        raise ValueError("nu must be positive for the Riesz-smoothed stress")
    if alpha < 1.0:
        raise ValueError("the Riesz-smoothed stress requires alpha >= 1")
    return (1.0 / nu) * fractional_power(tensor_curl_divergence(tau), -2.0 * alpha)


def gamma_field(state: State, params: SystemParams, normalized: bool = False) -> SpectralScalar:
    """gamma = omega - R_a tau; with normalized=True, scaled by 1/nu."""
    g = curl(state.u) - riesz_alpha(state.tau, params.alpha, params.nu)
    return (1.0 / params.nu) * g if normalized else g


def nonlinear_rhs(state: State, params: SystemParams):
    """All non-diagonal terms: advection, coupling, and Q if enabled.

    The diagonal dissipation (nu Lam^{2a} for u; beta1 + eta Lam^{2b} for
    tau) is excluded so an integrating-factor scheme can treat it exactly.
    """
    u, tau = state.u, state.tau
    u_phys = u.to_physical()
    du_nl = leray_project(
        params.kappa * tensor_divergence(tau) - advect(u, u, u_phys)
    )
    dtau_nl = params.alpha1 * deformation_and_rotation(u)[0] - advect(u, tau, u_phys)
    if params.q_enabled:
        dtau_nl = dtau_nl + q_term(u, tau, params.b)
    return du_nl, dtau_nl


def rhs(state: State, params: SystemParams):
    """Full tendency (d_t u, d_t tau) including dissipation."""
    du_nl, dtau_nl = nonlinear_rhs(state, params)
    du = du_nl - params.nu * fractional_power(state.u, 2.0 * params.alpha)
    dtau = dtau_nl - params.beta1 * state.tau
    if params.eta != 0.0:
        dtau = dtau - params.eta * fractional_power(state.tau, 2.0 * params.beta)
    return du, dtau


def commutator_advection(
    u: SpectralVector, tau: SpectralSymTensor, alpha: float, nu: float
) -> SpectralScalar:
    """[R_a, u.grad] tau = R_a(u.grad tau) - u.grad(R_a tau)."""
    return riesz_alpha(advect(u, tau), alpha, nu) - advect(
        u, riesz_alpha(tau, alpha, nu)
    )


def gamma_equation_residual(state: State, du_dt, dtau_dt, params: SystemParams) -> float:
    """Relative defect of the transport form of the gamma evolution.

    Given tendencies from rhs(), checks that

        d_t gamma + u.grad gamma + nu Lam^{2a} gamma
            = [R_a, u.grad] tau + (1/(2 nu)) Lam^{2-2a} omega
              + eta Lam^{2b} R_a tau

    holds; only dealiasing and round-off contribute to the defect.  The
    reformulation is specific to unit couplings with Q off, so other
    parameter sets are rejected.
    """
    if not params.is_reduced:
        raise UnsupportedConfigurationError(
            "the gamma equation applies to the reduced system "
            "(kappa = alpha1 = 1, beta1 = 0, Q off)"
        )
    if not params.supports_gamma:
        raise UnsupportedConfigurationError(
            "gamma diagnostics require nu > 0 and alpha >= 1"
        )
    u, tau = state.u, state.tau
    nu, alpha = params.nu, params.alpha
    omega = curl(u)
    gamma = omega - riesz_alpha(tau, alpha, nu)

    dt_gamma = curl(du_dt) - riesz_alpha(dtau_dt, alpha, nu)
    transport = advect(u, gamma)
    diss = nu * fractional_power(gamma, 2.0 * alpha)
    lhs = dt_gamma + transport + diss

    commutator = commutator_advection(u, tau, alpha, nu)
    source = (0.5 / nu) * fractional_power(omega, 2.0 - 2.0 * alpha)
    rhs_total = commutator + source
    if params.eta != 0.0:
        rhs_total = rhs_total + params.eta * fractional_power(
            riesz_alpha(tau, alpha, nu), 2.0 * params.beta
        )

    residual = l2_norm(lhs - rhs_total)
    scale = max(
        l2_norm(dt_gamma),
        l2_norm(transport),
        l2_norm(diss),
        l2_norm(commutator),
        l2_norm(source),
    )
    if scale == 0.0:
        return 0.0
    return residual / scale


def coupling_pairing_defect(state: State, params: SystemParams) -> float:
    """<kappa div tau, u> + <alpha1 Du, tau>, zero when kappa = alpha1.

    The exchange terms cancel in the energy balance; this returns the
    quadrature value for use as an invariant check.
    """
    from .operators import l2_inner

    du = deformation_and_rotation(state.u)[0]
    return l2_inner(params.kappa * tensor_divergence(state.tau), state.u) + l2_inner(
        params.alpha1 * du, state.tau
    )
