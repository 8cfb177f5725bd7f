"""Empirical boundedness checks for the package's bilinear estimates.

Each estimate asserts LHS <= C * RHS with an unspecified constant.  A
check computes the ratio LHS/RHS over a seeded random ensemble and
across a sweep (resolution, multiplier scale, or block index); the
numerical signature of a uniform constant is a ratio that stays bounded
along the sweep within a declared slack factor.  These runs can falsify
an estimate but never prove it: a passing report means "consistent
with", nothing stronger.  Everything is computed on the periodic torus
as a surrogate for the whole plane.
"""

import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .ensembles import nested_scalar, nested_tensor, nested_vector
from .fields import SpectralScalar
from .grid import TorusGrid
from .littlewood_paley import (
    INF,
    BesovSpec,
    J_MIN,
    besov_norm,
    block,
    build_partition,
    gradient_components,
    j_max,
    low_pass,
    lp_norm,
    lq_norm_exact,
    sobolev_norm,
    _resample_physical,
    bmo_seminorm,
)
from .operators import (
    advect,
    fractional_power,
    l2_inner,
    l2_norm,
    multiply,
)
from .system import commutator_advection

ESTIMATE_IDS = (
    "commutator_sum_u",
    "commutator_sum_tau_two_term",
    "commutator_sum_tau_mixed",
    "riesz_commutator",
    "smooth_commutator",
    "kernel_commutator",
    "riesz_bmo_commutator",
    "generalized_bernstein",
)

DECAYS = (2.0, 2.5, 3.0)

CAVEATS = (
    "checked on the periodic torus [0, 2pi)^2 as a surrogate for the plane",
    "random ensembles can falsify uniform boundedness, not prove it; "
    "a pass means consistent with the estimate",
)

_RATIO_EPS = 1e-13


def _safe_ratio(lhs: float, rhs: float, scale: float) -> float:
    """LHS/RHS with degenerate right sides mapped to exactly 0.0.

    When the right side vanishes at round-off level relative to the
    natural size of the inputs, the sample carries no information about
    the constant; a left side that is genuinely nonzero there would be a
    counterexample and is surfaced as inf.
    """
    if rhs <= _RATIO_EPS * scale:
        return 0.0 if lhs <= _RATIO_EPS * max(scale, 1.0) else math.inf
    return lhs / rhs


# --------------------------------------------------------------- reports


@dataclass
class EstimateReport:
    estimate_id: str
    params: dict
    sweep_axis: str
    ensemble_size: int
    slack: float
    samples: list
    sweep: list
    max_ratio: float
    median_ratio: float
    min_ratio: float
    passed: bool
    caveats: tuple = CAVEATS
    warnings: list = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["caveats"] = list(self.caveats)
        return out


def _assemble_report(estimate_id, params, sweep_axis, groups, slack,
                     warnings=None, mode="sweep") -> EstimateReport:
    """Aggregate per-sample ratios into a report.

    groups: [(sweep_value, [(seed, ratio), ...]), ...] ordered coarse to
    fine.  mode selects the pass rule: "sweep" compares the max ratio at
    the last sweep point against the first (growth along the sweep is
    the falsification signature of a missing uniform constant), "lower"
    does the same for minima of a lower-bound estimate, which must
    additionally stay away from zero.
    """
    sweep_rows = []
    samples = []
    for value, pairs in groups:
        ratios = [r for _, r in pairs]
        sweep_rows.append({
            "value": value,
            "max_ratio": max(ratios),
            "median_ratio": float(statistics.median(ratios)),
            "min_ratio": min(ratios),
        })
        samples.extend(
            {"sweep": value, "seed": seed, "ratio": ratio}
            for seed, ratio in pairs
        )
    all_ratios = [row["ratio"] for row in samples]
    finite = all(math.isfinite(r) and r >= 0 for r in all_ratios)
    maxima = [row["max_ratio"] for row in sweep_rows]
    if mode == "sweep":
        passed = finite and maxima[-1] <= slack * maxima[0]
    elif mode == "lower":
        minima = [row["min_ratio"] for row in sweep_rows]
        passed = finite and min(minima) > 0 and max(minima) <= slack * min(minima)
    else:
        raise ValueError(f"unknown pass mode {mode!r}")
    return EstimateReport(
        estimate_id=estimate_id,
        params=dict(params),
        sweep_axis=sweep_axis,
        ensemble_size=len(samples),
        slack=slack,
        samples=samples,
        sweep=sweep_rows,
        max_ratio=max(all_ratios),
        median_ratio=float(statistics.median(all_ratios)),
        min_ratio=min(all_ratios),
        passed=passed,
        warnings=list(warnings or []),
    )


def _thread_count(threads) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("O2D_THREADS")
    if env is None:
        return 1
    value = int(env)
    return (os.cpu_count() or 1) if value == 0 else max(1, value)


def _map_samples(fn, rows, threads):
    count = _thread_count(threads)
    if count == 1 or len(rows) <= 1:
        return [fn(row) for row in rows]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(fn, rows))


# ------------------------------------------------------------- ensembles


def velocity_ensemble(resolutions=(32, 64, 128), n_samples=8, base_seed=100,
                      master_n=128):
    """Solenoidal velocity samples, nested across the resolution sweep."""
    groups = []
    for n in resolutions:
        grid = TorusGrid(n)
        rows = []
        for i in range(n_samples):
            seed = base_seed + i
            rows.append((seed, nested_vector(grid, seed, DECAYS[i % len(DECAYS)],
                                             master_n=master_n)))
        groups.append((n, rows))
    return groups


def pair_ensemble(resolutions=(32, 64, 128), n_samples=8, base_seed=150,
                  master_n=128):
    """(velocity, stress) pairs, nested across the resolution sweep."""
    groups = []
    for n in resolutions:
        grid = TorusGrid(n)
        rows = []
        for i in range(n_samples):
            seed = base_seed + i
            decay = DECAYS[i % len(DECAYS)]
            rows.append((
                seed,
                (nested_vector(grid, seed, decay, master_n=master_n),
                 nested_tensor(grid, seed, decay, master_n=master_n)),
            ))
        groups.append((n, rows))
    return groups


def scalar_pair_ensemble(resolutions=(32, 64, 128), n_samples=8, base_seed=200,
                         master_n=128):
    """(a, b) scalar pairs for the pointwise-product commutator checks."""
    groups = []
    for n in resolutions:
        grid = TorusGrid(n)
        rows = []
        for i in range(n_samples):
            seed = base_seed + i
            decay = DECAYS[i % len(DECAYS)]
            rows.append((
                seed,
                (nested_scalar(grid, seed * 2 + 1, decay, master_n=master_n),
                 nested_scalar(grid, seed * 2 + 2, decay, master_n=master_n)),
            ))
        groups.append((n, rows))
    return groups


def scalar_ensemble(n=64, n_samples=8, base_seed=250, master_n=128):
    grid = TorusGrid(n)
    return [
        (base_seed + i,
         nested_scalar(grid, base_seed + i, DECAYS[i % len(DECAYS)],
                       master_n=master_n))
        for i in range(n_samples)
    ]


# ------------------------------------------- block advection commutators


def block_advection_commutator(u, field, j, partition=None, method="bony",
                               cache=None):
    """[Delta_j, u.grad] field, assembled directly or via the four-way split.

    The split groups the paraproduct pieces of both u.grad(field) and its
    block-localized counterpart; on the grid the two assemblies are the
    same function up to round-off, which the test suite pins down.  The
    cache dictionary (shared across j for one (u, field) pair) avoids
    recomputing blocks, low passes and their advections.
    """
    part = build_partition() if partition is None else partition
    if cache is None:
        cache = {}

    def memo(key, make):
        if key not in cache:
            cache[key] = make()
        return cache[key]

    if method == "direct":
        full = memo(("advect_full",), lambda: advect(u, field))
        return block(full, j, partition=part) - advect(
            u, block(field, j, partition=part)
        )
    if method != "bony":
        raise ValueError("method must be 'bony' or 'direct'")

    jm = j_max(u.grid)
    b_u = lambda k: memo(("bu", k), lambda: block(u, k, partition=part))
    b_f = lambda k: memo(("bf", k), lambda: block(field, k, partition=part))
    s_u = lambda k: memo(("su", k), lambda: low_pass(u, k, partition=part))
    s_f = lambda k: memo(("sf", k), lambda: low_pass(field, k, partition=part))

    total = None

    def add(term, sign=1.0):
        nonlocal total
        term = term if sign > 0 else -term
        total = term if total is None else total + term

    # low-frequency velocity against blocked field: [Delta_j, S_{k-1}u.grad]Delta_k
    for k in range(max(1, j - 4), min(jm, j + 4) + 1):
        first = memo(("adv_su_bf", k), lambda k=k: advect(s_u(k - 1), b_f(k)))
        add(block(first, j, partition=part))
        if abs(k - j) <= 1:
            second = memo(
                ("adv_su_bjbf", j, k),
                lambda k=k: advect(s_u(k - 1), block(b_f(k), j, partition=part)),
            )
            add(second, sign=-1.0)

    # blocked velocity against low-frequency field
    for k in range(max(1, j - 4), min(jm, j + 4) + 1):
        term = memo(("adv_bu_sf", k), lambda k=k: advect(b_u(k), s_f(k - 1)))
        add(block(term, j, partition=part))

    # blocked velocity against the j-block of the field (subtracted side);
    # for k >= j the inner low pass is the identity on the block
    for k in (j - 2, j - 1):
        if k >= J_MIN:
            term = memo(
                ("adv_bu_bjsf", j, k),
                lambda k=k: advect(
                    b_u(k), low_pass(block(field, j, partition=part), k + 2,
                                     partition=part)
                ),
            )
            add(term, sign=-1.0)
    high = memo(
        ("adv_high_bjf", j),
        lambda: advect(u - s_u(j), block(field, j, partition=part)),
    )
    add(high, sign=-1.0)

    # resonant part
    for k in range(max(J_MIN, j - 3), jm + 1):
        term = memo(("adv_bu_tf", k), lambda k=k: advect(
            b_u(k), b_f(k - 1) + b_f(k) + b_f(k + 1)
        ))
        add(block(term, j, partition=part))

    return total


def _commutator_pairing_sum(u, field, s, partition, method="bony") -> float:
    """Sum over j >= 0 of 2^{2js} |([Delta_j, u.grad]field | Delta_j field)|."""
    cache = {}
    total = 0.0
    for j in range(0, j_max(u.grid) + 1):
        comm = block_advection_commutator(u, field, j, partition, method, cache)
        pairing = l2_inner(comm, block(field, j, partition=partition))
        total += 4.0 ** (j * s) * abs(pairing)
    return total


# ---------------------------------------------------------------- checks


def check_commutator_sum_u(ensemble, s, alpha, *, slack=2.0, method="bony",
                           threads=None, partition=None) -> EstimateReport:
    """Velocity self-advection block commutators against the three-norm
    right side with a negative-index gradient factor."""
    if s <= 0 or alpha <= 0:
        raise ValueError("requires s > 0 and alpha > 0")
    part = build_partition() if partition is None else partition
    spec_grad = BesovSpec(-alpha, INF, INF)

    def one(row):
        seed, u = row
        lhs = _commutator_pairing_sum(u, u, s, part, method)
        rhs = (
            besov_norm(gradient_components(u), spec_grad, part)
            * sobolev_norm(u, s)
            * sobolev_norm(u, s + alpha)
        )
        return seed, _safe_ratio(lhs, rhs, l2_norm(u) ** 3)

    groups = [(value, _map_samples(one, rows, threads)) for value, rows in ensemble]
    return _assemble_report(
        "commutator_sum_u", {"s": s, "alpha": alpha, "method": method},
        "n", groups, slack,
    )


def check_commutator_sum_tau(ensemble, mode, *, s=None, alpha=None, beta=None,
                             s1=None, s2=None, slack=2.0, method="bony",
                             threads=None, partition=None) -> EstimateReport:
    """Stress-advection block commutators, in either right-side form.

    mode "two_term": negative-index norms of both gradients, requiring
    s > 0, alpha > 0, beta > 0.  mode "mixed": a Lipschitz velocity
    factor plus a gradient norm of index s2 - s1 - alpha < 0.
    """
    part = build_partition() if partition is None else partition
    if mode == "two_term":
        if s is None or alpha is None or beta is None:
            raise ValueError("two_term mode requires s, alpha, beta")
        if s <= 0 or alpha <= 0 or beta <= 0:
            raise ValueError("requires s > 0, alpha > 0, beta > 0")
        weight = s

        def rhs_of(u, tau):
            return (
                besov_norm(gradient_components(u), BesovSpec(-beta, INF, INF), part)
                * sobolev_norm(tau, s) * sobolev_norm(tau, s + beta)
                + besov_norm(gradient_components(tau),
                             BesovSpec(-alpha, INF, INF), part)
                * sobolev_norm(tau, s) * sobolev_norm(u, s + alpha)
            )

        params = {"s": s, "alpha": alpha, "beta": beta, "method": method}
    elif mode == "mixed":
        if s1 is None or s2 is None or alpha is None:
            raise ValueError("mixed mode requires s1, s2, alpha")
        if s2 <= 0 or not s2 - s1 - alpha < 0:
            raise ValueError("requires s2 > 0 and s2 - s1 - alpha < 0")
        weight = s2

        def rhs_of(u, tau):
            return (
                lp_norm(gradient_components(u), INF) * sobolev_norm(tau, s2) ** 2
                + besov_norm(gradient_components(tau),
                             BesovSpec(s2 - s1 - alpha, INF, INF), part)
                * sobolev_norm(tau, s2) * sobolev_norm(u, s1 + alpha)
            )

        params = {"s1": s1, "s2": s2, "alpha": alpha, "method": method}
    else:
        raise ValueError("mode must be 'two_term' or 'mixed'")

    def one(row):
        seed, (u, tau) = row
        lhs = _commutator_pairing_sum(u, tau, weight, part, method)
        scale = (l2_norm(u) + l2_norm(tau)) ** 3
        return seed, _safe_ratio(lhs, rhs_of(u, tau), scale)

    groups = [(value, _map_samples(one, rows, threads)) for value, rows in ensemble]
    return _assemble_report(
        f"commutator_sum_tau_{mode}", params, "n", groups, slack,
    )


def check_riesz_commutator(ensemble, alpha, nu, *, slack=2.0, threads=None) \
        -> EstimateReport:
    """Squared negative-order seminorm of [R_a, u.grad]tau against
    |u|_{H^a}^2 |tau|_{L2}^2."""
    warnings_list = []
    if not 1.0 < alpha <= 1.5:
        warnings_list.append(
            f"alpha={alpha} outside the smoothing range (1, 3/2]; "
            "computed anyway"
        )

    def one(row):
        seed, (u, tau) = row
        comm = commutator_advection(u, tau, alpha, nu)
        lhs = sobolev_norm(comm, 2.0 * alpha - 3.0, homogeneous=True) ** 2
        rhs = sobolev_norm(u, alpha) ** 2 * l2_norm(tau) ** 2
        scale = (l2_norm(u) + l2_norm(tau)) ** 4
        return seed, _safe_ratio(lhs, rhs, scale)

    groups = [(value, _map_samples(one, rows, threads)) for value, rows in ensemble]
    return _assemble_report(
        "riesz_commutator", {"alpha": alpha, "nu": nu}, "n", groups, slack,
        warnings=warnings_list,
    )


def check_smooth_commutator(ensemble, theta_profile="chi",
                            lambda_exponents=(0, 1, 2, 3, 4), *, p=INF, q=2.0,
                            r=2.0, slack=2.0, threads=None, partition=None) \
        -> EstimateReport:
    """Commutator of a smooth dilated multiplier with pointwise
    multiplication; the lambda-scaled ratio must not grow with lambda.

    ensemble here is a flat list [(seed, (a, b)), ...] at one resolution;
    the sweep axis is the dyadic dilation lambda = 2^m.
    """
    inv = lambda e: 0.0 if e == INF else 1.0 / e
    if abs(inv(p) + inv(q) - inv(r)) > 1e-12:
        raise ValueError("exponents must satisfy 1/p + 1/q = 1/r")
    if theta_profile not in ("chi", "phi"):
        raise ValueError("theta_profile must be 'chi' or 'phi'")
    part = build_partition() if partition is None else partition

    def one_at(m):
        def one(row):
            seed, (a, b) = row
            grid = a.grid
            mult = (part.chi_lattice(grid, m) if theta_profile == "chi"
                    else part.phi_lattice(grid, m))
            ab = multiply(a, b)
            inside = SpectralScalar(grid, ab.coeffs * mult)
            outside = multiply(a, SpectralScalar(grid, b.coeffs * mult))
            lhs = lp_norm(inside - outside, r)
            rhs = lp_norm(gradient_components(a), p) * lp_norm(b, q)
            lam = 2.0 ** m
            return seed, lam * _safe_ratio(lhs, rhs, l2_norm(a) * l2_norm(b))
        return one

    groups = [
        (2.0 ** m, _map_samples(one_at(m), ensemble, threads))
        for m in lambda_exponents
    ]
    return _assemble_report(
        "smooth_commutator",
        {"theta": theta_profile, "p": p, "q": q, "r": r},
        "lambda", groups, slack,
    )


def check_kernel_commutator(ensemble, j_kernel=2, *, p=2.0, p1=1.0, p2=2.0,
                            slack=2.0, threads=None, partition=None) \
        -> EstimateReport:
    """Convolution-kernel commutator against the kernel's first moment.

    The kernel is a dyadic block profile; its moment |x h|_{p1} uses the
    sawtooth coordinate (distance to the kernel center on the torus).
    """
    inv = lambda e: 0.0 if e == INF else 1.0 / e
    if abs(1.0 + inv(p) - inv(p1) - inv(p2)) > 1e-12:
        raise ValueError("exponents must satisfy 1 + 1/p = 1/p1 + 1/p2")
    part = build_partition() if partition is None else partition

    def moment(grid):
        h = SpectralScalar(
            grid, part.phi_lattice(grid, j_kernel) / (4.0 * np.pi ** 2)
        )
        h_phys = h.to_physical()
        saw1 = np.mod(grid.x1 + np.pi, 2.0 * np.pi) - np.pi
        saw2 = np.mod(grid.x2 + np.pi, 2.0 * np.pi) - np.pi
        radius = np.hypot(saw1, saw2)
        weighted = np.abs(radius * h_phys)
        if p1 == INF:
            return float(weighted.max())
        return float((weighted ** p1).sum() * grid.cell_area) ** (1.0 / p1)

    def one(row):
        seed, (f, g) = row
        grid = f.grid
        fg = multiply(f, g)
        lhs_field = block(fg, j_kernel, partition=part) - multiply(
            f, block(g, j_kernel, partition=part)
        )
        lhs = lp_norm(lhs_field, p)
        rhs = moment(grid) * lp_norm(gradient_components(f), INF) * lp_norm(g, p2)
        return seed, _safe_ratio(lhs, rhs, l2_norm(f) * l2_norm(g))

    groups = [(value, _map_samples(one, rows, threads)) for value, rows in ensemble]
    return _assemble_report(
        "kernel_commutator",
        {"j_kernel": j_kernel, "p": p, "p1": p1, "p2": p2},
        "n", groups, slack,
    )


_RIESZ_PAIRS = ((1, 1), (1, 2), (2, 2))


def check_riesz_bmo_commutator(ensemble, p=2.0, *, slack=2.0, threads=None) \
        -> EstimateReport:
    """Commutator of multiplication by b with double Riesz multipliers,
    against the mean-oscillation seminorm of b; worst pair per sample."""
    if not 1.0 < p < INF:
        raise ValueError("p must lie strictly between 1 and infinity")

    def one(row):
        seed, (b, f) = row
        grid = b.grid
        bmo = bmo_seminorm(b)
        fp = lp_norm(f, p)
        scale = l2_norm(b) * l2_norm(f)
        worst = 0.0
        for i, jj in _RIESZ_PAIRS:
            ki = grid.k1 if i == 1 else grid.k2
            kj = grid.k1 if jj == 1 else grid.k2
            mult = np.where(grid.k_sq > 0, ki * kj / np.where(grid.k_sq > 0,
                                                              grid.k_sq, 1), 0.0)
            tf = SpectralScalar(grid, f.coeffs * mult)
            tbf = SpectralScalar(grid, multiply(b, f).coeffs * mult)
            comm = multiply(b, tf) - tbf
            worst = max(worst, _safe_ratio(lp_norm(comm, p), bmo * fp, scale))
        return seed, worst

    groups = [(value, _map_samples(one, rows, threads)) for value, rows in ensemble]
    return _assemble_report(
        "riesz_bmo_commutator", {"p": p}, "n", groups, slack,
    )


def _exact_pairing_integral(g, f, q: int) -> float:
    """Integral of g * f^(q-1) by resampling past the integrand's band."""
    active = np.abs(f.coeffs) > 0
    if not active.any():
        return 0.0
    grid = f.grid
    band = max(int(np.abs(grid.k1[active]).max()),
               int(np.abs(grid.k2[active]).max()))
    m = grid.n
    while m <= q * band:
        m *= 2
    gp = _resample_physical(g, m)
    fp = _resample_physical(f, m)
    return float((gp * fp ** (q - 1)).mean()) * 4.0 * np.pi ** 2


def check_generalized_bernstein(fields, beta, q, js=(2, 3, 4), *, slack=2.0,
                                threads=None, partition=None) -> EstimateReport:
    """Lower bound: the fractional-dissipation pairing against a dyadic
    multiple of the block's L^q norm; the minimum ratio must stay away
    from zero across the block-index sweep.
    """
    if not isinstance(q, int) or q < 2 or q % 2 != 0:
        raise ValueError("q must be an even integer >= 2 for exact quadrature")
    if not 0.0 < beta <= 0.5:
        raise ValueError("beta must lie in (0, 1/2]")
    part = build_partition() if partition is None else partition

    def one_at(j):
        def one(row):
            seed, f = row
            fj = block(f, j, homogeneous=True, partition=part)
            qn = lq_norm_exact(fj, q)
            if qn == 0.0:
                return seed, 0.0
            g = fractional_power(fj, 2.0 * beta)
            integral = _exact_pairing_integral(g, fj, q)
            return seed, integral / (4.0 ** (j * beta) * qn ** q)
        return one

    groups = [(j, _map_samples(one_at(j), fields, threads)) for j in js]
    return _assemble_report(
        "generalized_bernstein", {"beta": beta, "q": q}, "j", groups, slack,
        mode="lower",
    )


# ------------------------------------------------------------ full suite


def run_default_suites(resolutions=(32, 64, 128), n_samples=8, slack=2.0,
                       threads=None, base_seed=100, method="bony") -> dict:
    """All estimate suites at their reference parameters; returns a dict
    keyed by estimate id, in ESTIMATE_IDS order."""
    vec = velocity_ensemble(resolutions, n_samples, base_seed)
    pairs = pair_ensemble(resolutions, n_samples, base_seed + 50)
    scalars2 = scalar_pair_ensemble(resolutions, n_samples, base_seed + 100)
    flat_scalars2 = scalar_pair_ensemble((max(resolutions),), n_samples,
                                         base_seed + 150)[0][1]
    scalars = scalar_ensemble(64, n_samples, base_seed + 200)

    reports = {
        "commutator_sum_u": check_commutator_sum_u(
            vec, s=1.0, alpha=1.25, slack=slack, threads=threads, method=method),
        "commutator_sum_tau_two_term": check_commutator_sum_tau(
            pairs, "two_term", s=1.0, alpha=1.25, beta=0.5, slack=slack,
            threads=threads, method=method),
        "commutator_sum_tau_mixed": check_commutator_sum_tau(
            pairs, "mixed", s1=1.0, s2=1.0, alpha=1.25, slack=slack,
            threads=threads, method=method),
        "riesz_commutator": check_riesz_commutator(
            pairs, alpha=1.25, nu=1.0, slack=slack, threads=threads),
        "smooth_commutator": check_smooth_commutator(
            flat_scalars2, "chi", p=INF, q=2.0, r=2.0, slack=slack,
            threads=threads),
        "kernel_commutator": check_kernel_commutator(
            scalars2, j_kernel=2, p=2.0, p1=1.0, p2=2.0, slack=slack,
            threads=threads),
        "riesz_bmo_commutator": check_riesz_bmo_commutator(
            scalars2, p=2.0, slack=slack, threads=threads),
        "generalized_bernstein": check_generalized_bernstein(
            scalars, beta=0.25, q=4, slack=slack, threads=threads),
    }
    return {key: reports[key] for key in ESTIMATE_IDS}


def write_reports(path, reports) -> None:
    import json
    payload = {key: report.to_dict() for key, report in reports.items()}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
