"""End-to-end acceptance checks.

Every numbered property the package promises is exercised here at its
stated tolerance, one test per criterion, each printing a single
pass/fail line.  The two reference trajectories (T = 2, n = 64,
dt = 1e-3, small random data) are integrated once per session and
shared by the energy, gamma, and integrand criteria.
"""

import math
import time

import numpy as np
import pytest

from oldroyd2d.cli import main as cli_main
from oldroyd2d.ensembles import random_scalar, random_tensor, random_vector
from oldroyd2d.errors import BlowUpError, PartitionValidationError
from oldroyd2d.fieldio import load_fields
from oldroyd2d.fields import SpectralScalar, SpectralSymTensor, SpectralVector
from oldroyd2d.grid import TorusGrid
from oldroyd2d.integrator import InitialCondition, RunConfig, run
from oldroyd2d.littlewood_paley import (
    INF,
    BesovSpec,
    DyadicPartition,
    besov_norm,
    besov_norm_lowpass,
    sobolev_norm,
)
from oldroyd2d.operators import (
    curl,
    deformation_and_rotation,
    fractional_power,
    gradient,
    l2_norm,
    laplacian,
    leray_project,
    tensor_curl_divergence,
)
from oldroyd2d.system import State, SystemParams, gamma_equation_residual, rhs, riesz_alpha
from oldroyd2d.verifier import (
    check_commutator_sum_u,
    check_generalized_bernstein,
    check_riesz_commutator,
    check_smooth_commutator,
    run_default_suites,
)


def check(num, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    line = f"criterion {num} ({name}): {status} [{detail}]"
    print(line)
    assert ok, line


REGIMES = {
    "fractional_velocity": SystemParams.reduced(nu=1.0, alpha=1.25),
    "mixed_dissipation": SystemParams.reduced(nu=1.0, alpha=1.0, eta=1.0,
                                              beta=0.25),
}

# spectral slope 4 keeps the dissipation of the fastest retained modes
# negligible, so the balance defect measures the scheme and not the
# unresolved tail
PRODUCTION_IC = InitialCondition(kind="random_solenoidal", amplitude=0.1,
                                 seed=7, decay=4.0)


@pytest.fixture(scope="module")
def production(tmp_path_factory):
    out = {}
    for name, params in REGIMES.items():
        run_dir = tmp_path_factory.mktemp(f"run_{name}")
        config = RunConfig(
            n=64, params=params, dt=1e-3, t_end=2.0, diag_every=50,
            checkpoint_every=400, initial_condition=PRODUCTION_IC,
        )
        out[name] = (run(config, out_dir=str(run_dir)), config, run_dir)
    return out


def test_criterion_1_partition_of_unity():
    part = DyadicPartition(validate=False)
    started = time.perf_counter()
    try:
        part.validate(samples=10_000, tol=1e-12)
        ok = True
        reason = "both telescoping sums within 1e-12 on 10000 radii"
    except PartitionValidationError as err:
        ok = False
        reason = str(err)
    elapsed = time.perf_counter() - started
    check(1, "partition of unity", ok and elapsed < 1.0,
          f"{reason}; {elapsed:.3f}s")


def test_criterion_2_spectral_identities():
    started = time.perf_counter()
    grid = TorusGrid(64)
    nu, alpha = 0.7, 1.25

    f = random_scalar(grid, 31)
    grad_f = gradient(f)
    curl_grad = l2_norm(curl(grad_f)) / l2_norm(grad_f)

    v = random_vector(grid, 32, solenoidal=False)
    once = leray_project(v)
    idem = l2_norm(leray_project(once) - once) / l2_norm(once)

    tau = random_tensor(grid, 33)
    recovered = nu * fractional_power(riesz_alpha(tau, alpha, nu), 2.0 * alpha)
    target = tensor_curl_divergence(tau)
    modewise = float(np.abs(recovered.coeffs - target.coeffs).max()
                     / np.abs(target.coeffs).max())

    u = random_vector(grid, 34)
    du = deformation_and_rotation(u)[0]
    half_lap = 0.5 * laplacian(curl(u))
    vort = l2_norm(tensor_curl_divergence(du) - half_lap) / l2_norm(half_lap)

    elapsed = time.perf_counter() - started
    worst = max(curl_grad, idem, modewise, vort)
    check(2, "spectral identities", worst <= 1e-11 and elapsed < 5.0,
          f"curl.grad={curl_grad:.1e} leray={idem:.1e} "
          f"riesz_inverse={modewise:.1e} vorticity={vort:.1e}; {elapsed:.2f}s")


def test_criterion_3_energy_balance(production):
    details = []
    ok = True
    for name, (result, config, _) in production.items():
        worst = max(r.energy_residual for r in result.records if r.t > 0)
        wall = result.metadata["wall_time_seconds"]
        ok = ok and worst < 1e-6 and wall < 120.0
        details.append(f"{name}: resid={worst:.2e} wall={wall:.0f}s")

    # scheme-order fit on a short horizon; n = 32 keeps the whole dt sweep
    # inside the asymptotic regime for both dissipation exponents
    sweep_ic = InitialCondition(kind="random_solenoidal", amplitude=1.0,
                                seed=7, decay=4.0)
    for name, params in REGIMES.items():
        points = []
        for dt, diag in ((2e-3, 25), (1e-3, 50), (5e-4, 100)):
            cfg = RunConfig(n=32, params=params, dt=dt, t_end=0.25,
                            diag_every=diag, initial_condition=sweep_ic)
            res = run(cfg)
            points.append(max(r.energy_residual for r in res.records
                              if r.t > 0))
        slope = float(np.polyfit(np.log([2e-3, 1e-3, 5e-4]),
                                 np.log(points), 1)[0])
        ok = ok and slope >= 3.5
        details.append(f"{name}: order={slope:.2f}")
    check(3, "energy balance", ok, "; ".join(details))


def test_criterion_4_gamma_boundedness(production):
    details = []
    ok = True
    for name, (result, config, run_dir) in production.items():
        gammas = [r.gamma_l2 for r in result.records]
        summary = result.metadata["summary"]
        sup_ok = max(gammas) <= 10.0 * gammas[0]
        recorded_ok = (math.isfinite(summary["sup_gamma_l2"])
                       and math.isfinite(summary["int_gamma_diss"]))
        worst_resid = 0.0
        snapshots = sorted(run_dir.glob("step_*.o2df"),
                           key=lambda p: int(p.stem.split("_")[1]))[-5:]
        for path in snapshots:
            u, tau = load_fields(path)
            index = int(path.stem.split("_")[1])
            state = State(u, tau, index * config.dt)
            du_dt, dtau_dt = rhs(state, config.params)
            resid = gamma_equation_residual(state, du_dt, dtau_dt,
                                            config.params)
            worst_resid = max(worst_resid, resid)
        ok = (ok and sup_ok and recorded_ok and len(snapshots) == 5
              and worst_resid < 1e-8)
        details.append(
            f"{name}: sup/initial={max(gammas) / gammas[0]:.3f} "
            f"int_diss={summary['int_gamma_diss']:.3e} "
            f"eq_resid={worst_resid:.1e}"
        )
    check(4, "gamma boundedness", ok, "; ".join(details))


def test_criterion_5_regularity_criterion_integrands(production):
    details = []
    ok = True
    for name, (result, config, _) in production.items():
        summary = result.metadata["summary"]
        finite = (math.isfinite(summary["int_crit_u"])
                  and math.isfinite(summary["int_crit_tau"])
                  and all(math.isfinite(r.crit_u) and math.isfinite(r.crit_tau)
                          for r in result.records))
        labeled = result.metadata["theory_status"] == "within analyzed regimes"
        ok = ok and finite and labeled
        details.append(f"{name}: int_u={summary['int_crit_u']:.3e} "
                       f"int_tau={summary['int_crit_tau']:.3e}")

    open_cfg = RunConfig(
        n=64, params=SystemParams.reduced(nu=1.0, alpha=1.0), dt=1e-3,
        t_end=0.25, diag_every=50, initial_condition=PRODUCTION_IC,
    )
    try:
        open_result = run(open_cfg)
        outcome = "completed"
        label = open_result.metadata["theory_status"]
    except BlowUpError as err:
        outcome = "blow-up flagged"
        label = err.metadata["theory_status"] if err.metadata else ""
    labeled_open = label == "outside proven theory"
    ok = ok and labeled_open
    details.append(f"open case: {outcome}, labeled {label!r}")
    check(5, "regularity criterion integrands", ok, "; ".join(details))


def constant_velocity(grid, c1=0.4, c2=-0.3):
    a = np.zeros((grid.n, grid.n), dtype=np.complex128)
    b = np.zeros((grid.n, grid.n), dtype=np.complex128)
    a[0, 0] = c1
    b[0, 0] = c2
    return SpectralVector(SpectralScalar(grid, a), SpectralScalar(grid, b))


def test_criterion_6_estimate_suites():
    started = time.perf_counter()
    reports = run_default_suites(resolutions=(32, 64, 128), n_samples=8,
                                 slack=2.0)
    elapsed = time.perf_counter() - started
    failed = [key for key, rep in reports.items() if not rep.passed]

    grid = TorusGrid(32)
    degenerate = []
    const_u = constant_velocity(grid)
    rep = check_commutator_sum_u([(32, [(0, const_u)])], s=1.0, alpha=1.25)
    degenerate.append(rep.samples[0]["ratio"])
    zero_pair = (SpectralVector.zeros(grid), SpectralSymTensor.zeros(grid))
    rep = check_riesz_commutator([(32, [(0, zero_pair)])], alpha=1.25, nu=1.0)
    degenerate.append(rep.samples[0]["ratio"])
    const_a = SpectralScalar(grid, np.zeros((32, 32), dtype=np.complex128))
    coeffs = const_a.coeffs.copy()
    coeffs[0, 0] = 0.8
    rep = check_smooth_commutator(
        [(0, (SpectralScalar(grid, coeffs), random_scalar(grid, 5)))], "chi",
        lambda_exponents=(0, 2),
    )
    degenerate.append(max(s["ratio"] for s in rep.samples))
    rep = check_generalized_bernstein([(0, SpectralScalar.zeros(grid))],
                                      beta=0.25, q=4, js=(2,))
    degenerate.append(rep.samples[0]["ratio"])

    ok = not failed and elapsed < 300.0 and max(degenerate) <= 1e-12
    check(6, "estimate suites",
          ok,
          f"8 suites, failed={failed or 'none'}, "
          f"max degenerate ratio={max(degenerate):.1e}, {elapsed:.0f}s")


# bands pinned from a reference 20-field ensemble (seeds 900-983, n=64,
# spectral slopes 2 to 4); observed ranges were [0.22, 0.67] and
# [0.84, 2.0]
EQUIV_BAND = (0.15, 0.85)
LOWPASS_EQUIV_BAND = (0.7, 2.5)


def test_criterion_7_norm_equivalences():
    grid = TorusGrid(64)
    decays = (2.0, 2.5, 3.0, 4.0)
    fields = [random_scalar(grid, 900 + i, decays[i % 4]) for i in range(12)]
    fields += [random_vector(grid, 950 + i, decays[i % 4]) for i in range(4)]
    fields += [random_tensor(grid, 980 + i, decays[i % 4]) for i in range(4)]

    details = []
    ok = True
    for s in (-1.0, 0.0, 1.0, 2.0):
        ratios = [besov_norm(f, BesovSpec(s, 2.0, 2.0)) / sobolev_norm(f, s)
                  for f in fields]
        inside = EQUIV_BAND[0] <= min(ratios) and max(ratios) <= EQUIV_BAND[1]
        ok = ok and inside
        details.append(f"s={s:g}: [{min(ratios):.2f}, {max(ratios):.2f}]")
    for s in (-0.5, -1.0):
        spec = BesovSpec(s, INF, INF)
        ratios = [besov_norm(f, spec) / besov_norm_lowpass(f, spec)
                  for f in fields]
        inside = (LOWPASS_EQUIV_BAND[0] <= min(ratios)
                  and max(ratios) <= LOWPASS_EQUIV_BAND[1])
        ok = ok and inside
        details.append(f"lowpass s={s:g}: [{min(ratios):.2f}, {max(ratios):.2f}]")
    check(7, "norm equivalences", ok,
          f"bands {EQUIV_BAND} and {LOWPASS_EQUIV_BAND}; " + "; ".join(details))


DETERMINISM_INI = """\
[grid]
n = 32

[params]
nu = 1.0
alpha = 1.25

[time]
dt = 0.001
t_end = 0.05

[initial]
kind = random_solenoidal
amplitude = 0.5
seed = 11
"""


def test_criterion_8_determinism(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text(DETERMINISM_INI)
    first = tmp_path / "first"
    second = tmp_path / "second"
    code1 = cli_main(["simulate", str(ini), "--out", str(first)])
    code2 = cli_main(["simulate", str(ini), "--out", str(second)])
    bytes1 = (first / "diagnostics.csv").read_bytes()
    bytes2 = (second / "diagnostics.csv").read_bytes()
    ok = code1 == 0 and code2 == 0 and bytes1 == bytes2
    check(8, "determinism", ok,
          f"two runs, diagnostics identical: {bytes1 == bytes2} "
          f"({len(bytes1)} bytes)")
