"""Tests for the estimate verifier: split assembly, ratio kernels,
degenerate inputs, validation errors, and report plumbing."""

import json
import math

import numpy as np
import pytest

from oldroyd2d.fields import SpectralScalar, SpectralVector, SpectralSymTensor
from oldroyd2d.littlewood_paley import (
    INF, block, build_partition, j_max, sobolev_norm,
)
from oldroyd2d.operators import l2_norm
from oldroyd2d import verifier
from oldroyd2d.verifier import (
    ESTIMATE_IDS,
    _safe_ratio,
    block_advection_commutator,
    check_commutator_sum_tau,
    check_commutator_sum_u,
    check_generalized_bernstein,
    check_kernel_commutator,
    check_riesz_bmo_commutator,
    check_riesz_commutator,
    check_smooth_commutator,
    run_default_suites,
    scalar_ensemble,
    velocity_ensemble,
    write_reports,
)

from conftest import make_random_scalar, make_random_tensor, make_random_vector


def constant_vector(grid, c1=0.5, c2=-0.25):
    a = np.zeros((grid.n, grid.n), dtype=np.complex128)
    b = np.zeros((grid.n, grid.n), dtype=np.complex128)
    a[0, 0] = c1
    b[0, 0] = c2
    return SpectralVector(SpectralScalar(grid, a), SpectralScalar(grid, b))


class TestBlockCommutatorAssembly:
    def test_split_matches_direct_on_tensor(self, grid32):
        part = build_partition()
        u = make_random_vector(grid32, 5)
        tau = make_random_tensor(grid32, 5)
        cache = {}
        for j in range(0, j_max(grid32) + 1):
            direct = block_advection_commutator(u, tau, j, part, "direct", cache)
            bony = block_advection_commutator(u, tau, j, part, "bony", cache)
            scale = max(l2_norm(direct), 1e-30)
            assert l2_norm(direct - bony) <= 1e-10 * scale

    def test_split_matches_direct_on_vector(self, grid32):
        part = build_partition()
        u = make_random_vector(grid32, 8, decay=2.0)
        for j in (0, 2, j_max(grid32)):
            direct = block_advection_commutator(u, u, j, part, "direct")
            bony = block_advection_commutator(u, u, j, part, "bony")
            assert l2_norm(direct - bony) <= 1e-10 * max(l2_norm(direct), 1e-30)

    def test_constant_velocity_commutes_with_blocks(self, grid32):
        u = constant_vector(grid32)
        tau = make_random_tensor(grid32, 3)
        for method in ("direct", "bony"):
            comm = block_advection_commutator(u, tau, 2, method=method)
            assert l2_norm(comm) <= 1e-12 * l2_norm(tau)

    def test_zero_field_gives_zero_sum(self, grid32):
        u = make_random_vector(grid32, 4)
        tau = SpectralSymTensor.zeros(grid32)
        part = build_partition()
        total = verifier._commutator_pairing_sum(u, tau, 1.0, part)
        assert total == 0.0

    def test_unknown_method_rejected(self, grid32):
        u = make_random_vector(grid32, 4)
        with pytest.raises(ValueError, match="method"):
            block_advection_commutator(u, u, 1, method="taylor")


class TestSafeRatio:
    def test_plain_ratio(self):
        assert _safe_ratio(3.0, 2.0, 1.0) == 1.5

    def test_degenerate_right_side_is_exact_zero(self):
        assert _safe_ratio(0.0, 0.0, 1.0) == 0.0
        assert _safe_ratio(1e-20, 1e-20, 1.0) == 0.0

    def test_nonzero_left_with_vanishing_right_is_flagged(self):
        assert _safe_ratio(1.0, 0.0, 1.0) == math.inf


class TestDegenerateEnsembles:
    def test_constant_velocity_ratio_is_zero(self, grid32):
        ensemble = [(32, [(0, constant_vector(grid32))])]
        report = check_commutator_sum_u(ensemble, s=1.0, alpha=1.25)
        assert report.samples[0]["ratio"] == 0.0
        assert report.passed

    def test_zero_pair_ratio_is_zero(self, grid32):
        pair = (SpectralVector.zeros(grid32), SpectralSymTensor.zeros(grid32))
        report = check_riesz_commutator([(32, [(0, pair)])], alpha=1.25, nu=1.0)
        assert report.samples[0]["ratio"] == 0.0

    def test_constant_multiplier_factor_gives_zero_smooth_ratio(self, grid32):
        # at lambda = 2^6 the multiplier is 1 on every active mode, so the
        # commutator vanishes identically
        a = make_random_scalar(grid32, 11)
        b = make_random_scalar(grid32, 12)
        report = check_smooth_commutator([(0, (a, b))], "chi",
                                         lambda_exponents=(6,))
        assert report.samples[0]["ratio"] == 0.0


class TestValidation:
    def test_sum_u_requires_positive_indices(self, grid32):
        ens = [(32, [(0, make_random_vector(grid32, 1))])]
        with pytest.raises(ValueError, match="s > 0"):
            check_commutator_sum_u(ens, s=0.0, alpha=1.25)

    def test_two_term_requires_all_indices(self, grid32):
        ens = [(32, [(0, (make_random_vector(grid32, 1),
                          make_random_tensor(grid32, 1)))])]
        with pytest.raises(ValueError, match="requires s, alpha, beta"):
            check_commutator_sum_tau(ens, "two_term", s=1.0, alpha=1.25)
        with pytest.raises(ValueError, match="beta > 0"):
            check_commutator_sum_tau(ens, "two_term", s=1.0, alpha=1.25,
                                     beta=0.0)

    def test_mixed_requires_negative_gap(self, grid32):
        ens = [(32, [(0, (make_random_vector(grid32, 1),
                          make_random_tensor(grid32, 1)))])]
        with pytest.raises(ValueError, match="s2 - s1 - alpha < 0"):
            check_commutator_sum_tau(ens, "mixed", s1=1.0, s2=3.0, alpha=1.25)

    def test_mode_rejected(self, grid32):
        with pytest.raises(ValueError, match="mode"):
            check_commutator_sum_tau([], "three_term", s=1.0, alpha=1.0,
                                     beta=1.0)

    def test_smooth_exponent_relation(self, grid32):
        with pytest.raises(ValueError, match="1/p \\+ 1/q = 1/r"):
            check_smooth_commutator([], "chi", p=2.0, q=2.0, r=2.0)
        with pytest.raises(ValueError, match="theta_profile"):
            check_smooth_commutator([], "box")

    def test_kernel_exponent_relation(self):
        with pytest.raises(ValueError, match="1 \\+ 1/p = 1/p1 \\+ 1/p2"):
            check_kernel_commutator([], p=2.0, p1=2.0, p2=2.0)

    def test_bmo_exponent_range(self):
        with pytest.raises(ValueError, match="strictly between"):
            check_riesz_bmo_commutator([], p=1.0)
        with pytest.raises(ValueError, match="strictly between"):
            check_riesz_bmo_commutator([], p=INF)

    def test_bernstein_parameters(self):
        with pytest.raises(ValueError, match="even integer"):
            check_generalized_bernstein([], beta=0.25, q=3)
        with pytest.raises(ValueError, match="even integer"):
            check_generalized_bernstein([], beta=0.25, q=2.0)
        with pytest.raises(ValueError, match="\\(0, 1/2\\]"):
            check_generalized_bernstein([], beta=0.75, q=4)

    def test_riesz_alpha_warning(self, grid32):
        ens = [(32, [(0, (make_random_vector(grid32, 2),
                          make_random_tensor(grid32, 2)))])]
        with_warn = check_riesz_commutator(ens, alpha=1.75, nu=1.0)
        assert any("alpha" in w for w in with_warn.warnings)
        without = check_riesz_commutator(ens, alpha=1.25, nu=1.0)
        assert without.warnings == []


class TestBernsteinKernel:
    def test_q2_reduces_to_seminorm_quotient(self, grid64):
        beta = 0.4
        f = make_random_scalar(grid64, 21, decay=2.0)
        report = check_generalized_bernstein([(21, f)], beta=beta, q=2,
                                             js=(3,))
        fj = block(f, 3, homogeneous=True)
        expected = (sobolev_norm(fj, beta, homogeneous=True) ** 2
                    / (4.0 ** (3 * beta) * l2_norm(fj) ** 2))
        assert report.samples[0]["ratio"] == pytest.approx(expected, rel=1e-12)
        # the annulus keeps |k| >= (3/4) 2^j, so the quotient has a clean
        # lower bound at q = 2
        assert report.samples[0]["ratio"] >= (0.75) ** (2 * beta)

    def test_lower_bound_positive_across_blocks(self, grid64):
        fields = scalar_ensemble(64, 3, 400)
        report = check_generalized_bernstein(fields, beta=0.25, q=4,
                                             js=(2, 3, 4))
        assert report.passed
        assert report.min_ratio > 0.5


class TestReports:
    def test_report_fields_and_json_roundtrip(self, grid32, tmp_path):
        ens = velocity_ensemble((32,), 2, base_seed=500, master_n=32)
        report = check_commutator_sum_u(ens, s=1.0, alpha=1.25)
        assert report.estimate_id == "commutator_sum_u"
        assert report.ensemble_size == 2
        assert report.sweep_axis == "n"
        assert len(report.caveats) == 2
        assert all(math.isfinite(s["ratio"]) for s in report.samples)
        assert report.max_ratio >= report.median_ratio >= report.min_ratio

        path = tmp_path / "reports.json"
        write_reports(path, {"commutator_sum_u": report})
        loaded = json.loads(path.read_text())
        entry = loaded["commutator_sum_u"]
        assert entry["passed"] is True
        assert entry["sweep"][0]["value"] == 32
        assert entry["params"] == {"s": 1.0, "alpha": 1.25, "method": "bony"}
        assert len(entry["samples"]) == 2

    def test_sweep_failure_detected(self):
        groups = [(32, [(0, 1.0)]), (64, [(0, 5.0)])]
        report = verifier._assemble_report("commutator_sum_u", {}, "n",
                                           groups, slack=2.0)
        assert not report.passed

    def test_lower_mode_requires_positive_minimum(self):
        groups = [(2, [(0, 0.0)]), (3, [(0, 1.0)])]
        report = verifier._assemble_report("generalized_bernstein", {}, "j",
                                           groups, slack=2.0, mode="lower")
        assert not report.passed

    def test_nonfinite_ratio_fails(self):
        groups = [(32, [(0, math.inf)])]
        report = verifier._assemble_report("kernel_commutator", {}, "n",
                                           groups, slack=2.0)
        assert not report.passed

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="pass mode"):
            verifier._assemble_report("x", {}, "n", [(1, [(0, 1.0)])],
                                      slack=2.0, mode="median")


class TestSuiteAndThreads:
    def test_default_suites_small(self):
        reports = run_default_suites(resolutions=(32, 64), n_samples=2)
        assert tuple(reports) == ESTIMATE_IDS
        for key, report in reports.items():
            assert report.passed, f"{key} failed: max={report.max_ratio}"
            assert report.max_ratio < 10.0

    def test_threaded_matches_serial(self):
        ens = velocity_ensemble((32,), 3, base_seed=600, master_n=64)
        serial = check_commutator_sum_u(ens, s=1.0, alpha=1.25, threads=1)
        threaded = check_commutator_sum_u(ens, s=1.0, alpha=1.25, threads=3)
        assert [s["ratio"] for s in serial.samples] == \
            [s["ratio"] for s in threaded.samples]

    def test_thread_count_env(self, monkeypatch):
        monkeypatch.delenv("O2D_THREADS", raising=False)
        assert verifier._thread_count(None) == 1
        monkeypatch.setenv("O2D_THREADS", "3")
        assert verifier._thread_count(None) == 3
        monkeypatch.setenv("O2D_THREADS", "0")
        assert verifier._thread_count(None) >= 1
        assert verifier._thread_count(2) == 2
