import math

import numpy as np
import pytest

from ghzfreq import blockstate
from ghzfreq._numerics import richardson_central
from ghzfreq.blockstate import MeasurementSetting
from ghzfreq.channel import NoiseParams, channel_at
from ghzfreq.errors import DomainError
from ghzfreq.metrology import (MODE_FINITE_DIFFERENCE, MODE_FROZEN,
                               block_eigensystem, cfi, fisher_report,
                               optimal_setting, qfi_exact, qfi_small_r)
from ghzfreq.oracle import cfi_dense, draw_cp_params, qfi_dense


class TestOptimalSetting:
    def test_even_probe(self):
        s = optimal_setting(4, 1.0, 1.0)
        assert s.zeta1 == pytest.approx(0.5 * math.pi - 1.0)
        assert s.zeta2 == pytest.approx(0.5 * math.pi)

    def test_odd_probe(self):
        s = optimal_setting(9, 1.0, 1.0)
        assert s.zeta1 == pytest.approx(0.5 * math.pi - 1.0)
        assert s.zeta2 == 0.0

    def test_single_atom_is_odd(self):
        assert optimal_setting(1, 2.0, 0.3).zeta2 == 0.0

    def test_requires_positive_time(self):
        with pytest.raises(DomainError):
            optimal_setting(3, 1.0, 0.0)


class TestCfi:
    def test_no_bias_no_information(self):
        params = NoiseParams(omega=1.0, temperature=1e10, gamma0=1e-9, lam=5.0)
        setting = optimal_setting(3, 1.0, 1.0)
        assert cfi(params, 3, 1.0, setting, MODE_FROZEN) < 1e-18

    def test_single_atom_closed_form(self, paper_params):
        t = 1.0
        snap = channel_at(paper_params, t)
        setting = optimal_setting(1, paper_params.omega, t)
        value = cfi(paper_params, 1, t, setting, MODE_FROZEN)
        anchor = (t * snap.eta_perp * paper_params.bias) ** 2
        assert value == pytest.approx(anchor, rel=1e-12)

    def test_finite_difference_matches_dense_oracle(self, paper_params):
        n, t = 9, 1.0
        setting = optimal_setting(n, paper_params.omega, t)
        analytic = cfi(paper_params, n, t, setting, MODE_FINITE_DIFFERENCE)
        dense = cfi_dense(paper_params, n, t, setting)
        assert analytic == pytest.approx(dense, rel=1e-6)

    def test_finite_difference_step_converged(self, paper_params):
        n, t = 9, 1.0
        setting = optimal_setting(n, paper_params.omega, t)
        coarse = cfi(paper_params, n, t, setting, rel_step=1e-6)
        fine = cfi(paper_params, n, t, setting, rel_step=5e-7)
        assert fine == pytest.approx(coarse, rel=1e-6)

    def test_invariant_under_half_turn_of_zeta2(self, paper_params):
        n, t = 6, 0.8
        for zeta2 in (0.1, 1.3, 2.9):
            s1 = MeasurementSetting(zeta1=0.4, zeta2=zeta2, omega_bar=1.0)
            s2 = MeasurementSetting(zeta1=0.4, zeta2=zeta2 + math.pi,
                                    omega_bar=1.0)
            a = cfi(paper_params, n, t, s1, MODE_FROZEN)
            b = cfi(paper_params, n, t, s2, MODE_FROZEN)
            assert a == pytest.approx(b, rel=1e-12)

    def test_rejects_nonpositive_time(self, paper_params):
        setting = MeasurementSetting(zeta1=0.0, zeta2=0.0, omega_bar=1.0)
        with pytest.raises(DomainError):
            cfi(paper_params, 3, 0.0, setting)
        with pytest.raises(DomainError):
            cfi(paper_params, 3, -1.0, setting)


class TestQfiSmallR:
    def test_single_atom_anchor(self, paper_params):
        snap = channel_at(paper_params, 1.0)
        assert qfi_small_r(paper_params, 1, 1.0) == pytest.approx(
            (snap.eta_perp * paper_params.bias) ** 2, rel=1e-12)

    def test_equals_frozen_cfi_maximum(self, paper_params):
        # the parity setting attains the frozen bound exactly; everywhere
        # else the frozen readout information stays below it
        n, t = 9, 1.0
        bound = qfi_small_r(paper_params, n, t)
        at_parity = cfi(paper_params, n, t,
                        optimal_setting(n, paper_params.omega, t), MODE_FROZEN)
        assert at_parity == pytest.approx(bound, rel=1e-8)
        zeta1 = 0.5 * math.pi - 1.0
        for zeta2 in np.linspace(0.0, 2 * math.pi, 37):
            s = MeasurementSetting(zeta1=zeta1, zeta2=float(zeta2),
                                   omega_bar=1.0)
            assert cfi(paper_params, n, t, s, MODE_FROZEN) <= bound * (1 + 1e-12)

    def test_matches_direct_summation(self, rng):
        # log-space accumulation against the straightforward formula
        for _ in range(10):
            params = draw_cp_params(rng)
            n = int(rng.integers(1, 30))
            t = float(rng.uniform(0.1, 3.0) / params.lam)
            snap = channel_at(params, t)
            blocks = blockstate.block_coefficients(n, params.bias, snap)
            direct = float(np.sum(np.exp(blocks.log_mult)
                                  * 4.0 * blocks.winding ** 2 * t ** 2
                                  * blocks.coherence ** 2
                                  / (blocks.pop0 + blocks.pop1)))
            assert qfi_small_r(params, n, t) == pytest.approx(direct, rel=1e-10)

    def test_large_probe_finite(self, figure_params):
        value = qfi_small_r(figure_params, 2000, 0.05)
        assert np.isfinite(value) and value > 0.0


class TestQfiExact:
    def test_frozen_mode_equals_small_r(self, paper_params):
        for n in (1, 4, 9):
            a = qfi_exact(paper_params, n, 1.0, MODE_FROZEN)
            b = qfi_small_r(paper_params, n, 1.0)
            assert a == pytest.approx(b, rel=1e-10)

    def test_matches_dense_oracle(self, rng):
        for _ in range(5):
            params = draw_cp_params(rng)
            n = int(rng.integers(1, 6))
            t = float(rng.uniform(0.2, 3.0) / params.lam)
            a = qfi_exact(params, n, t, MODE_FINITE_DIFFERENCE)
            d = qfi_dense(params, n, t)
            assert a == pytest.approx(d, rel=1e-6)

    def test_no_bias_no_information(self):
        params = NoiseParams(omega=1.0, temperature=1e10, gamma0=1e-9, lam=5.0)
        assert qfi_exact(params, 3, 1.0) < 1e-18


class TestBlockEigensystem:
    def test_eigenvalue_structure(self, rng):
        for _ in range(10):
            params = draw_cp_params(rng)
            n = int(rng.integers(1, 12))
            t = float(rng.uniform(0.1, 4.0) / params.lam)
            snap = channel_at(params, t)
            blocks = blockstate.block_coefficients(n, params.bias, snap)
            eig = block_eigensystem(blocks, params.omega * t)
            assert np.all(eig.nu_plus >= eig.nu_minus)
            assert np.all(eig.nu_minus >= -1e-15)
            assert np.allclose(eig.nu_plus + eig.nu_minus,
                               blocks.pop0 + blocks.pop1, rtol=1e-12)

    def test_degenerate_block_any_basis(self):
        # zero bias degenerates every block; the quantum value must still
        # evaluate (to zero information) without a singular eigenvector
        params = NoiseParams(omega=1.0, temperature=1e8, gamma0=1e-9, lam=5.0)
        assert qfi_exact(params, 4, 1.0, MODE_FROZEN) >= 0.0


class TestCoincidence:
    def test_parity_setting_reaches_frozen_bound_with_known_residual(self):
        # at zeta1 = pi/2 - omega*t and the parity zeta2 the full-derivative
        # readout information exceeds the frozen bound by exactly
        # sum_m C(n-1,m) (d_omega S_m)^2 / S_m  (S_m = pop0 + pop1): the
        # residual carried by the frequency dependence of bias and damping.
        # At T = 200 it sits near 5e-6 relative, not below 1e-6.
        for lam in (0.5, 5.0, 50.0):
            params = NoiseParams(omega=1.0, temperature=200.0,
                                 gamma0=1e-4, lam=lam)
            for n in range(2, 10):
                t = 1.0
                setting = optimal_setting(n, params.omega, t)
                full = cfi(params, n, t, setting, MODE_FINITE_DIFFERENCE)
                frozen_bound = qfi_small_r(params, n, t)

                def pop_sums(w):
                    snap = channel_at(params.with_omega(w), t)
                    b = blockstate.block_coefficients(n, params.with_omega(w).bias,
                                                      snap)
                    return b.pop0 + b.pop1

                d_sums = richardson_central(pop_sums, params.omega,
                                            1e-6 * params.omega)
                blocks = blockstate.block_coefficients(
                    n, params.bias, channel_at(params, t))
                residual = float(np.sum(np.exp(blocks.log_mult) * d_sums ** 2
                                        / (blocks.pop0 + blocks.pop1)))
                gap = full - frozen_bound
                assert gap > 0.0
                assert gap == pytest.approx(residual,
                                            rel=0.1, abs=1e-12 * frozen_bound)
                assert gap / frozen_bound < 1e-5

    def test_readout_never_beats_quantum_bound(self, paper_params):
        n, t = 9, 1.0
        bound = qfi_exact(paper_params, n, t, MODE_FINITE_DIFFERENCE)
        zeta1 = 0.5 * math.pi - 1.0
        for zeta2 in np.linspace(0.0, 2 * math.pi, 25):
            s = MeasurementSetting(zeta1=zeta1, zeta2=float(zeta2),
                                   omega_bar=1.0)
            value = cfi(paper_params, n, t, s, MODE_FINITE_DIFFERENCE)
            assert value <= bound * (1.0 + 1e-9)


class TestFisherReport:
    def test_orderings(self, paper_params):
        n, t = 5, 0.7
        report = fisher_report(paper_params, n, t,
                               optimal_setting(n, paper_params.omega, t))
        assert report.cfi_exact <= report.qfi_exact * (1 + 1e-9)
        assert report.cfi_small_r <= report.qfi_small_r * (1 + 1e-9)
        assert report.derivative_mode == MODE_FINITE_DIFFERENCE
