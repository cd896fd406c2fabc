import math

import numpy as np
import pytest

from conftest import random_qubit_state
from ghzfreq.blockstate import MeasurementSetting
from ghzfreq.channel import (ChannelSnapshot, NoiseParams, apply_to_qubit,
                             channel_at, decay_factor, thermal_qubit)
from ghzfreq.errors import (DomainError, PositivityWarning, SingularRateError,
                            SizeError)
from ghzfreq.metrology import qfi_small_r
from ghzfreq.oracle import (DenseState, GateSpec, _kron_chain, cfi_dense,
                            draw_cp_params, energy_dense, evolve_dense,
                            integrate_time_local, measurement_probabilities,
                            premeasure_dense, prepare_probe_dense, qfi_dense,
                            run_verification)


class TestGates:
    @pytest.mark.parametrize("spec", [GateSpec("cnot_fanout"),
                                      GateSpec("hadamard_control"),
                                      GateSpec("generalized_hadamard", 1.3),
                                      GateSpec("z_rotation", 0.7)])
    def test_unitarity(self, spec):
        u = spec.matrix(3)
        assert np.abs(u @ u.conj().T - np.eye(8)).max() < 1e-12

    def test_generalized_hadamard_reduces_to_hadamard(self):
        assert np.allclose(GateSpec("generalized_hadamard", 0.0).matrix(2),
                           GateSpec("hadamard_control").matrix(2), atol=1e-15)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            GateSpec("toffoli").matrix(2)


class TestPrepareProbe:
    def test_zero_temperature_limit_is_maximally_entangled(self):
        # fully polarized input: the circuit emits (|0..0> - |1..1>)/sqrt(2)
        n = 4
        state = prepare_probe_dense(n, 1.0)
        vec = np.zeros(2 ** n, dtype=complex)
        vec[0] = 1.0 / math.sqrt(2.0)
        vec[-1] = -1.0 / math.sqrt(2.0)
        assert np.abs(state.matrix - np.outer(vec, vec.conj())).max() < 1e-12

    def test_single_atom_is_hadamard_rotation(self):
        bias = 0.37
        state = prepare_probe_dense(1, bias)
        had = GateSpec("hadamard_control").matrix(1)
        expected = had @ thermal_qubit(bias) @ had.conj().T
        assert np.abs(state.matrix - expected).max() < 1e-14

    def test_preparation_energy_is_zero(self, rng):
        for n in range(1, 7):
            state = prepare_probe_dense(n, 0.42)
            assert abs(energy_dense(state, 1.3)) < 1e-10

    def test_size_guards(self):
        with pytest.raises(SizeError):
            prepare_probe_dense(13, 0.1)
        with pytest.raises(DomainError):
            prepare_probe_dense(0, 0.1)

    def test_valid_density_matrix(self):
        prepare_probe_dense(5, 0.2).validate()


class TestEvolveDense:
    def test_identity_snapshot_is_noop(self):
        state = prepare_probe_dense(3, 0.3)
        out = evolve_dense(state, ChannelSnapshot.identity())
        assert np.abs(out.matrix - state.matrix).max() < 1e-14

    def test_thermal_product_is_fixed_point(self, paper_params):
        n = 3
        rho = DenseState(n, _kron_chain([thermal_qubit(paper_params.bias)] * n))
        out = evolve_dense(rho, channel_at(paper_params, 0.8))
        assert np.abs(out.matrix - rho.matrix).max() < 1e-14

    def test_agrees_with_single_qubit_rule(self, rng, paper_params):
        snap = channel_at(paper_params, 1.3)
        state = random_qubit_state(rng)
        dense = evolve_dense(DenseState(1, state), snap).matrix
        assert np.abs(dense - apply_to_qubit(snap, state)).max() < 1e-14

    def test_non_cp_warns_but_proceeds(self):
        snap = ChannelSnapshot(t=1.0, eta_par=0.9, eta_perp=0.99,
                               kappa=0.0, phi=0.0)
        state = prepare_probe_dense(2, 0.5)
        with pytest.warns(PositivityWarning):
            out = evolve_dense(state, snap)
        assert abs(np.trace(out.matrix) - 1.0) < 1e-12


class TestPremeasureDense:
    def test_preserves_spectrum_and_trace(self, rng, paper_params):
        n = 4
        state = evolve_dense(prepare_probe_dense(n, paper_params.bias),
                             channel_at(paper_params, 0.9))
        setting = MeasurementSetting(zeta1=0.3, zeta2=1.7, omega_bar=1.0)
        out = premeasure_dense(state, setting)
        assert abs(np.trace(out.matrix) - 1.0) < 1e-12
        assert np.allclose(np.linalg.eigvalsh(out.matrix),
                           np.linalg.eigvalsh(state.matrix), atol=1e-12)

    def test_zero_angles_at_identity_channel_recover_thermal_statistics(self):
        # with no evolution and zero angles the readout circuit undoes the
        # preparation up to a CNOT relabeling of basis states
        n, bias = 3, 0.44
        rho3 = prepare_probe_dense(n, bias)
        setting = MeasurementSetting(zeta1=0.0, zeta2=0.0, omega_bar=1.0)
        probs = measurement_probabilities(premeasure_dense(rho3, setting))
        thermal = DenseState(n, _kron_chain([thermal_qubit(bias)] * n))
        thermal_probs = measurement_probabilities(thermal)
        cnot = GateSpec("cnot_fanout").matrix(n)
        relabeled = np.abs(np.diag(cnot @ np.diag(thermal_probs)
                                   @ cnot.conj().T))
        assert np.allclose(sorted(probs), sorted(thermal_probs), atol=1e-12)
        assert np.allclose(probs, relabeled, atol=1e-12)


class TestIntegrateTimeLocal:
    def test_zero_time_returns_input(self, rng, paper_params):
        state = random_qubit_state(rng)
        out = integrate_time_local(paper_params, state, 0.0)
        assert np.abs(out - state).max() == 0.0

    def test_matches_channel_at_reference_point(self, rng, paper_params):
        for _ in range(5):
            state = random_qubit_state(rng)
            ode = integrate_time_local(paper_params, state, 1.0)
            direct = apply_to_qubit(channel_at(paper_params, 1.0), state)
            assert np.abs(ode - direct).max() < 1e-8

    def test_long_time_thermalizes(self):
        # run to ~17 transverse relaxation times: both damping factors
        # below 1e-7, so any input lands on the thermal state
        params = NoiseParams(omega=1.0, temperature=200.0, gamma0=2.5e-3,
                             lam=5.0)
        plus = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
        out = integrate_time_local(params, plus, 30.0)
        assert np.abs(out - thermal_qubit(params.bias)).max() < 1e-6

    def test_raises_past_rate_singularity(self):
        lam = 5.0
        bias = math.tanh(0.5)
        params = NoiseParams(omega=1.0, temperature=1.0,
                             gamma0=0.5 * lam * bias, lam=lam)
        t_zero = 2.0 * (math.pi - math.atan(1.0)) / lam
        with pytest.raises(SingularRateError):
            integrate_time_local(params, thermal_qubit(bias) + 0j, 1.5 * t_zero)

    def test_rejects_bad_input(self, paper_params):
        with pytest.raises(DomainError):
            integrate_time_local(paper_params, np.eye(3), 1.0)
        with pytest.raises(DomainError):
            integrate_time_local(paper_params, np.eye(2), -1.0)


class TestQfiDense:
    def test_frozen_single_atom_anchor(self, paper_params):
        snap = channel_at(paper_params, 1.0)
        anchor = (snap.eta_perp * paper_params.bias) ** 2
        assert qfi_dense(paper_params, 1, 1.0, frozen=True) == pytest.approx(
            anchor, rel=1e-6)

    def test_frozen_matches_block_form(self, paper_params):
        for n in (2, 5):
            assert qfi_dense(paper_params, n, 1.0, frozen=True) == \
                pytest.approx(qfi_small_r(paper_params, n, 1.0), rel=1e-6)

    def test_no_bias_no_information(self):
        params = NoiseParams(omega=1.0, temperature=1e10, gamma0=1e-9, lam=5.0)
        assert qfi_dense(params, 2, 1.0) < 1e-15

    def test_size_guard(self, paper_params):
        with pytest.raises(SizeError):
            qfi_dense(paper_params, 9, 1.0)


class TestRunVerification:
    def test_passes_on_default_seed(self):
        report = run_verification(seed=0, draws=60)
        assert report.passed

    def test_sign_flip_injection_fails_probabilities(self):
        report = run_verification(seed=0, draws=30,
                                  corrupt="flip_coherence_sign")
        failed = {c.name for c in report.checks if not c.passed}
        assert "outcome probabilities" in failed

    def test_size_cap(self):
        with pytest.raises(DomainError):
            run_verification(sizes=(2, 7))


class TestCfiDense:
    def test_skips_degenerate_outcomes(self, paper_params):
        # a probability pinned at zero with zero derivative must not poison
        # the sum (fully polarized blocks at the parity setting have dark
        # outcomes); just check the value is finite and nonnegative
        setting = MeasurementSetting(zeta1=0.5 * math.pi - 1.0, zeta2=0.0,
                                     omega_bar=1.0)
        value = cfi_dense(paper_params, 3, 1.0, setting)
        assert np.isfinite(value) and value >= 0.0
