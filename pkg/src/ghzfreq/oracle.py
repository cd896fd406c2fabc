"""Dense 2^n brute-force verifier for the block-state engine.

Everything here is deliberately independent of the O(n) analytic path:
states are full density matrices, gates are explicit unitaries, the noisy
evolution is applied qubit by qubit through the Pauli-transfer picture,
and the master equation is integrated numerically from its time-local
rates. Agreement between the two routes is the repository's master
property test (driven by ``run_verification`` and the CLI ``verify``
subcommand).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from . import blockstate, metrology
from .blockstate import MeasurementSetting
from .energetics import energy_after_premeasure
from .channel import (ChannelSnapshot, NoiseParams, channel_at, cp_check,
                      thermal_qubit, time_local_rates)
from ._numerics import DEFAULT_REL_STEP, richardson_central
from .errors import DomainError, PositivityWarning, SizeError

#: dense preparation guard (memory)
MAX_DENSE_QUBITS = 12
#: dense quantum-Fisher guard (eigendecomposition cost)
MAX_QFI_QUBITS = 8

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
#: raising operator |0><1| (|0> is the excited state)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.conj().T


@dataclass(frozen=True)
class DenseState:
    """Full density matrix of an n-qubit probe, control qubit first."""

    n: int
    matrix: np.ndarray

    def validate(self, eig_floor: float = -1e-10) -> "DenseState":
        m = self.matrix
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise DomainError("dense state is not Hermitian")
        if abs(np.trace(m) - 1.0) > 1e-12:
            raise DomainError("dense state trace differs from 1")
        if np.linalg.eigvalsh(m).min() < eig_floor:
            raise DomainError("dense state has a significantly negative eigenvalue")
        return self


def _kron_chain(mats) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


@dataclass(frozen=True)
class GateSpec:
    """One gate of the preparation / pre-measurement circuits.

    kind is one of "cnot_fanout" (control flips every register qubit),
    "hadamard_control", "generalized_hadamard" (angle = zeta2, control
    only) or "z_rotation" (angle = zeta1, applied to every qubit).
    """

    kind: str
    angle: float = 0.0

    def matrix(self, n: int) -> np.ndarray:
        if self.kind == "cnot_fanout":
            p0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
            p1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
            return (_kron_chain([p0] + [IDENTITY] * (n - 1))
                    + _kron_chain([p1] + [SIGMA_X] * (n - 1)))
        if self.kind == "hadamard_control":
            had = (SIGMA_X + SIGMA_Z) / math.sqrt(2.0)
            return _kron_chain([had] + [IDENTITY] * (n - 1))
        if self.kind == "generalized_hadamard":
            z2 = self.angle
            had = np.array([[1.0, np.exp(-1j * z2)],
                            [np.exp(1j * z2), -1.0]], dtype=complex) / math.sqrt(2.0)
            return _kron_chain([had] + [IDENTITY] * (n - 1))
        if self.kind == "z_rotation":
            rot = np.diag([np.exp(-0.5j * self.angle), np.exp(0.5j * self.angle)])
            return _kron_chain([rot] * n)
        raise DomainError(f"unknown gate kind {self.kind!r}")


def _conjugate(state: DenseState, gate: np.ndarray) -> DenseState:
    return DenseState(state.n, gate @ state.matrix @ gate.conj().T)


def prepare_probe_dense(n: int, bias: float) -> DenseState:
    """Thermal product state through CNOT fan-out, Hadamard, CNOT fan-out."""
    if n < 1:
        raise DomainError(f"probe size must be >= 1, got {n!r}")
    if n > MAX_DENSE_QUBITS:
        raise SizeError(f"dense preparation capped at {MAX_DENSE_QUBITS} qubits, "
                        f"got {n}")
    state = DenseState(n, _kron_chain([thermal_qubit(bias)] * n))
    cnot = GateSpec("cnot_fanout").matrix(n)
    state = _conjugate(state, cnot)
    state = _conjugate(state, GateSpec("hadamard_control").matrix(n))
    return _conjugate(state, cnot)


def _transfer_tensor(snapshot: ChannelSnapshot) -> np.ndarray:
    """4-index tensor T[a, b, i, j]: image entry (a, b) of basis |i><j|."""
    c, s = math.cos(snapshot.phi), math.sin(snapshot.phi)
    tensor = np.zeros((2, 2, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            basis = np.zeros((2, 2), dtype=complex)
            basis[i, j] = 1.0
            v0 = basis[0, 0] + basis[1, 1]
            vx = basis[0, 1] + basis[1, 0]
            vy = 1j * (basis[0, 1] - basis[1, 0])
            vz = basis[0, 0] - basis[1, 1]
            wx = snapshot.eta_perp * (c * vx - s * vy)
            wy = snapshot.eta_perp * (s * vx + c * vy)
            wz = snapshot.kappa * v0 + snapshot.eta_par * vz
            tensor[:, :, i, j] = 0.5 * (v0 * IDENTITY + wx * SIGMA_X
                                        + wy * SIGMA_Y + wz * SIGMA_Z)
    return tensor


def evolve_dense(state: DenseState, snapshot: ChannelSnapshot) -> DenseState:
    """Apply the single-qubit channel independently to every qubit.

    A snapshot outside the completely positive region is applied anyway
    (needed to demonstrate positivity breaking) with a PositivityWarning.
    """
    if not cp_check(snapshot).is_cp:
        warnings.warn("applying a non-CP snapshot", PositivityWarning)
    tensor = _transfer_tensor(snapshot)
    n = state.n
    rho = state.matrix
    for q in range(n):
        pre = 2 ** q
        post = 2 ** (n - q - 1)
        r = rho.reshape(pre, 2, post, pre, 2, post)
        rho = np.einsum("abij,PiQRjS->PaQRbS", tensor, r).reshape(2 ** n, 2 ** n)
    return DenseState(n, rho)


def premeasure_dense(state: DenseState, setting: MeasurementSetting,
                     include_hadamard: bool = True) -> DenseState:
    """Pre-measurement circuit: per-qubit z rotation, CNOT fan-out, then
    the generalized Hadamard on the control (skippable to inspect the
    intermediate state)."""
    n = state.n
    out = _conjugate(state, GateSpec("z_rotation", setting.zeta1).matrix(n))
    out = _conjugate(out, GateSpec("cnot_fanout").matrix(n))
    if include_hadamard:
        out = _conjugate(out, GateSpec("generalized_hadamard",
                                       setting.zeta2).matrix(n))
    return out


def measurement_probabilities(state: DenseState) -> np.ndarray:
    """Diagonal of the density matrix (energy-basis outcome probabilities)."""
    return np.real(np.diag(state.matrix)).copy()


def energy_dense(state: DenseState, omega: float) -> float:
    """Tr(H rho) with H = (omega / 2) * sum_i sigma_z^(i)."""
    n = state.n
    idx = np.arange(2 ** n)
    weights = np.array([bin(i).count("1") for i in idx])
    jz = n - 2.0 * weights
    return float(0.5 * omega * np.real(np.diag(state.matrix)) @ jz)


def integrate_time_local(params: NoiseParams, qubit_state: np.ndarray,
                         t: float) -> np.ndarray:
    """Integrate the time-local master equation for one qubit up to t.

    dr/dt = -i[h, r] + g+(t) D[sigma_plus] r + g-(t) D[sigma_minus] r
            + g_z(t) (sigma_z r sigma_z - r),      h = (omega/2) sigma_z,

    with the analytic rates of ``time_local_rates``, using the adaptive
    embedded Runge-Kutta 4(5) pair at absolute tolerance 1e-12. Rates
    diverging along the way raise SingularRateError.
    """
    qubit_state = np.asarray(qubit_state, dtype=complex)
    if qubit_state.shape != (2, 2):
        raise DomainError("expected a single-qubit density matrix")
    if t < 0.0:
        raise DomainError(f"t must be nonnegative, got {t!r}")
    if t == 0.0:
        return qubit_state.copy()

    ham = 0.5 * params.omega * SIGMA_Z

    def rhs(time: float, y: np.ndarray) -> np.ndarray:
        rho = y.reshape(2, 2)
        rates = time_local_rates(params, time)
        out = -1j * (ham @ rho - rho @ ham)
        for rate, op in ((rates.gamma_plus, SIGMA_PLUS),
                         (rates.gamma_minus, SIGMA_MINUS)):
            opd = op.conj().T
            out = out + rate * (op @ rho @ opd
                                - 0.5 * (opd @ op @ rho + rho @ opd @ op))
        out = out + rates.gamma_z * (SIGMA_Z @ rho @ SIGMA_Z - rho)
        return out.ravel()

    sol = solve_ivp(rhs, (0.0, t), qubit_state.ravel(), method="RK45",
                    rtol=1e-11, atol=1e-12)
    if not sol.success:
        raise RuntimeError(f"master-equation integration failed: {sol.message}")
    return sol.y[:, -1].reshape(2, 2)


def _evolved_dense(params: NoiseParams, n: int, t: float) -> DenseState:
    snap = channel_at(params, t)
    return evolve_dense(prepare_probe_dense(n, params.bias), snap)


def qfi_dense(params: NoiseParams, n: int, t: float,
              rel_step: float = DEFAULT_REL_STEP,
              frozen: bool = False) -> float:
    """Quantum Fisher information from the full 2^n eigendecomposition.

    The frequency derivative of the evolved state is taken by central
    differences (with one Richardson level); eigenvalue pairs below 1e-12
    are skipped. With ``frozen=True`` the bias and damping factors are
    pinned at the central frequency and only the precession phase varies,
    mirroring the frozen derivative convention of the analytic engine.
    """
    if n > MAX_QFI_QUBITS:
        raise SizeError(f"dense QFI capped at {MAX_QFI_QUBITS} qubits, got {n}")
    h = rel_step * params.omega

    if frozen:
        snap_center = channel_at(params, t)
        prepared = prepare_probe_dense(n, params.bias)

        def state_at(w: float) -> np.ndarray:
            return evolve_dense(prepared,
                                replace(snap_center, phi=w * t)).matrix
    else:
        def state_at(w: float) -> np.ndarray:
            return _evolved_dense(params.with_omega(w), n, t).matrix

    drho = richardson_central(state_at, params.omega, h)
    nu, vecs = np.linalg.eigh(state_at(params.omega))
    nu = np.maximum(nu, 0.0)
    mixed = vecs.conj().T @ drho @ vecs
    pair = nu[:, None] + nu[None, :]
    keep = pair > 1e-12
    ratio = np.zeros_like(pair)
    ratio[keep] = nu[:, None].repeat(len(nu), axis=1)[keep] / pair[keep] ** 2
    return float(4.0 * np.sum(ratio * np.abs(mixed) ** 2))


def cfi_dense(params: NoiseParams, n: int, t: float,
              setting: MeasurementSetting,
              rel_step: float = DEFAULT_REL_STEP) -> float:
    """Classical Fisher information from dense outcome probabilities.

    Runs the full gate-level pipeline at shifted frequencies and
    differentiates every outcome probability numerically; fully
    independent of the block-state formulas.
    """
    if n > MAX_DENSE_QUBITS:
        raise SizeError(f"dense CFI capped at {MAX_DENSE_QUBITS} qubits, got {n}")

    def probs_at(w: float) -> np.ndarray:
        state = premeasure_dense(_evolved_dense(params.with_omega(w), n, t),
                                 setting)
        return measurement_probabilities(state)

    h = rel_step * params.omega
    dp = richardson_central(probs_at, params.omega, h)
    p = probs_at(params.omega)
    keep = ~((p <= 1e-30) & (np.abs(dp) <= 1e-30))
    return float(np.sum(dp[keep] ** 2 / np.maximum(p[keep], 1e-300)))


# ---------------------------------------------------------------------------
# master property test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    draws: int
    sizes: tuple
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def draw_cp_params(rng: np.random.Generator) -> NoiseParams:
    """Random parameters inside the completely positive regime.

    rate_ratio < 1/4 alone does not guarantee complete positivity: at
    polarization bias beyond roughly 0.7 the cone condition fails at
    intermediate times even for rate_ratio just below 1/4 (the 1/4
    threshold governs positivity, which is weaker). Bias is therefore
    capped at 0.45, where a dense margin scan shows all three CP
    inequalities hold for every rate_ratio <= 0.2 and all times.
    """
    omega = rng.uniform(0.5, 2.0)
    bias = math.exp(rng.uniform(math.log(1e-4), math.log(0.45)))
    temperature = omega / (2.0 * math.atanh(bias))
    lam = math.exp(rng.uniform(math.log(0.5), math.log(50.0)))
    ratio = math.exp(rng.uniform(math.log(1e-4), math.log(0.2)))
    return NoiseParams(omega=omega, temperature=temperature,
                       gamma0=ratio * lam * bias, lam=lam)


def run_verification(seed: int = 0, sizes=(2, 3, 4, 5, 6), draws: int = 200,
                     corrupt: str | None = None) -> VerificationReport:
    """Master property test: analytic engine against the dense oracle.

    For ``draws`` random parameter sets inside the completely positive
    region, checks outcome probabilities (1e-10), evolved and premeasured
    energies (1e-10), and the classical Fisher information (relative 1e-6,
    on a subset of draws), plus Hermiticity/trace sanity of every dense
    state. ``corrupt="flip_coherence_sign"`` is a test hook that flips the
    sign of the analytic block coherences and must make the probability
    check fail.
    """
    if max(sizes) > 6:
        raise DomainError("verification sizes are capped at n = 6")
    if min(sizes) < 1:
        raise DomainError("verification sizes must be >= 1")
    rng = np.random.default_rng(seed)

    dev_prob = 0.0
    dev_e4 = 0.0
    dev_e6 = 0.0
    dev_cfi = 0.0
    dev_sane = 0.0

    for draw in range(draws):
        params = draw_cp_params(rng)
        n = int(rng.choice(sizes))
        t = float(rng.uniform(0.05, 5.0) / params.lam)
        if rng.uniform() < 0.5:
            setting = metrology.optimal_setting(n, params.omega, t)
        else:
            setting = MeasurementSetting(zeta1=rng.uniform(0.0, 2.0 * math.pi),
                                         zeta2=rng.uniform(0.0, 2.0 * math.pi),
                                         omega_bar=params.omega)
        snap = channel_at(params, t)

        blocks = blockstate.block_coefficients(n, params.bias, snap)
        if corrupt == "flip_coherence_sign":
            blocks = replace(blocks, coh_sign=-blocks.coh_sign)
        dist = blockstate.readout_probabilities(blocks, params.omega * t, setting)

        rho4 = _evolved_dense(params, n, t)
        rho6 = premeasure_dense(rho4, setting)
        for state in (rho4, rho6):
            m = state.matrix
            dev_sane = max(dev_sane,
                           float(np.abs(m - m.conj().T).max()),
                           abs(float(np.real(np.trace(m))) - 1.0),
                           abs(float(np.imag(np.trace(m)))))

        p_dense = measurement_probabilities(rho6)
        half = 2 ** (n - 1)
        for x in range(half):
            m_weight = bin(x).count("1")
            dev_prob = max(dev_prob,
                           abs(p_dense[x] - dist.p0[m_weight]),
                           abs(p_dense[half + x] - dist.p1[m_weight]))

        e4_analytic = 0.5 * params.omega * n * snap.kappa
        e6_analytic = energy_after_premeasure(blocks, params, t, setting)
        dev_e4 = max(dev_e4, abs(e4_analytic - energy_dense(rho4, params.omega)))
        dev_e6 = max(dev_e6, abs(e6_analytic - energy_dense(rho6, params.omega)))

        if draw % 10 == 0:
            # larger step than the production default: both routes share the
            # same derivative convention and its roundoff floor drops ~10x,
            # which matters when the drawn bias makes the Fisher value tiny
            analytic = metrology.cfi(params, n, t, setting,
                                     metrology.MODE_FINITE_DIFFERENCE,
                                     rel_step=1e-5)
            dense = cfi_dense(params, n, t, setting, rel_step=1e-5)
            scale = max(abs(dense), 1e-300)
            dev_cfi = max(dev_cfi, abs(analytic - dense) / scale)

    checks = (
        CheckResult("dense state sanity", dev_sane <= 1e-12, dev_sane, 1e-12),
        CheckResult("outcome probabilities", dev_prob <= 1e-10, dev_prob, 1e-10),
        CheckResult("energy after evolution", dev_e4 <= 1e-10, dev_e4, 1e-10),
        CheckResult("energy after premeasurement", dev_e6 <= 1e-10, dev_e6, 1e-10),
        CheckResult("classical Fisher information (relative)",
                    dev_cfi <= 1e-6, dev_cfi, 1e-6),
    )
    return VerificationReport(seed=seed, draws=draws, sizes=tuple(sizes),
                              checks=checks)
