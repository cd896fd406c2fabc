"""Phase-covariant dissipative qubit channel with exponential-memory noise.

A two-level atom with Hamiltonian h = (omega/2) sigma_z couples to a bath
whose memory kernel decays at rate ``lam``; the reduced dynamics is the
phase-covariant map

    v_x -> eta_perp (cos(phi) v_x - sin(phi) v_y)
    v_y -> eta_perp (sin(phi) v_x + cos(phi) v_y)
    v_z -> kappa + eta_par v_z,          phi = omega t,

acting on Bloch components. The damping factors are

    eta_par(t)  = decay_factor(R, lam, t),      R = gamma0 / (lam * bias)
    eta_perp(t) = decay_factor(R/2, lam, t)
    kappa(t)    = -bias * (1 - eta_par(t))

with bias = tanh(omega / 2T), so the thermal state is a fixed point at
every t. Basis convention throughout: |0> is the sigma_z = +1 (excited)
state with energy +omega/2, |1> the ground state; the thermal populations
are ((1 - bias)/2, (1 + bias)/2).

The same dynamics admits a time-local master equation with rates
``time_local_rates``; for R >= 1/4 those rates diverge at finite times
(the map eventually leaves the completely-positive region).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, SingularRateError

#: half-width of the series window around the A = sqrt(1-4R) = 0 branch point
BRANCH_WINDOW = 1e-8


def polarization_bias(omega: float, temperature: float) -> float:
    """Thermal polarization bias tanh(omega / (2 * temperature)).

    Raises DomainError unless omega > 0 and temperature > 0.
    """
    if omega <= 0.0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    if temperature <= 0.0:
        raise DomainError(f"temperature must be positive, got {temperature!r}")
    return math.tanh(omega / (2.0 * temperature))


@dataclass(frozen=True)
class NoiseParams:
    """Physical configuration of the noisy evolution.

    Attributes
    ----------
    omega : float
        Atomic angular frequency (hbar = 1), > 0.
    temperature : float
        Bath temperature (k_B = 1), > 0.
    gamma0 : float
        Bare decay rate, >= 0.
    lam : float
        Inverse bath memory time (kernel decay rate), > 0.
    bias : float
        Derived: tanh(omega / 2T), in (0, 1). Never set directly.
    rate_ratio : float
        Derived: gamma0 / (lam * bias). Controls positivity: the dynamics
        eventually breaks positivity iff rate_ratio >= 1/4.
    """

    omega: float
    temperature: float
    gamma0: float
    lam: float
    bias: float = field(init=False, repr=False)
    rate_ratio: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.gamma0 < 0.0:
            raise DomainError(f"gamma0 must be nonnegative, got {self.gamma0!r}")
        if self.lam <= 0.0:
            raise DomainError(f"lam must be positive, got {self.lam!r}")
        b = polarization_bias(self.omega, self.temperature)
        if not 0.0 < b < 1.0:
            raise DomainError(
                f"polarization bias {b!r} outside (0, 1); omega/temperature ratio "
                "too extreme for floating point")
        object.__setattr__(self, "bias", b)
        object.__setattr__(self, "rate_ratio", self.gamma0 / (self.lam * b))

    def with_omega(self, omega: float) -> "NoiseParams":
        """Same bath, shifted frequency; derived fields are recomputed."""
        return replace(self, omega=omega)

    @property
    def gkls_decay_rate(self) -> float:
        """Markovian-generator decay rate gamma0 * (1 + n_bar)."""
        return self.gamma0 * (1.0 + 1.0 / math.expm1(self.omega / self.temperature))

    @property
    def gkls_excitation_rate(self) -> float:
        """Markovian-generator excitation rate, detailed-balanced partner."""
        return math.exp(-self.omega / self.temperature) * self.gkls_decay_rate


@dataclass(frozen=True)
class ChannelSnapshot:
    """The phase-covariant channel frozen at one time.

    eta_par, eta_perp in [0, 1] are the longitudinal/transverse damping
    factors, kappa in [-1, 1] the Bloch-z translation, phi = omega * t the
    accumulated precession phase.
    """

    t: float
    eta_par: float
    eta_perp: float
    kappa: float
    phi: float

    @classmethod
    def identity(cls) -> "ChannelSnapshot":
        return cls(t=0.0, eta_par=1.0, eta_perp=1.0, kappa=0.0, phi=0.0)


@dataclass(frozen=True)
class TimeLocalRates:
    """Rates of the equivalent time-local master equation at one time."""

    gamma_plus: float
    gamma_minus: float
    gamma_z: float


@dataclass(frozen=True)
class CPStatus:
    """Result of the complete-positivity check of one snapshot.

    margin_sum is the smallest (bound - value) over the three inequalities
    eta_par + kappa <= 1, eta_par - kappa <= 1 and
    1 + eta_par >= sqrt(4 eta_perp^2 + kappa^2); the map is CP iff it is
    nonnegative. violated_condition names the binding violated inequality
    ("none", "eta_plus_kappa", "eta_minus_kappa" or "cone").
    """

    is_cp: bool
    margin_sum: float
    violated_condition: str


def decay_factor(ratio: float, lam: float, t: float) -> float:
    """Relaxation profile e^{-x}[sinh(xA)/A + cosh(xA)], x = lam*t/2.

    A = sqrt(1 - 4*ratio); continued analytically through the branch point:
    for ratio > 1/4 the hyperbolic pair becomes sin(xB)/B + cos(xB) with
    B = sqrt(4*ratio - 1), and exactly at A = 0 the limit e^{-x}(1 + x).
    Evaluated in exponential-difference form so it never overflows.
    """
    if t < 0.0:
        raise DomainError(f"t must be nonnegative, got {t!r}")
    if lam <= 0.0:
        raise DomainError(f"lam must be positive, got {lam!r}")
    if t == 0.0:
        return 1.0
    x = 0.5 * lam * t
    disc = 1.0 - 4.0 * ratio
    if abs(disc) < BRANCH_WINDOW:
        return math.exp(-x) * (1.0 + x)
    if disc > 0.0:
        a = math.sqrt(disc)
        # e^{-x}[sinh(xA)/A + cosh(xA)] rewritten with nonpositive exponents
        return ((1.0 + a) * math.exp(x * (a - 1.0))
                - (1.0 - a) * math.exp(-x * (a + 1.0))) / (2.0 * a)
    b = math.sqrt(-disc)
    return math.exp(-x) * (math.sin(x * b) / b + math.cos(x * b))


def decay_factor_dt(ratio: float, lam: float, t: float) -> float:
    """Closed-form time derivative of ``decay_factor``.

    d/dt = -2 lam ratio e^{-x} sinh(xA)/A on the hyperbolic branch, with the
    matching trigonometric and A -> 0 limits.
    """
    if t < 0.0:
        raise DomainError(f"t must be nonnegative, got {t!r}")
    if t == 0.0:
        return 0.0
    x = 0.5 * lam * t
    disc = 1.0 - 4.0 * ratio
    if abs(disc) < BRANCH_WINDOW:
        return -(lam ** 2) * ratio * t * math.exp(-x)
    if disc > 0.0:
        a = math.sqrt(disc)
        return -lam * ratio * (math.exp(x * (a - 1.0))
                               - math.exp(-x * (a + 1.0))) / a
    b = math.sqrt(-disc)
    return -2.0 * lam * ratio * math.exp(-x) * math.sin(x * b) / b


def channel_at(params: NoiseParams, t: float) -> ChannelSnapshot:
    """Evaluate the phase-covariant channel at time t >= 0.

    eta_par uses the full rate ratio, eta_perp the halved one, and
    kappa = -bias * (1 - eta_par), which pins the thermal fixed point.
    """
    eta_par = decay_factor(params.rate_ratio, params.lam, t)
    eta_perp = decay_factor(0.5 * params.rate_ratio, params.lam, t)
    kappa = -params.bias * (1.0 - eta_par)
    return ChannelSnapshot(t=t, eta_par=eta_par, eta_perp=eta_perp,
                           kappa=kappa, phi=params.omega * t)


def time_local_rates(params: NoiseParams, t: float) -> TimeLocalRates:
    """Rates of the time-local master equation at time t.

    gamma_plus/minus = -(1 -/+ bias)/2 * d/dt log f(R), and
    gamma_z = 1/4 * d/dt log[f(R) / f(R/2)^2], where f is the relaxation
    profile ``decay_factor``. Derivatives are analytic, suitable inside an
    ODE right-hand side. Raises SingularRateError if either profile has
    reached zero (possible only for rate_ratio > 1/4).
    """
    r = params.rate_ratio
    f_full = decay_factor(r, params.lam, t)
    f_half = decay_factor(0.5 * r, params.lam, t)
    if f_full <= 0.0 or f_half <= 0.0:
        raise SingularRateError(t)
    dlog_full = decay_factor_dt(r, params.lam, t) / f_full
    dlog_half = decay_factor_dt(0.5 * r, params.lam, t) / f_half
    # on the oscillatory branch the log-derivative blows up at profile
    # zeros; rates this far beyond the kernel scale mean the zero was hit
    if max(abs(dlog_full), abs(dlog_half)) > 1e9 * params.lam:
        raise SingularRateError(t)
    return TimeLocalRates(
        gamma_plus=-0.5 * (1.0 - params.bias) * dlog_full,
        gamma_minus=-0.5 * (1.0 + params.bias) * dlog_full,
        gamma_z=0.25 * (dlog_full - 2.0 * dlog_half),
    )


def cp_check(snapshot: ChannelSnapshot) -> CPStatus:
    """Check complete positivity of one snapshot and report margins."""
    m_plus = 1.0 - (snapshot.eta_par + snapshot.kappa)
    m_minus = 1.0 - (snapshot.eta_par - snapshot.kappa)
    m_cone = (1.0 + snapshot.eta_par
              - math.sqrt(4.0 * snapshot.eta_perp ** 2 + snapshot.kappa ** 2))
    margin = min(m_plus, m_minus, m_cone)
    if margin >= 0.0:
        violated = "none"
    elif margin == m_plus:
        violated = "eta_plus_kappa"
    elif margin == m_minus:
        violated = "eta_minus_kappa"
    else:
        violated = "cone"
    return CPStatus(is_cp=margin >= 0.0, margin_sum=margin,
                    violated_condition=violated)


def positivity_threshold(params: NoiseParams) -> bool:
    """True iff the dynamics eventually breaks positivity (rate_ratio >= 1/4)."""
    return params.rate_ratio >= 0.25


def thermal_qubit(bias: float) -> np.ndarray:
    """Thermal single-qubit state diag((1-bias)/2, (1+bias)/2)."""
    return np.array([[0.5 * (1.0 - bias), 0.0],
                     [0.0, 0.5 * (1.0 + bias)]], dtype=complex)


def apply_to_qubit(snapshot: ChannelSnapshot, state: np.ndarray) -> np.ndarray:
    """Apply the snapshot to a single-qubit density matrix.

    Populations mix through alpha_s = (1 + s eta_par + kappa)/2 and
    beta_s = (1 - s eta_par - kappa)/2 (s = +/-1); the coherence picks up
    e^{-i phi} eta_perp. Raises DomainError if ``state`` is not a valid
    density matrix.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape != (2, 2):
        raise DomainError(f"expected a 2x2 density matrix, got shape {state.shape}")
    if np.abs(state - state.conj().T).max() > 1e-10:
        raise DomainError("state is not Hermitian")
    if abs(np.trace(state).real - 1.0) > 1e-10 or abs(np.trace(state).imag) > 1e-10:
        raise DomainError("state does not have unit trace")
    if np.linalg.eigvalsh(state).min() < -1e-10:
        raise DomainError("state is not positive semidefinite")

    a = state[0, 0]
    b = state[1, 1]
    c = state[0, 1]
    alpha = lambda s: 0.5 * (1.0 + s * snapshot.eta_par + snapshot.kappa)
    beta = lambda s: 0.5 * (1.0 - s * snapshot.eta_par - snapshot.kappa)
    off = c * np.exp(-1j * snapshot.phi) * snapshot.eta_perp
    return np.array([
        [a * alpha(1) + b * alpha(-1), off],
        [np.conj(off), a * beta(1) + b * beta(-1)],
    ], dtype=complex)
