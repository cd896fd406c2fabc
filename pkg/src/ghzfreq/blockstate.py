"""O(n) Hamming-weight block representation of the evolved probe.

An n-atom probe prepared by the CNOT / Hadamard / CNOT circuit from thermal
qubits and evolved under the phase-covariant channel is permutation
symmetric over the n-1 register atoms: every register bitstring x with
Hamming weight m carries the identical 2x2 control-qubit block

    [[ pop0_m,                e^{-i phi_tot w_m} coh_m ],
     [ e^{+i phi_tot w_m} coh_m,                pop1_m ]]

with multiplicity C(n-1, m) and integer phase winding w_m = n - 2m. The
whole 2^n-dimensional state is therefore summarised by n blocks. All
coefficients are kept in log space (each is a sum of products of n
population factors and underflows in direct arithmetic once n is a few
hundred).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSnapshot
from .errors import DomainError, InternalConsistencyError

#: absolute negativity below which a probability is treated as rounding
NEGATIVITY_TOL = 1e-14


def binomial_log(n: int, m: int) -> float:
    """log C(n, m) via log-gamma; DomainError unless 0 <= m <= n."""
    if not 0 <= m <= n:
        raise DomainError(f"binomial index m={m!r} out of range for n={n!r}")
    return math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(n - m + 1)


@dataclass(frozen=True)
class MeasurementSetting:
    """Angles of the pre-measurement stage.

    zeta1 is the per-qubit z rotation, zeta2 the generalized-Hadamard angle
    on the control qubit, omega_bar the frequency estimate used to choose
    zeta1. Raw values are preserved (derivatives need them); reduced angles
    are for reporting only.
    """

    zeta1: float
    zeta2: float
    omega_bar: float

    @property
    def zeta1_reduced(self) -> float:
        return self.zeta1 % (2.0 * math.pi)

    @property
    def zeta2_reduced(self) -> float:
        return self.zeta2 % (2.0 * math.pi)


@dataclass(frozen=True)
class ProbeBlocks:
    """Per-weight block coefficients of the evolved probe, in log space.

    Arrays are indexed by the register Hamming weight m = 0..n-1.
    ``coh_sign`` carries the sign of the coherence (0 where it vanishes),
    ``winding`` the integer phase winding n - 2m, and ``log_mult`` the log
    multiplicity log C(n-1, m).
    """

    n: int
    log_pop0: np.ndarray
    log_pop1: np.ndarray
    log_coh_abs: np.ndarray
    coh_sign: np.ndarray
    winding: np.ndarray
    log_mult: np.ndarray

    @property
    def pop0(self) -> np.ndarray:
        """Upper diagonal entries; may underflow to 0 for very large n."""
        return np.exp(self.log_pop0)

    @property
    def pop1(self) -> np.ndarray:
        return np.exp(self.log_pop1)

    @property
    def coherence(self) -> np.ndarray:
        return self.coh_sign * np.exp(self.log_coh_abs)

    def log_pop_sum(self) -> np.ndarray:
        """log(pop0_m + pop1_m), stable for any n."""
        return np.logaddexp(self.log_pop0, self.log_pop1)

    def trace(self) -> float:
        """Sum_m C(n-1, m) (pop0_m + pop1_m); equals 1 for a valid probe."""
        t = self.log_mult + self.log_pop_sum()
        hi = t.max()
        return float(math.exp(hi) * np.exp(t - hi).sum())


@dataclass(frozen=True)
class OutcomeDistribution:
    """Energy-measurement outcome probabilities, one pair per weight class.

    p0/p1 are the raw probabilities of reading the control qubit in the
    excited/ground state together with a weight-m register string; each
    pair repeats with multiplicity C(n-1, m). log_p0/log_p1 carry the same
    information in log space (-inf where a probability was clamped to 0).
    """

    n: int
    p0: np.ndarray
    p1: np.ndarray
    log_p0: np.ndarray
    log_p1: np.ndarray
    log_mult: np.ndarray

    def total(self) -> float:
        """Sum of all probabilities with multiplicity; 1 up to rounding."""
        t = self.log_mult + np.logaddexp(self.log_p0, self.log_p1)
        hi = t.max()
        return float(math.exp(hi) * np.exp(t - hi).sum())


def block_coefficients(n: int, bias: float,
                       snapshot: ChannelSnapshot) -> ProbeBlocks:
    """Block coefficients of the probe evolved under ``snapshot``.

    With alpha_s = (1 + s*eta_par + kappa)/2, beta_s = 1 - alpha_s and
    s = +/- bias, the weight-m block carries

        pop0_m = [alpha_-^(n-m) beta_-^m + alpha_+^(n-m) beta_+^m] / 2
        pop1_m = same with the exponents swapped
        coh_m  = eta_perp^n / 2^(n+1) *
                 [(1-bias)^(n-m) (1+bias)^m - (1-bias)^m (1+bias)^(n-m)]

    Every additive term is evaluated as a log-magnitude and the pairs are
    combined with stable log-sum arithmetic, so the result stays finite for
    probes of thousands of atoms. The snapshot is assumed to lie in the
    completely positive region; coefficients that would require the log of
    a nonpositive factor raise DomainError.
    """
    if n < 1:
        raise DomainError(f"probe size must be >= 1, got {n!r}")
    if not 0.0 <= bias < 1.0:
        raise DomainError(f"bias must lie in [0, 1), got {bias!r}")

    alpha_m = 0.5 * (1.0 - bias * snapshot.eta_par + snapshot.kappa)
    alpha_p = 0.5 * (1.0 + bias * snapshot.eta_par + snapshot.kappa)
    beta_m = 1.0 - alpha_m
    beta_p = 1.0 - alpha_p
    if min(alpha_m, alpha_p, beta_m, beta_p) <= 0.0:
        raise DomainError("snapshot outside the completely positive region: "
                          "population weights are not all positive")
    if snapshot.eta_perp < 0.0:
        raise DomainError("snapshot outside the completely positive region: "
                          "eta_perp < 0")

    m = np.arange(n, dtype=float)
    la_m, la_p = math.log(alpha_m), math.log(alpha_p)
    lb_m, lb_p = math.log(beta_m), math.log(beta_p)
    log_half = math.log(0.5)
    log_pop0 = log_half + np.logaddexp((n - m) * la_m + m * lb_m,
                                       (n - m) * la_p + m * lb_p)
    log_pop1 = log_half + np.logaddexp(m * la_m + (n - m) * lb_m,
                                       m * la_p + (n - m) * lb_p)

    l1 = (n - m) * math.log1p(-bias) + m * math.log1p(bias)
    l2 = m * math.log1p(-bias) + (n - m) * math.log1p(bias)
    hi = np.maximum(l1, l2)
    lo = np.minimum(l1, l2)
    diff = lo - hi
    with np.errstate(divide="ignore"):
        log_eta = math.log(snapshot.eta_perp) if snapshot.eta_perp > 0.0 else -np.inf
        log_bracket = np.where(diff < 0.0, hi + np.log1p(-np.exp(diff)), -np.inf)
    log_coh_abs = n * log_eta - (n + 1) * math.log(2.0) + log_bracket
    coh_sign = np.sign(l1 - l2)

    winding = (n - 2 * np.arange(n)).astype(float)
    log_mult = np.array([binomial_log(n - 1, int(k)) for k in range(n)])
    return ProbeBlocks(n=n, log_pop0=log_pop0, log_pop1=log_pop1,
                       log_coh_abs=log_coh_abs, coh_sign=coh_sign,
                       winding=winding, log_mult=log_mult)


def readout_probabilities(blocks: ProbeBlocks, phi: float,
                          setting: MeasurementSetting) -> OutcomeDistribution:
    """Outcome probabilities of the energy measurement after pre-measurement.

    With theta_m = zeta2 - winding_m * (phi + zeta1),

        p0_m = [pop0_m + pop1_m + 2 coh_m cos(theta_m)] / 2
        p1_m = [pop0_m + pop1_m - 2 coh_m cos(theta_m)] / 2.

    ``phi`` is the free-evolution phase omega * t. Probabilities within
    NEGATIVITY_TOL below zero are clamped to 0; anything more negative
    raises InternalConsistencyError (it signals a non-CP snapshot rather
    than rounding).
    """
    theta = setting.zeta2 - blocks.winding * (phi + setting.zeta1)
    log_sum = blocks.log_pop_sum()
    # u = 2 coh cos(theta) / (pop0 + pop1), bounded by block positivity
    u = blocks.coh_sign * np.exp(math.log(2.0) + blocks.log_coh_abs - log_sum) \
        * np.cos(theta)

    log_half = math.log(0.5)
    p0_log = np.full(blocks.n, -np.inf)
    p1_log = np.full(blocks.n, -np.inf)
    up = 1.0 + u
    un = 1.0 - u
    ok_p = up > 0.0
    ok_n = un > 0.0
    p0_log[ok_p] = log_half + log_sum[ok_p] + np.log(up[ok_p])
    p1_log[ok_n] = log_half + log_sum[ok_n] + np.log(un[ok_n])
    p0 = np.where(ok_p, np.exp(p0_log), 0.5 * np.exp(log_sum) * up)
    p1 = np.where(ok_n, np.exp(p1_log), 0.5 * np.exp(log_sum) * un)

    worst = min(p0.min(), p1.min())
    if worst < -NEGATIVITY_TOL:
        raise InternalConsistencyError(
            f"outcome probability {worst!r} below -{NEGATIVITY_TOL}; "
            "block coefficients violate positivity beyond rounding")
    p0 = np.maximum(p0, 0.0)
    p1 = np.maximum(p1, 0.0)
    p0_log[p0 == 0.0] = -np.inf
    p1_log[p1 == 0.0] = -np.inf
    return OutcomeDistribution(n=blocks.n, p0=p0, p1=p1,
                               log_p0=p0_log, log_p1=p1_log,
                               log_mult=blocks.log_mult.copy())
