"""Classical and quantum Fisher information of the frequency estimate.

Two derivative conventions are supported everywhere:

``finite_difference``
    The frequency derivative flows through everything that depends on it:
    the polarization bias, the rate ratio, the channel damping factors and
    the accumulated phase omega * t. Central differences with one
    Richardson extrapolation level.

``frozen_bias_ratio``
    Bias and rate ratio are held constant, so only the phase carries the
    derivative. In this convention the classical Fisher information of the
    energy readout has the closed per-block form

        4 (p0+p1) coh^2 w^2 t^2 sin^2(theta)
        ------------------------------------ ,
        (p0+p1)^2 - 4 coh^2 cos^2(theta)

    theta = zeta2 - w (omega t + zeta1), and its maximum over the setting
    equals the frozen quantum Fisher information ``qfi_small_r``.

Per-weight contributions are accumulated with numpy sums (pairwise, fixed
order), so results are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import blockstate
from ._numerics import DEFAULT_REL_STEP, richardson_central
from .blockstate import MeasurementSetting, ProbeBlocks
from .channel import NoiseParams, channel_at
from .errors import DomainError

MODE_FINITE_DIFFERENCE = "finite_difference"
MODE_FROZEN = "frozen_bias_ratio"

#: probabilities and derivatives this small contribute nothing
TERM_FLOOR = 1e-30
#: eigenvalue-pair floor in the quantum Fisher sum
PAIR_FLOOR = 1e-30


@dataclass(frozen=True)
class BlockEigensystem:
    """Eigensystem of the 2x2 control blocks at one frequency.

    nu_plus/nu_minus are the per-weight eigenvalues (nu_plus >= nu_minus,
    nu_plus + nu_minus = pop0 + pop1), gap their difference, and vectors
    the stacked orthonormal eigenvector matrices, columns ordered
    (minus, plus) as returned by the Hermitian eigensolver.
    """

    nu_minus: np.ndarray
    nu_plus: np.ndarray
    gap: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class FisherReport:
    """All four Fisher values at one configuration."""

    cfi_exact: float
    cfi_small_r: float
    qfi_exact: float
    qfi_small_r: float
    derivative_mode: str


def optimal_setting(n: int, omega_bar: float, t: float) -> MeasurementSetting:
    """Setting that maximises the frozen-convention Fisher information.

    zeta1 = pi/2 - omega_bar * t always; zeta2 = pi/2 for even n and 0 for
    odd n. omega_bar is the current best frequency estimate, not a fitting
    variable.
    """
    if t <= 0.0:
        raise DomainError(f"interrogation time must be positive, got {t!r}")
    zeta2 = 0.5 * math.pi if n % 2 == 0 else 0.0
    return MeasurementSetting(zeta1=0.5 * math.pi - omega_bar * t,
                              zeta2=zeta2, omega_bar=omega_bar)


def _blocks_at(params: NoiseParams, n: int, t: float) -> ProbeBlocks:
    return blockstate.block_coefficients(n, params.bias, channel_at(params, t))


def _prob_vector(params: NoiseParams, n: int, t: float,
                 setting: MeasurementSetting) -> np.ndarray:
    dist = blockstate.readout_probabilities(
        _blocks_at(params, n, t), params.omega * t, setting)
    return np.concatenate([dist.p0, dist.p1])


def cfi(params: NoiseParams, n: int, t: float, setting: MeasurementSetting,
        mode: str = MODE_FINITE_DIFFERENCE,
        rel_step: float = DEFAULT_REL_STEP) -> float:
    """Classical Fisher information of the energy readout.

    Sum over weight classes, with multiplicity, of
    (d_omega p0)^2 / p0 + (d_omega p1)^2 / p1. ``mode`` selects the
    derivative convention (see module docstring). Terms whose probability
    and derivative both lie below TERM_FLOOR contribute nothing.
    """
    if t <= 0.0:
        raise DomainError(f"interrogation time must be positive, got {t!r}")
    if mode == MODE_FINITE_DIFFERENCE:
        h = rel_step * params.omega
        dp = richardson_central(
            lambda w: _prob_vector(params.with_omega(w), n, t, setting),
            params.omega, h)
        p = _prob_vector(params, n, t, setting)
        blocks = _blocks_at(params, n, t)
        mult = np.exp(np.concatenate([blocks.log_mult, blocks.log_mult]))
        keep = ~((p <= TERM_FLOOR) & (np.abs(dp) <= TERM_FLOOR))
        p_safe = np.maximum(p[keep], 1e-300)
        return float(np.sum(mult[keep] * dp[keep] ** 2 / p_safe))

    if mode == MODE_FROZEN:
        blocks = _blocks_at(params, n, t)
        dist = blockstate.readout_probabilities(blocks, params.omega * t, setting)
        theta = setting.zeta2 - blocks.winding * (params.omega * t + setting.zeta1)
        # d p0 / d omega = +coh * w * t * sin(theta); d p1 = -d p0
        with np.errstate(divide="ignore"):
            log_abs_dp = (blocks.log_coh_abs
                          + np.log(np.abs(blocks.winding * t * np.sin(theta))))
        log_abs_dp[blocks.winding == 0] = -np.inf
        total = 0.0
        for log_p in (dist.log_p0, dist.log_p1):
            finite_p = log_p > math.log(TERM_FLOOR)
            tiny_dp = log_abs_dp <= math.log(TERM_FLOOR)
            keep = finite_p & ~tiny_dp
            total += float(np.sum(np.exp(
                blocks.log_mult[keep] + 2.0 * log_abs_dp[keep] - log_p[keep])))
            # degenerate corner: probability underflowed but derivative did not
            blown = ~finite_p & ~tiny_dp
            if np.any(blown):
                total += float(np.sum(np.exp(
                    blocks.log_mult[blown] + 2.0 * log_abs_dp[blown]) / 1e-300))
        return total

    raise DomainError(f"unknown derivative mode {mode!r}")


def qfi_small_r(params: NoiseParams, n: int, t: float) -> float:
    """Frozen-convention quantum Fisher information.

    Sum_m C(n-1, m) * 4 w_m^2 t^2 coh_m^2 / (pop0_m + pop1_m), evaluated in
    log space so probes of thousands of atoms stay finite.
    """
    if t <= 0.0:
        raise DomainError(f"interrogation time must be positive, got {t!r}")
    blocks = _blocks_at(params, n, t)
    keep = (blocks.winding != 0) & (blocks.coh_sign != 0)
    if not np.any(keep):
        return 0.0
    log_terms = (blocks.log_mult[keep] + math.log(4.0)
                 + 2.0 * blocks.log_coh_abs[keep]
                 + 2.0 * np.log(np.abs(blocks.winding[keep]) * t)
                 - blocks.log_pop_sum()[keep])
    hi = log_terms.max()
    if hi == -np.inf:
        return 0.0
    return float(math.exp(hi) * np.exp(log_terms - hi).sum())


def block_eigensystem(blocks: ProbeBlocks, phi_tot: float) -> BlockEigensystem:
    """Eigendecomposition of every 2x2 control block.

    phi_tot is the total phase multiplying the winding in the block
    off-diagonal. Eigenvalues come from the closed form
    (pop0 + pop1 +/- gap)/2 with gap = sqrt((pop0-pop1)^2 + 4 coh^2);
    eigenvectors from the batched Hermitian solver (any orthonormal basis
    is fine on degenerate blocks).
    """
    mats = _block_matrices(blocks, phi_tot)
    pop0, pop1, coh = blocks.pop0, blocks.pop1, blocks.coherence
    gap = np.sqrt((pop0 - pop1) ** 2 + 4.0 * coh ** 2)
    half_sum = 0.5 * (pop0 + pop1)
    _, vecs = np.linalg.eigh(mats)
    return BlockEigensystem(nu_minus=half_sum - 0.5 * gap,
                            nu_plus=half_sum + 0.5 * gap,
                            gap=gap, vectors=vecs)


def _block_matrices(blocks: ProbeBlocks, phi_tot: float) -> np.ndarray:
    """Stacked (n, 2, 2) complex block matrices at total phase phi_tot."""
    off = blocks.coherence * np.exp(-1j * phi_tot * blocks.winding)
    mats = np.empty((blocks.n, 2, 2), dtype=complex)
    mats[:, 0, 0] = blocks.pop0
    mats[:, 0, 1] = off
    mats[:, 1, 0] = np.conj(off)
    mats[:, 1, 1] = blocks.pop1
    return mats


def qfi_exact(params: NoiseParams, n: int, t: float,
              mode: str = MODE_FINITE_DIFFERENCE,
              rel_step: float = DEFAULT_REL_STEP) -> float:
    """Quantum Fisher information from the block eigensystem.

    Per block, 4 * sum_{s,s'} nu_s / (nu_s + nu_s')^2
    |<xi_s| d_omega B |xi_s'>|^2, summed with multiplicities; eigenvalue
    pairs below PAIR_FLOOR are skipped. The frequency derivative of the
    block matrices follows ``mode``. Intended for moderate probe sizes
    (block populations scale like 2^-n); large-n sweeps should use
    qfi_small_r.
    """
    if t <= 0.0:
        raise DomainError(f"interrogation time must be positive, got {t!r}")
    blocks = _blocks_at(params, n, t)

    if mode == MODE_FINITE_DIFFERENCE:
        def mats_at(w: float) -> np.ndarray:
            return _block_matrices(_blocks_at(params.with_omega(w), n, t), w * t)

        dmats = richardson_central(mats_at, params.omega,
                                   rel_step * params.omega)
    elif mode == MODE_FROZEN:
        # only the phase varies, so the derivative is analytic:
        # d/d_omega of coh * e^{-i omega t w} = -i t w * (that entry)
        off = (blocks.coherence
               * np.exp(-1j * params.omega * t * blocks.winding))
        doff = -1j * t * blocks.winding * off
        dmats = np.zeros((n, 2, 2), dtype=complex)
        dmats[:, 0, 1] = doff
        dmats[:, 1, 0] = np.conj(doff)
    else:
        raise DomainError(f"unknown derivative mode {mode!r}")
    eig = block_eigensystem(blocks, params.omega * t)
    nu = np.stack([eig.nu_minus, eig.nu_plus], axis=1)
    nu = np.maximum(nu, 0.0)
    # derivative matrices rotated into each block's eigenbasis
    vdv = np.conj(np.swapaxes(eig.vectors, 1, 2)) @ dmats @ eig.vectors
    mult = np.exp(blocks.log_mult)
    total = 0.0
    for s in range(2):
        for sp in range(2):
            pair = nu[:, s] + nu[:, sp]
            keep = pair > PAIR_FLOOR
            if not np.any(keep):
                continue
            amp2 = np.abs(vdv[keep, s, sp]) ** 2
            total += float(np.sum(
                mult[keep] * 4.0 * nu[keep, s] / pair[keep] ** 2 * amp2))
    return total


def fisher_report(params: NoiseParams, n: int, t: float,
                  setting: MeasurementSetting,
                  rel_step: float = DEFAULT_REL_STEP) -> FisherReport:
    """Evaluate all four Fisher quantities at one configuration."""
    return FisherReport(
        cfi_exact=cfi(params, n, t, setting, MODE_FINITE_DIFFERENCE, rel_step),
        cfi_small_r=cfi(params, n, t, setting, MODE_FROZEN),
        qfi_exact=qfi_exact(params, n, t, MODE_FINITE_DIFFERENCE, rel_step),
        qfi_small_r=qfi_small_r(params, n, t),
        derivative_mode=MODE_FINITE_DIFFERENCE,
    )
