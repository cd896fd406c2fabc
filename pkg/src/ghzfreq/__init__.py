"""Energy-resolved frequency estimation with entangled thermal probes.

A numerical engine for a complete estimation protocol: preparation of an
n-atom probe from thermal qubits by a CNOT / Hadamard / CNOT circuit, free
evolution under a phase-covariant channel with an exponential memory
kernel, an energy-basis readout after a tunable pre-measurement circuit,
Fisher-information analysis of the resulting frequency estimate, full
average-energy bookkeeping of every round, and optimization of the
time and energy efficiencies over the interrogation time and probe size.
"""

from .channel import (ChannelSnapshot, CPStatus, NoiseParams, TimeLocalRates,
                      apply_to_qubit, channel_at, cp_check, decay_factor,
                      polarization_bias, positivity_threshold, thermal_qubit,
                      time_local_rates)
from .blockstate import (MeasurementSetting, OutcomeDistribution, ProbeBlocks,
                         binomial_log, block_coefficients,
                         readout_probabilities)
from .energetics import (EnergyLedger, energy_after_evolution,
                         energy_after_premeasure, init_cost, ledger)
from .metrology import (BlockEigensystem, FisherReport, block_eigensystem,
                        cfi, fisher_report, optimal_setting, qfi_exact,
                        qfi_small_r)
from .optimize import (EfficiencyPoint, OptimalTime, RoundsBound, ScalingFit,
                       efficiency_point, eta_energy, eta_time, optimal_time,
                       rounds_and_bound, scaling_fit)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
