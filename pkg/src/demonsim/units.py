"""Conversions between internal energy units and laboratory scales.

Internally every Hamiltonian is expressed in units of the post-quench level
splitting (hbar*omega1 == 1), so inverse temperatures are the dimensionless
combination beta*hbar*omega1.  Laboratory temperatures enter in peV.
"""

import math

# Planck constant in peV per Hz: 6.62607015e-34 J s / 1.602176634e-19 J/eV * 1e12
PLANCK_PEV_PER_HZ = 4.135667696923859e-3


def _require_positive_finite(value: float, what: str) -> None:
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{what} must be positive and finite, got {value}")


def quantum_energy_pev(freq_khz: float) -> float:
    """Level splitting hbar*omega in peV for a transition at omega/2pi = freq_khz."""
    _require_positive_finite(freq_khz, "frequency")
    return PLANCK_PEV_PER_HZ * freq_khz * 1e3


def beta_internal_from_kt(kt_pev: float, omega1_khz: float) -> float:
    """Dimensionless beta*hbar*omega1 for a temperature given in peV."""
    _require_positive_finite(kt_pev, "temperature")
    return quantum_energy_pev(omega1_khz) / kt_pev


def kt_pev_from_beta_internal(beta: float, omega1_khz: float) -> float:
    """Temperature in peV for a dimensionless beta*hbar*omega1."""
    _require_positive_finite(beta, "beta")
    return quantum_energy_pev(omega1_khz) / beta
