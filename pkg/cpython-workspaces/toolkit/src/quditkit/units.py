"""Unit conventions shared by quditkit modules.

Energies are stored as E/h in GHz, times in µs and rates in µs⁻¹. An energy
E/h in GHz corresponds to E/ħ = 2π·E rad/ns, and a rate in ns⁻¹ is 1e3 µs⁻¹.
Physical constants come from ``scipy.constants``.
"""

import numpy as np
from scipy import constants

TWO_PI = 2.0 * np.pi
NS_PER_US = 1.0e3
PER_NS_TO_PER_US = 1.0e3

PLANCK = constants.h
BOLTZMANN = constants.k
ELECTRON_VOLT = constants.electron_volt


def ghz_to_joules(f_ghz):
    """Energy E/h in GHz to joules."""
    return PLANCK * 1.0e9 * np.asarray(f_ghz)


def micro_ev_to_joules(energy_uev):
    """Energy in µeV to joules."""
    return ELECTRON_VOLT * 1.0e-6 * np.asarray(energy_uev)
