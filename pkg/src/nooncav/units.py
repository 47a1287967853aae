"""Conversion between reduced energy units and laboratory units.

All simulation quantities are dimensionless multiples of sqrt(2) * g_ref.
The single place physical constants enter is here.
"""

#: hbar in eV * s.
HBAR_EV_S = 6.582119e-16


def reduced_to_ev(value: float, g_ref_ev: float, g_ref_reduced: float) -> float:
    """Energy in eV from a reduced value.

    ``g_ref_ev`` is the laboratory value of the reference coupling (e.g.
    5e-5 eV for 50 ueV) and ``g_ref_reduced`` its numerical value in the
    reduced system (1/sqrt(2) under the standard convention).
    """
    return value * g_ref_ev / g_ref_reduced


def energy_ev_to_hz(energy_ev: float) -> float:
    """Rate (s^-1) equivalent of an energy via E / hbar."""
    return energy_ev / HBAR_EV_S


def reduced_to_hz(value: float, g_ref_ev: float, g_ref_reduced: float) -> float:
    return energy_ev_to_hz(reduced_to_ev(value, g_ref_ev, g_ref_reduced))
