"""Closed-form rate-equation model of the free decay of the prepared GES.

After a perfect preparation the two-photon eigenstate loses population to the
two delocalized one-photon states (each fed at half its decay rate) and from
there to the vacuum.  Only the photonic fraction of the eigenstate couples to
the cavity loss, so its decay rate is reduced from the bare two-photon value
by the photon weight sin^2(phi):

    Gamma_ges = 2 sin^2(phi) kappa,   Gamma_1p = kappa,
    eta = Gamma_ges / Gamma_1p = 2 sin^2(phi).

This module is the independent analytic reference the full master-equation
propagation is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .design import ges_mixing_angle_n2
from .model import ParamsN2


@dataclass(frozen=True)
class DecayParams:
    """Decay rates of the prepared eigenstate and the one-photon states."""

    gamma_ges: float
    gamma_1p: float

    def __post_init__(self):
        if self.gamma_ges < 0 or self.gamma_1p <= 0:
            raise ValueError(
                f"rates must satisfy gamma_ges >= 0, gamma_1p > 0; got "
                f"({self.gamma_ges}, {self.gamma_1p})"
            )

    @property
    def eta(self) -> float:
        return self.gamma_ges / self.gamma_1p

    @staticmethod
    def from_params(p: ParamsN2, s: int) -> "DecayParams":
        phi = ges_mixing_angle_n2(p.delta1, p.g2p, s)
        return DecayParams(2.0 * math.sin(phi) ** 2 * p.kappa, p.kappa)


class DecayPopulations(NamedTuple):
    p_ges: np.ndarray
    p_1p_plus: np.ndarray
    p_1p_minus: np.ndarray
    p_g00: np.ndarray
    degenerate_limit: bool


# below this relative rate difference the generic formula loses more to
# cancellation than the eta -> 1 limit loses to curvature
_DEGENERACY_EPS = 1e-7


def decay_populations(dp: DecayParams, t) -> DecayPopulations:
    """Populations of the closed rate-equation cascade, P_ges(0) = 1.

    At eta = 1 (pole of the generic formula) the continuity limit
    ``Gamma t exp(-Gamma t) / 2`` per one-photon branch is used and flagged.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("decay times must be non-negative")
    gamma, kappa = dp.gamma_ges, dp.gamma_1p
    p_ges = np.exp(-gamma * t)
    degenerate = abs(gamma - kappa) <= _DEGENERACY_EPS * max(gamma, kappa)
    if degenerate:
        p_branch = 0.5 * gamma * t * np.exp(-gamma * t)
    else:
        p_branch = gamma * (np.exp(-kappa * t) - np.exp(-gamma * t)) / (2.0 * (gamma - kappa))
    p_g00 = 1.0 - p_ges - 2.0 * p_branch
    return DecayPopulations(p_ges, p_branch, p_branch.copy(), p_g00, degenerate)


def one_photon_peak(dp: DecayParams) -> tuple[float, float]:
    """Maximum of the total one-photon population and the time it occurs.

    Closed forms for 0 < eta < 1:

        t_peak = ln(1/eta) / (kappa (1 - eta)),
        value  = exp(ln(eta) / (1 - eta)).

    Returns (t_peak, value).
    """
    eta = dp.eta
    if not 0.0 < eta < 1.0:
        raise ValueError(f"one-photon peak formulas require 0 < eta < 1, got {eta}")
    t_peak = math.log(1.0 / eta) / (dp.gamma_1p * (1.0 - eta))
    value = math.exp(math.log(eta) / (1.0 - eta))
    return t_peak, value
