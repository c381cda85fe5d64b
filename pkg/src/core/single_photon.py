"""
Closed-form single-photon scattering off the cavity dimer
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.core.model import DimerParams

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ScatterCoefficients1:
    """Class representing single-photon amplitudes at one or many energies

    Attributes:
        energy: photon detuning E
        e1, e2: cavity amplitudes
        r: reflection coefficient into the left waveguide
        t: transmission coefficient into the right waveguide
    """

    energy: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    r: np.ndarray
    t: np.ndarray

    @property
    def flux(self):
        """|r|² + |t|², one for lossless cavities"""
        return np.abs(self.r) ** 2 + np.abs(self.t) ** 2


def _denominator(params: DimerParams, energy):
    j, v1sq, v2sq = params.j_hop, params.vsq1, params.vsq2
    return 4 * j ** 2 + (v1sq - 2j * (energy - params.omega1)) * (v2sq - 2j * (energy - params.omega2))


def reflection_transmission(params: DimerParams, energy) -> Tuple[np.ndarray, np.ndarray]:
    """Reflection and transmission coefficients r(E), t(E)"""
    energy = np.asarray(energy)
    j, v1sq, v2sq = params.j_hop, params.vsq1, params.vsq2
    den = _denominator(params, energy)
    r = (4 * j ** 2 - (v1sq + 2j * (energy - params.omega1))
         * (v2sq - 2j * (energy - params.omega2))) / den
    t = 4j * j * params.v1 * params.v2 / den
    return r, t


def scatter1(params: DimerParams, energy) -> ScatterCoefficients1:
    """Evaluate the single-photon eigenstate coefficients

    Args:
        params: validated dimer parameters
        energy: photon detuning, scalar or array

    Returns:
        ScatterCoefficients1 with entries shaped like energy
    """
    energy = np.asarray(energy)
    den = _denominator(params, energy)
    pref = math.sqrt(2.0 / math.pi) * params.v1
    e1 = pref * (-1j * params.vsq2 - 2 * energy + 2 * params.omega2) / den
    e2 = -2 * params.j_hop * pref / den
    r, t = reflection_transmission(params, energy)
    return ScatterCoefficients1(energy=energy, e1=e1, e2=e2, r=r, t=t)


def output_wavefunction1(params: DimerParams, energy, x) -> Tuple[np.ndarray, np.ndarray]:
    """Waveguide amplitudes (phi_L(x), phi_R(x)) of the single-photon eigenstate

    The coupling point x = 0 belongs to the outgoing side.
    """
    x = np.asarray(x, dtype=float)
    r, t = reflection_transmission(params, energy)
    wave = INV_SQRT_2PI * np.exp(1j * energy * x)
    outgoing = x >= 0
    phi_l = np.where(outgoing, r, 1.0) * wave
    phi_r = np.where(outgoing, t, 0.0) * wave
    return phi_l, phi_r
