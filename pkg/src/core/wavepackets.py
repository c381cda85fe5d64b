"""
Input photon wavepackets: spectral profiles, two-photon normalization,
initial-state correlations and weak coherent pulses
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Tuple

import numpy as np

from src.core.errors import ParameterError
from src.core.quadrature import gauss_legendre_panels, integrate_line

logger = logging.getLogger(__name__)

GAUSSIAN_HALF_WIDTH = 8.0
HEAVY_HALF_WIDTH = 400.0
# graded offsets, in units of sigma, for the slowly decaying profiles
HEAVY_OFFSETS = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 400.0)
NODES_PER_PANEL = 8


class PulseShape(str, Enum):
    """Spectral shape of a single-photon wavepacket"""

    GAUSSIAN = "gaussian"
    LORENTZIAN = "lorentzian"
    RISING = "rising"


@dataclass(frozen=True)
class PulseProfile:
    """Class representing a normalized single-photon spectral amplitude xi(k)"""

    shape: PulseShape
    k0: float
    sigma: float

    def __post_init__(self):
        try:
            object.__setattr__(self, "shape", PulseShape(self.shape))
        except ValueError:
            raise ParameterError(f"unknown pulse shape '{self.shape}'", field="shape") from None
        if not self.sigma > 0:
            raise ParameterError("sigma must be positive", field="sigma")
        if not np.isfinite(self.k0):
            raise ParameterError("k0 must be finite", field="k0")

    def amplitude(self, k):
        return momentum_amplitude(self, k)

    @property
    def half_width(self) -> float:
        """Truncation half-width of the momentum support"""
        scale = GAUSSIAN_HALF_WIDTH if self.shape is PulseShape.GAUSSIAN else HEAVY_HALF_WIDTH
        return scale * self.sigma

    def support(self) -> Tuple[float, float]:
        return self.k0 - self.half_width, self.k0 + self.half_width

    def offsets(self) -> np.ndarray:
        """Panel boundaries relative to k0, in units of sigma"""
        if self.shape is PulseShape.GAUSSIAN:
            return np.linspace(-GAUSSIAN_HALF_WIDTH, GAUSSIAN_HALF_WIDTH, 17)
        heavy = np.asarray(HEAVY_OFFSETS)
        return np.concatenate([-heavy[::-1], heavy[1:]])

    def breakpoints(self, extra: Iterable[float] = ()) -> np.ndarray:
        """Sorted panel boundaries inside the support, extra points clipped to it"""
        lo, hi = self.support()
        pts = list(self.k0 + self.sigma * self.offsets())
        pts.extend(p for p in extra if lo < p < hi)
        return np.unique(np.asarray(pts))

    def nodes(self, density: int = 1, extra: Iterable[float] = ()) -> Tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes and weights covering the support"""
        return gauss_legendre_panels(self.breakpoints(extra), NODES_PER_PANEL * density)


def momentum_amplitude(profile: PulseProfile, k):
    """Closed-form spectral amplitude xi(k)"""
    k = np.asarray(k, dtype=float)
    s, dk = profile.sigma, k - profile.k0
    if profile.shape is PulseShape.GAUSSIAN:
        return np.exp(-dk ** 2 / (4 * s ** 2)) / (2 * math.pi * s ** 2) ** 0.25
    if profile.shape is PulseShape.LORENTZIAN:
        return math.sqrt(2 / math.pi) * s ** 1.5 / (dk ** 2 + s ** 2)
    return math.sqrt(2 / math.pi) * math.sqrt(s) / (2j * dk + s)


def temporal_envelope(profile: PulseProfile, t):
    """Time-domain envelope Xi(t), related by xi(k) = (1/sqrt(2pi)) int Xi(t) exp(ikt) dt"""
    t = np.asarray(t, dtype=float)
    s = profile.sigma
    carrier = np.exp(-1j * profile.k0 * t)
    if profile.shape is PulseShape.GAUSSIAN:
        return math.sqrt(s) * (2 / math.pi) ** 0.25 * np.exp(-(s * t) ** 2) * carrier
    if profile.shape is PulseShape.LORENTZIAN:
        return math.sqrt(s) * np.exp(-s * np.abs(t)) * carrier
    step = np.where(t < 0, 1.0, np.where(t == 0, 0.5, 0.0))
    return math.sqrt(s) * np.exp(0.5 * s * np.minimum(t, 0.0)) * step * carrier


def position_amplitude(profile: PulseProfile, x):
    """Real-space amplitude (1/sqrt(2pi)) int xi(k) exp(ikx) dk of the incoming photon"""
    return temporal_envelope(profile, -np.asarray(x, dtype=float))


def profile_norm(profile: PulseProfile) -> float:
    """Numerical integral of |xi(k)|² over the whole line"""
    lo, hi = profile.support()
    result = integrate_line(lambda k: abs(momentum_amplitude(profile, k)) ** 2, lo, hi,
                            points=profile.breakpoints(), epsrel=1e-12,
                            label=f"{profile.shape.value} norm")
    return float(np.real(result.value))


def overlap(xi1: PulseProfile, xi2: PulseProfile) -> complex:
    """Spectral overlap int conj(xi1(k)) xi2(k) dk"""
    lo = min(xi1.support()[0], xi2.support()[0])
    hi = max(xi1.support()[1], xi2.support()[1])
    points = np.union1d(xi1.breakpoints(), xi2.breakpoints())
    result = integrate_line(
        lambda k: np.conj(momentum_amplitude(xi1, k)) * momentum_amplitude(xi2, k),
        lo, hi, points=points, epsrel=1e-11, label="spectral overlap")
    return complex(result.value)


@dataclass(frozen=True)
class TwoPhotonInput:
    """Class representing the product two-photon state of profiles xi1, xi2

    m2 = 1 + |<xi1|xi2>|² normalizes the symmetrized amplitude.
    """

    xi1: PulseProfile
    xi2: PulseProfile
    overlap: complex = field(init=False)
    m2: float = field(init=False)

    def __post_init__(self):
        ov = overlap(self.xi1, self.xi2)
        object.__setattr__(self, "overlap", ov)
        object.__setattr__(self, "m2", float(min(max(1.0 + abs(ov) ** 2, 1.0), 2.0)))

    @classmethod
    def from_momenta(cls, k1: float, k2: float, sigma: float,
                     shape: PulseShape = PulseShape.GAUSSIAN) -> "TwoPhotonInput":
        return cls(PulseProfile(shape, k1, sigma), PulseProfile(shape, k2, sigma))

    @property
    def total_energy(self) -> float:
        return self.xi1.k0 + self.xi2.k0


def overlap_m2(two_photon: TwoPhotonInput) -> float:
    """Normalization M2 of the two-photon input, between 1 and 2"""
    return two_photon.m2


def initial_g2(two_photon: TwoPhotonInput, x1: float, x2: float) -> float:
    """Second-order correlation of the incoming two-photon state at positions x1, x2"""
    g1a = position_amplitude(two_photon.xi1, x1)
    g1b = position_amplitude(two_photon.xi1, x2)
    g2a = position_amplitude(two_photon.xi2, x1)
    g2b = position_amplitude(two_photon.xi2, x2)

    def intensity(u, v):
        return abs(u) ** 2 + abs(v) ** 2 + 2 * np.real(u * np.conj(v) * two_photon.overlap)

    numerator = abs(g1a * g2b + g1b * g2a) ** 2
    denominator = intensity(g1a, g2a) * intensity(g1b, g2b) / two_photon.m2
    return float(numerator / denominator)


@dataclass(frozen=True)
class CoherentInput:
    """Class representing a weak coherent pulse alpha(k) = sqrt(nbar) xi(k)"""

    profile: PulseProfile
    nbar: float

    def __post_init__(self):
        if not self.nbar > 0:
            raise ParameterError("nbar must be positive", field="nbar")

    def amplitude(self, k):
        return math.sqrt(self.nbar) * momentum_amplitude(self.profile, k)

    def mean_photon_number(self) -> float:
        return self.nbar * profile_norm(self.profile)
