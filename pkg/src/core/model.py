"""
Physical parameters and eigensystem of the waveguide-coupled cavity dimer

Energies are measured in units of the hopping J and in the rotating frame
of the first cavity, so the stored frequencies are detunings.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.core.errors import ParameterError

logger = logging.getLogger(__name__)

RESONANCE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DimerParams:
    """Class representing the cavity dimer coupled to two waveguides

    Attributes:
        omega1, omega2: complex cavity frequencies, imaginary part is loss
        u1, u2: Kerr nonlinearities
        j_hop: inter-cavity hopping
        v1, v2: waveguide-cavity couplings (left waveguide on cavity 1,
            right waveguide on cavity 2)
        gamma_bath: intrinsic loss rate folded into the frequencies
    """

    omega1: complex = 0j
    omega2: complex = 0j
    u1: float = 0.0
    u2: float = 0.0
    j_hop: float = 1.0
    v1: float = 0.2
    v2: float = 0.2
    gamma_bath: float = 0.0

    @classmethod
    def symmetric(cls, u: float = 0.0, vsq: float = 0.04, j_hop: float = 1.0,
                  omega: float = 0.0, gamma_bath: float = 0.0) -> "DimerParams":
        """Identical cavities, couplings given as V²"""
        if vsq <= 0:
            raise ParameterError("vsq must be positive", field="vsq")
        params = cls(omega1=complex(omega), omega2=complex(omega), u1=u, u2=u,
                     j_hop=j_hop, v1=math.sqrt(vsq), v2=math.sqrt(vsq))
        params = validate(params)
        if gamma_bath:
            params = apply_bath_loss(params, gamma_bath)
        return params

    @property
    def vsq1(self) -> float:
        return self.v1 ** 2

    @property
    def vsq2(self) -> float:
        return self.v2 ** 2

    def replace(self, **changes) -> "DimerParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        """Flat representation used by the config files"""
        data = {
            "omega1": self.omega1.real, "omega2": self.omega2.real,
            "u1": self.u1, "u2": self.u2, "j": self.j_hop,
            "v1": self.v1, "v2": self.v2, "gamma_bath": self.gamma_bath,
        }
        return data


@dataclass(frozen=True)
class EigenSystem2Site:
    """Class representing the one- and two-excitation spectrum of the dimer

    Two-excitation vectors are expressed over the basis (|20>, |11>, |02>).
    """

    eps1_minus: float
    eps1_plus: float
    eps2_minus: float
    eps2_zero: float
    eps2_plus: float
    vec2_minus: np.ndarray
    vec2_zero: np.ndarray
    vec2_plus: np.ndarray

    def energies2(self) -> Tuple[float, float, float]:
        return self.eps2_minus, self.eps2_zero, self.eps2_plus

    def state(self, name: str) -> Tuple[float, np.ndarray]:
        """Energy and vector of the two-excitation state 'minus', 'zero' or 'plus'"""
        try:
            return getattr(self, f"eps2_{name}"), getattr(self, f"vec2_{name}")
        except AttributeError:
            raise ParameterError(f"unknown two-excitation state '{name}'", field="state") from None

    def mott_overlap(self) -> float:
        """Weight of |11> in the lowest two-excitation state"""
        return float(abs(self.vec2_minus[1]) ** 2)


def validate(params: DimerParams) -> DimerParams:
    """Check physical constraints and move to the rotating frame of cavity 1

    Returns:
        Parameters with the real part of omega1 subtracted from both cavities

    Raises:
        ParameterError: naming the offending field
    """
    for name in ("u1", "u2", "j_hop", "v1", "v2", "gamma_bath"):
        value = getattr(params, name)
        if not np.isfinite(value):
            raise ParameterError(f"{name} must be finite", field=name)
    for name in ("omega1", "omega2"):
        if not np.isfinite(complex(getattr(params, name))):
            raise ParameterError(f"{name} must be finite", field=name)
    if params.j_hop <= 0:
        raise ParameterError("j_hop must be positive", field="j_hop")
    if params.v1 <= 0:
        raise ParameterError("v1 must be positive", field="v1")
    if params.v2 <= 0:
        raise ParameterError("v2 must be positive", field="v2")
    if params.gamma_bath < 0:
        raise ParameterError("gamma_bath must be non-negative", field="gamma_bath")
    for name in ("omega1", "omega2"):
        if complex(getattr(params, name)).imag > 0:
            raise ParameterError(f"{name} must not have a gain (positive imaginary) part",
                                 field=name)

    omega0 = complex(params.omega1).real
    return params.replace(omega1=complex(params.omega1) - omega0,
                          omega2=complex(params.omega2) - omega0,
                          u1=float(params.u1), u2=float(params.u2),
                          j_hop=float(params.j_hop), v1=float(params.v1),
                          v2=float(params.v2), gamma_bath=float(params.gamma_bath))


def apply_bath_loss(params: DimerParams, gamma_bath: float) -> DimerParams:
    """Fold an intrinsic cavity loss into the frequencies, omega -> omega - i*gamma/2

    Re-applying replaces the previous bath rate instead of adding to it.

    Raises:
        ParameterError: if gamma_bath is negative
    """
    if gamma_bath < 0:
        raise ParameterError("gamma_bath must be non-negative", field="gamma_bath")
    shift = 0.5j * (gamma_bath - params.gamma_bath)
    if shift == 0:
        return params
    return params.replace(omega1=params.omega1 - shift, omega2=params.omega2 - shift,
                          gamma_bath=float(gamma_bath))


def single_excitation_energies(params: DimerParams) -> Tuple[float, float]:
    """Eigenenergies (minus, plus) of the one-photon block"""
    h1 = np.array([[params.omega1.real, params.j_hop],
                   [params.j_hop, params.omega2.real]])
    minus, plus = np.linalg.eigvalsh(h1)
    return float(minus), float(plus)


def two_excitation_block(params: DimerParams) -> np.ndarray:
    """Hamiltonian restricted to (|20>, |11>, |02>)"""
    w1, w2 = params.omega1.real, params.omega2.real
    c = math.sqrt(2.0) * params.j_hop
    return np.array([
        [2 * w1 + 2 * params.u1, c, 0.0],
        [c, w1 + w2, c],
        [0.0, c, 2 * w2 + 2 * params.u2],
    ])


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    pivot = np.argmax(np.abs(vec))
    return vec if vec[pivot] >= 0 else -vec


def two_excitation_eigensystem(params: DimerParams) -> EigenSystem2Site:
    """Diagonalize the one- and two-excitation blocks"""
    eps1_minus, eps1_plus = single_excitation_energies(params)
    values, vectors = np.linalg.eigh(two_excitation_block(params))
    vecs = [_fix_sign(vectors[:, i]) for i in range(3)]
    return EigenSystem2Site(
        eps1_minus=eps1_minus, eps1_plus=eps1_plus,
        eps2_minus=float(values[0]), eps2_zero=float(values[1]), eps2_plus=float(values[2]),
        vec2_minus=vecs[0], vec2_zero=vecs[1], vec2_plus=vecs[2],
    )


def resonant_delta_list(params: DimerParams) -> List[float]:
    """Total two-photon energies at which the dimer is resonantly excited

    These are one photon on each single-excitation level, both photons on
    the same level, and the two-excitation eigenenergies.
    """
    eig = two_excitation_eigensystem(validate(params))
    candidates = sorted([
        eig.eps1_minus + eig.eps1_plus,
        2 * eig.eps1_minus,
        2 * eig.eps1_plus,
        *eig.energies2(),
    ])
    deltas: List[float] = []
    for value in candidates:
        if not deltas or value - deltas[-1] > RESONANCE_TOLERANCE:
            deltas.append(value)
    return deltas


def fully_resonant_dk(delta: float, params: Optional[DimerParams] = None) -> float:
    """Photon momentum difference that pins one photon on the lower level

    With the other photon at delta - eps1_minus the pair climbs the ladder
    through a real one-photon state. Without params the symmetric value
    eps1_minus = -J = -1 is used.
    """
    eps1_minus = -1.0 if params is None else single_excitation_energies(params)[0]
    return delta - 2 * eps1_minus


def photon_momenta(delta, dk):
    """Single-photon detunings (k1, k2) for total energy delta and splitting dk"""
    return 0.5 * (delta + dk), 0.5 * (delta - dk)
