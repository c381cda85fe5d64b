"""
Two-photon scattering eigenstates of the cavity dimer

All functions broadcast over numpy arrays of input momenta, so a whole
quadrature grid of (k1, k2) pairs is evaluated in one call.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Tuple

import numpy as np

from src.core.errors import ContractError, DegenerateParametersError, ParameterError
from src.core.model import DimerParams
from src.core.single_photon import reflection_transmission

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
NORM = 1.0 / (2.0 * math.pi)
SHELL_TOLERANCE = 1e-9
CONDITION_WARNING = 1e12


class Channel(str, Enum):
    """Output waveguide pair of the two photons"""

    LL = "LL"
    LR = "LR"
    RR = "RR"


class CavitySite(str, Enum):
    """Waveguide of the free photon and cavity of the bound one"""

    L1 = "L1"
    L2 = "L2"
    R1 = "R1"
    R2 = "R2"


@dataclass(frozen=True)
class PoleParameters:
    """Eigen-decomposition of the one-photon effective Hamiltonian at total energy E

    lambda_minus/plus are the eigenvalues of [[a1, J], [J, a2]] with
    a_j = omega_j - E - i V_j²/2, and (m_minus/plus, 1) the eigenvectors.
    """

    a: np.ndarray
    m_minus: np.ndarray
    m_plus: np.ndarray
    lambda_minus: np.ndarray
    lambda_plus: np.ndarray

    def branch(self, name: str) -> Tuple[np.ndarray, np.ndarray]:
        if name == "minus":
            return self.lambda_minus, self.m_minus
        return self.lambda_plus, self.m_plus


@dataclass(frozen=True)
class BoundStateData:
    """Class representing the interaction coefficients of a two-photon eigenstate

    Every attribute is an array broadcast from the input momenta k1, k2.
    f1, f2 are the photon-in-cavity amplitudes at 0- and the phi_* values
    at 0+; eta is the determinant of the cavity boundary system.
    """

    k1: np.ndarray
    k2: np.ndarray
    total_energy: np.ndarray
    poles: PoleParameters
    chi_l1k1: np.ndarray
    chi_l1k2: np.ndarray
    chi_l2k1: np.ndarray
    chi_l2k2: np.ndarray
    r_k1: np.ndarray
    r_k2: np.ndarray
    t_k1: np.ndarray
    t_k2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    e11: np.ndarray
    e12: np.ndarray
    e22: np.ndarray
    eta: np.ndarray
    condition: np.ndarray
    phi_l1: np.ndarray
    phi_l2: np.ndarray
    phi_r1: np.ndarray
    phi_r2: np.ndarray
    cl_minus: np.ndarray
    cl_plus: np.ndarray
    cr_minus: np.ndarray
    cr_plus: np.ndarray
    b_ll_minus: np.ndarray
    b_ll_plus: np.ndarray
    b_lr1_minus: np.ndarray
    b_lr1_plus: np.ndarray
    b_lr2_minus: np.ndarray
    b_lr2_plus: np.ndarray
    b_rr_minus: np.ndarray
    b_rr_plus: np.ndarray

    @property
    def chi(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.chi_l1k1, self.chi_l1k2, self.chi_l2k1, self.chi_l2k2

    def bound_coefficients(self) -> Dict[str, np.ndarray]:
        """The eight bound-tail coefficients keyed by name"""
        return {name: getattr(self, name) for name in BOUND_NAMES}

    def cavity_amplitudes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(e11, e12, e22), amplitudes of |20>, |11>, |02>"""
        return self.e11, self.e12, self.e22


BOUND_NAMES = (
    "b_ll_minus", "b_ll_plus", "b_lr1_minus", "b_lr1_plus",
    "b_lr2_minus", "b_lr2_plus", "b_rr_minus", "b_rr_plus",
)

# (coefficient, pole branch, which outgoing momentum sits in the pole)
CHANNEL_TERMS = {
    Channel.LL: (("b_ll_minus", "minus", "both"), ("b_ll_plus", "plus", "both")),
    Channel.RR: (("b_rr_minus", "minus", "both"), ("b_rr_plus", "plus", "both")),
    Channel.LR: (("b_lr1_minus", "minus", "p2"), ("b_lr1_plus", "plus", "p2"),
                 ("b_lr2_minus", "minus", "p1"), ("b_lr2_plus", "plus", "p1")),
}


def pole_parameters(params: DimerParams, energy) -> PoleParameters:
    """Structure constants A, M and poles lambda for total energy E

    Raises:
        DegenerateParametersError: at an exceptional point of the dimer, or
            if a bound tail would not decay
    """
    energy = np.asarray(energy)
    j, v1, v1sq, v2sq = params.j_hop, params.v1, params.vsq1, params.vsq2
    w1, w2 = params.omega1, params.omega2
    root = np.sqrt(complex(16 * j ** 2 - (v1sq - v2sq + 2j * (w1 - w2)) ** 2))
    if abs(root) < 1e-14:
        raise DegenerateParametersError("exceptional point: the one-photon modes coalesce",
                                        field="j_hop")
    base = -1j * v1sq - 1j * v2sq - 4 * energy + 2 * (w1 + w2)
    lambda_minus = (base - root) / 4
    lambda_plus = (base + root) / 4
    if np.any(lambda_minus.imag >= 0) or np.any(lambda_plus.imag >= 0):
        raise DegenerateParametersError("bound tails do not decay for these parameters",
                                        field="v1")
    skew = -1j * v1sq + 1j * v2sq + 2 * (w1 - w2)
    a = np.full(energy.shape, 2 * SQRT2 * v1 * j / root)
    return PoleParameters(
        a=a,
        m_minus=np.full(energy.shape, (skew - root) / (4 * j)),
        m_plus=np.full(energy.shape, (skew + root) / (4 * j)),
        lambda_minus=lambda_minus,
        lambda_plus=lambda_plus,
    )


def bound_state_data(params: DimerParams, k1, k2) -> BoundStateData:
    """Assemble every coefficient of the two-photon eigenstate |k1, k2>

    Args:
        params: validated dimer parameters
        k1, k2: incoming photon detunings, broadcastable arrays

    Raises:
        DegenerateParametersError: if the boundary system is singular
    """
    k1, k2 = np.broadcast_arrays(np.asarray(k1, dtype=float), np.asarray(k2, dtype=float))
    energy = k1 + k2
    poles = pole_parameters(params, energy)
    a, mm, mp = poles.a, poles.m_minus, poles.m_plus
    lm, lp = poles.lambda_minus, poles.lambda_plus

    chi_l1k1 = a * (mm / (k2 + lm) - mp / (k2 + lp))
    chi_l1k2 = a * (mm / (k1 + lm) - mp / (k1 + lp))
    chi_l2k1 = a * (1 / (k2 + lm) - 1 / (k2 + lp))
    chi_l2k2 = a * (1 / (k1 + lm) - 1 / (k1 + lp))
    f1 = NORM / SQRT2 * (chi_l1k2 + chi_l1k1)
    f2 = NORM / SQRT2 * (chi_l2k2 + chi_l2k1)

    j, v1, v2 = params.j_hop, params.v1, params.v2
    w1, w2 = params.omega1, params.omega2
    d1 = 2 * w1 + 2 * params.u1 - energy - 1j * params.vsq1
    d0 = w1 + w2 - energy - 0.5j * (params.vsq1 + params.vsq2)
    d2 = 2 * w2 + 2 * params.u2 - energy - 1j * params.vsq2
    triple = d0 * d1 * d2
    eta = -2 * (triple - 2 * j ** 2 * (d1 + d2))
    if np.any(eta == 0) or not np.all(np.isfinite(eta)):
        raise DegenerateParametersError("parameter degeneracy: eta vanishes", field="eta")
    terms = np.maximum(np.abs(triple), 2 * j ** 2 * np.maximum(np.abs(d1), np.abs(d2)))
    condition = 2 * terms / np.abs(eta)
    if np.any(condition > CONDITION_WARNING):
        logger.warning("eta near cancellation, condition estimate %.3g", np.max(condition))

    source = 2 * j * f1 - d1 * f2
    e12 = -2 * v1 * d2 * source / eta
    e22 = 2 * SQRT2 * j * v1 * source / eta
    e11 = 2 * SQRT2 * v1 * (f1 * (d0 * d2 - 2 * j ** 2) - j * d2 * f2) / eta

    phi_l1 = f1 - 1j * SQRT2 * v1 * e11
    phi_l2 = f2 - 1j * v1 * e12
    phi_r1 = -1j * v2 * e12
    phi_r2 = -1j * SQRT2 * v2 * e22

    r1, t1 = reflection_transmission(params, k1)
    r2, t2 = reflection_transmission(params, k2)
    scale = 2 * math.pi / v1
    cl_minus = a * (scale * (mp * phi_l2 - phi_l1) - r1 / (k1 + lm) - r2 / (k2 + lm))
    cl_plus = -a * (scale * (mm * phi_l2 - phi_l1) - r1 / (k1 + lp) - r2 / (k2 + lp))
    cr_minus = a * (scale * (mp * phi_r2 - phi_r1) - t1 / (k1 + lm) - t2 / (k2 + lm))
    cr_plus = -a * (scale * (mm * phi_r2 - phi_r1) - t1 / (k1 + lp) - t2 / (k2 + lp))

    s1 = -1j * v1 / SQRT2
    s2 = -1j * v2 / SQRT2
    return BoundStateData(
        k1=k1, k2=k2, total_energy=energy, poles=poles,
        chi_l1k1=chi_l1k1, chi_l1k2=chi_l1k2, chi_l2k1=chi_l2k1, chi_l2k2=chi_l2k2,
        r_k1=r1, r_k2=r2, t_k1=t1, t_k2=t2, f1=f1, f2=f2,
        e11=e11, e12=e12, e22=e22, eta=eta, condition=condition,
        phi_l1=phi_l1, phi_l2=phi_l2, phi_r1=phi_r1, phi_r2=phi_r2,
        cl_minus=cl_minus, cl_plus=cl_plus, cr_minus=cr_minus, cr_plus=cr_plus,
        b_ll_minus=s1 * mm * cl_minus, b_ll_plus=s1 * mp * cl_plus,
        b_lr1_minus=s1 * mm * cr_minus, b_lr1_plus=s1 * mp * cr_plus,
        b_lr2_minus=s2 * cl_minus, b_lr2_plus=s2 * cl_plus,
        b_rr_minus=s2 * cr_minus, b_rr_plus=s2 * cr_plus,
    )


def shell_kernel(lam, p1, p2, which: str):
    """Momentum dependence of one bound term on the energy shell"""
    if which == "p2":
        return -1j / (lam + p2)
    if which == "p1":
        return -1j / (lam + p1)
    return -1j / (lam + p2) - 1j / (lam + p1)


def bound_amplitude(data: BoundStateData, channel: Channel, p1, p2):
    """Smooth prefactor of the energy delta in the S-matrix of one channel"""
    total = 0j
    for name, branch, which in CHANNEL_TERMS[Channel(channel)]:
        lam, _ = data.poles.branch(branch)
        total = total + getattr(data, name) * shell_kernel(lam, p1, p2, which)
    return NORM * total


def _check_shell(k1, k2, p1, p2) -> None:
    mismatch = np.abs(np.asarray(p1) + np.asarray(p2) - np.asarray(k1) - np.asarray(k2))
    scale = np.maximum(1.0, np.abs(np.asarray(k1) + np.asarray(k2)))
    if np.any(mismatch > SHELL_TOLERANCE * scale):
        raise ContractError(f"off-shell arguments: |p1+p2-k1-k2| = {np.max(mismatch):.3g}")


def s_bound(params: DimerParams, k1, k2, p1, p2):
    """Bound parts (S_LL, S_RR, S_LR) of the two-photon S-matrix

    Raises:
        ContractError: if p1 + p2 differs from k1 + k2
    """
    _check_shell(k1, k2, p1, p2)
    data = bound_state_data(params, k1, k2)
    return (bound_amplitude(data, Channel.LL, p1, p2),
            bound_amplitude(data, Channel.RR, p1, p2),
            bound_amplitude(data, Channel.LR, p1, p2))


def direct_coefficients(channel: Channel, r1, t1, r2, t2):
    """Coefficients of delta(k1-p1)delta(k2-p2) and delta(k1-p2)delta(k2-p1)"""
    channel = Channel(channel)
    if channel is Channel.LL:
        return r1 * r2, r1 * r2
    if channel is Channel.RR:
        return t1 * t2, t1 * t2
    return r1 * t2, r2 * t1


@dataclass(frozen=True)
class SMatrixElement:
    """Class representing <p1 p2|S|k1 k2> in one channel

    The element is a sum of two delta pairings with coefficients `direct`
    and the energy-shell term `bound(p1, p2)`; deltas are never sampled.
    """

    channel: Channel
    k1: float
    k2: float
    direct: Tuple[complex, complex]
    bound: Callable[[float, float], complex] = field(repr=False)
    bound_value: complex = 0j


def smatrix_element(params: DimerParams, channel, k1: float, k2: float,
                    p1: float, p2: float) -> SMatrixElement:
    """Distributional S-matrix element of one channel at the given momenta"""
    channel = Channel(channel)
    _check_shell(k1, k2, p1, p2)
    data = bound_state_data(params, k1, k2)
    direct = tuple(complex(c) for c in direct_coefficients(
        channel, data.r_k1, data.t_k1, data.r_k2, data.t_k2))

    def bound(q1, q2):
        _check_shell(k1, k2, q1, q2)
        return complex(bound_amplitude(data, channel, q1, q2))

    return SMatrixElement(channel=channel, k1=k1, k2=k2, direct=direct,
                          bound=bound, bound_value=bound(p1, p2))


def _bound_tail(data: BoundStateData, names: Tuple[str, str], start, separation):
    """Sum over branches of B * exp(iE*start) * exp(-i*lambda*separation)"""
    total = 0j
    for name, lam in zip(names, (data.poles.lambda_minus, data.poles.lambda_plus)):
        total = total + getattr(data, name) * np.exp(-1j * lam * separation)
    return np.exp(1j * data.total_energy * start) * total


def wavefunction2(params: DimerParams, channel, z1, z2, k1, k2, data: BoundStateData = None):
    """Real-space two-photon amplitude of the scattering eigenstate

    For LR the first coordinate is in the left waveguide and the second in
    the right one. A coordinate equal to zero counts as outgoing.

    Args:
        data: precomputed bound_state_data(params, k1, k2), optional
    """
    channel = Channel(channel)
    if data is None:
        data = bound_state_data(params, k1, k2)
    k1, k2 = data.k1, data.k2
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    lo, hi = np.minimum(z1, z2), np.maximum(z1, z2)
    plane = np.exp(1j * (k1 * z1 + k2 * z2)) + np.exp(1j * (k2 * z1 + k1 * z2))
    sym = NORM / SQRT2

    if channel is Channel.LL:
        incoming = sym * plane
        mixed = sym * (data.r_k2 * np.exp(1j * (k1 * lo + k2 * hi))
                       + data.r_k1 * np.exp(1j * (k2 * lo + k1 * hi)))
        outgoing = sym * (data.r_k1 * data.r_k2 * plane
                          + _bound_tail(data, ("b_ll_minus", "b_ll_plus"), lo, hi - lo))
        return np.where(hi < 0, incoming, np.where(lo < 0, mixed, outgoing))

    if channel is Channel.RR:
        outgoing = sym * (data.t_k1 * data.t_k2 * plane
                          + _bound_tail(data, ("b_rr_minus", "b_rr_plus"), lo, hi - lo))
        return np.where(lo < 0, 0j, outgoing)

    x, y = z1, z2
    mixed = NORM * (data.t_k2 * np.exp(1j * (k1 * x + k2 * y))
                    + data.t_k1 * np.exp(1j * (k2 * x + k1 * y)))
    tail = np.where(x <= y,
                    _bound_tail(data, ("b_lr1_minus", "b_lr1_plus"), x, np.maximum(y - x, 0.0)),
                    _bound_tail(data, ("b_lr2_minus", "b_lr2_plus"), y, np.maximum(x - y, 0.0)))
    outgoing = NORM * (data.t_k1 * data.r_k2 * np.exp(1j * (k2 * x + k1 * y))
                       + data.t_k2 * data.r_k1 * np.exp(1j * (k1 * x + k2 * y)) + tail)
    return np.where(y < 0, 0j, np.where(x < 0, mixed, outgoing))


def cavity_photon_amplitude(params: DimerParams, site, x, k1, k2,
                            data: BoundStateData = None):
    """Amplitude for one photon at x in a waveguide and the other in a cavity

    site is one of L1, L2, R1, R2: the waveguide of the free photon followed
    by the cavity holding the other one.
    """
    site = CavitySite(site)
    if data is None:
        data = bound_state_data(params, k1, k2)
    x = np.asarray(x, dtype=float)
    k1, k2 = data.k1, data.k2
    lm, lp = data.poles.lambda_minus, data.poles.lambda_plus
    mm, mp = data.poles.m_minus, data.poles.m_plus
    if site in (CavitySite.L1, CavitySite.R1):
        chi_a, chi_b = data.chi_l1k2, data.chi_l1k1
        weight_minus, weight_plus = mm, mp
    else:
        chi_a, chi_b = data.chi_l2k2, data.chi_l2k1
        weight_minus, weight_plus = 1.0, 1.0
    if site in (CavitySite.L1, CavitySite.L2):
        out1, out2, c_minus, c_plus = data.r_k1, data.r_k2, data.cl_minus, data.cl_plus
    else:
        out1, out2, c_minus, c_plus = data.t_k1, data.t_k2, data.cr_minus, data.cr_plus

    sym = NORM / SQRT2
    x_out = np.maximum(x, 0.0)
    outgoing = sym * (out1 * chi_a * np.exp(1j * k1 * x) + out2 * chi_b * np.exp(1j * k2 * x)
                      + weight_minus * c_minus * np.exp(-1j * lm * x_out)
                      + weight_plus * c_plus * np.exp(-1j * lp * x_out))
    if site in (CavitySite.R1, CavitySite.R2):
        incoming = 0j
    else:
        incoming = sym * (chi_a * np.exp(1j * k1 * x) + chi_b * np.exp(1j * k2 * x))
    return np.where(x < 0, incoming, outgoing)


def validate_channel(channel) -> Channel:
    try:
        return Channel(str(channel).upper())
    except ValueError:
        raise ParameterError(f"unknown channel '{channel}'", field="channel") from None
