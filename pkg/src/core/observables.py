"""
Wavepacket-smeared observables of two-photon scattering

The energy delta of the S-matrix is absorbed analytically: the output state
lives on a grid of total energies E and, for each E, the bound part is the
shell integral beta(E) = int dq xi1(q) xi2(E-q) B(q, E-q).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Sequence, Tuple

import numpy as np

from src.core.errors import ContractError, NoSignalError
from src.core.model import (DimerParams, photon_momenta, single_excitation_energies,
                            two_excitation_eigensystem)
from src.core.quadrature import (QuadratureResult, check_result, clean_breaks,
                                 gauss_legendre_panels, integrate_line, integrate_vector)
from src.core.single_photon import INV_SQRT_2PI, reflection_transmission
from src.core.two_photon import (BOUND_NAMES, CHANNEL_TERMS, NORM, Channel, bound_state_data,
                                 direct_coefficients, pole_parameters, s_bound, shell_kernel,
                                 wavefunction2)
from src.core.wavepackets import (NODES_PER_PANEL, CoherentInput, PulseProfile, PulseShape,
                                  TwoPhotonInput)

logger = logging.getLogger(__name__)

SIGNAL_FLOOR = 1e-30
MAX_COHERENT_NBAR = 0.01
RESONANCE_OFFSETS = np.array([0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0])
BATCH_SIZE = 40000


@dataclass(frozen=True)
class ChannelProbabilities:
    """Class representing the two-photon output probabilities per channel"""

    p_ll: float
    p_lr: float
    p_rr: float
    error: float = 0.0

    @property
    def flux_total(self) -> float:
        return self.p_ll + self.p_lr + self.p_rr


@dataclass(frozen=True)
class SmearedAmplitude:
    """Class representing an output amplitude integrated against the input profiles"""

    channel: Channel
    value: Callable[[float, float], complex]
    grid_size: int
    error: float


def linewidth(params: DimerParams) -> float:
    """Narrowest single-photon resonance half-width"""
    return 0.5 * min(params.vsq1, params.vsq2)


def _graded(centers: Iterable[float], width: float) -> np.ndarray:
    offsets = width * RESONANCE_OFFSETS
    return np.concatenate([np.concatenate([c + offsets, c - offsets]) for c in centers])


def single_resonance_points(params: DimerParams) -> np.ndarray:
    """Breakpoints graded around the one-photon resonances"""
    return _graded(single_excitation_energies(params), linewidth(params))


def _is_gaussian(*profiles: PulseProfile) -> bool:
    return all(p.shape is PulseShape.GAUSSIAN for p in profiles)


def _profile_pair_offsets(xi1: PulseProfile, xi2: PulseProfile) -> np.ndarray:
    """Offsets, in units of sigma1 + sigma2, for the total-energy grid"""
    heavy = xi1 if not _is_gaussian(xi1) else xi2
    return heavy.offsets()


def energy_breaks(params: DimerParams, two_photon: TwoPhotonInput) -> np.ndarray:
    """Panel boundaries for the total-energy grid of the output state"""
    xi1, xi2 = two_photon.xi1, two_photon.xi2
    lo = xi1.support()[0] + xi2.support()[0]
    hi = xi1.support()[1] + xi2.support()[1]
    center = two_photon.total_energy
    sigma_e = xi1.sigma + xi2.sigma
    width = linewidth(params)
    eps = single_excitation_energies(params)
    eig = two_excitation_eigensystem(params)
    pts = [center + sigma_e * _profile_pair_offsets(xi1, xi2),
           _graded([xi1.k0 + e for e in eps] + [xi2.k0 + e for e in eps], width),
           _graded(eig.energies2(), 2 * width)]
    spacing = min(sigma_e, width)
    if (hi - lo) / spacing <= 4000:
        pts.append(np.arange(lo, hi, spacing))
    return clean_breaks(np.concatenate(pts), lo, hi)


def shell_coefficients(params: DimerParams, two_photon: TwoPhotonInput, energies,
                       density: int = 1) -> QuadratureResult:
    """Shell integrals beta(E) of the eight bound coefficients

    Returns:
        QuadratureResult whose value has shape (8, len(energies)), rows in
        BOUND_NAMES order; the error compares against a half-order rule
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    xi1, xi2 = two_photon.xi1, two_photon.xi2
    lo1, hi1 = xi1.support()
    lo2, hi2 = xi2.support()
    res = single_resonance_points(params)
    b1, b2 = xi1.breakpoints(), xi2.breakpoints()
    order = NODES_PER_PANEL * density

    grids = {order: ([], [], []), max(order // 2, 2): ([], [], [])}
    intervals = 0
    for n, energy in enumerate(energies):
        lo, hi = max(lo1, energy - hi2), min(hi1, energy - lo2)
        if hi <= lo:
            continue
        breaks = clean_breaks(np.concatenate([b1, energy - b2, res, energy - res]), lo, hi)
        intervals += breaks.size - 1
        for rule, (qs, ws, idx) in grids.items():
            q, w = gauss_legendre_panels(breaks, rule)
            qs.append(q)
            ws.append(w)
            idx.append(np.full(q.size, n))

    def accumulate(qs, ws, idx) -> np.ndarray:
        total = np.zeros((len(BOUND_NAMES), energies.size), dtype=complex)
        if not qs:
            return total
        q, w, index = np.concatenate(qs), np.concatenate(ws), np.concatenate(idx)
        for start in range(0, q.size, BATCH_SIZE):
            part = slice(start, start + BATCH_SIZE)
            k1 = q[part]
            k2 = energies[index[part]] - k1
            data = bound_state_data(params, k1, k2)
            weight = w[part] * xi1.amplitude(k1) * xi2.amplitude(k2)
            for row, name in enumerate(BOUND_NAMES):
                vals = weight * getattr(data, name)
                total[row] += (np.bincount(index[part], vals.real, minlength=energies.size)
                               + 1j * np.bincount(index[part], vals.imag, minlength=energies.size))
        return total

    fine_rule, coarse_rule = sorted(grids, reverse=True)
    fine = accumulate(*grids[fine_rule])
    coarse = accumulate(*grids[coarse_rule])
    neval = sum(sum(q.size for q in grids[r][0]) for r in grids)
    result = QuadratureResult(value=fine, error=float(np.max(np.abs(fine - coarse), initial=0.0)),
                              neval=neval, intervals=intervals)
    return check_result(result, "shell integral")


def _output_amplitudes(params: DimerParams, two_photon: TwoPhotonInput, p1, p2,
                       beta: np.ndarray, poles) -> Dict[Channel, np.ndarray]:
    """a_ch(p1, p2) without the 1/sqrt(M2) normalization"""
    xi1, xi2 = two_photon.xi1, two_photon.xi2
    pair = xi1.amplitude(p1) * xi2.amplitude(p2) + xi1.amplitude(p2) * xi2.amplitude(p1)
    r1, t1 = reflection_transmission(params, p1)
    r2, t2 = reflection_transmission(params, p2)
    rows = {name: beta[i] for i, name in enumerate(BOUND_NAMES)}
    amplitudes = {}
    for channel in Channel:
        direct, _ = direct_coefficients(channel, r1, t1, r2, t2)
        bound = 0j
        for name, branch, which in CHANNEL_TERMS[channel]:
            lam, _ = poles.branch(branch)
            bound = bound + rows[name] * shell_kernel(lam, p1, p2, which)
        amplitudes[channel] = direct * pair + NORM * bound
    return amplitudes


class OutputState:
    """Momentum-space two-photon output state on a total-energy grid

    Integrals over output momenta are done as int dE int dp1 with p2 = E - p1,
    E on Gauss-Legendre panels and p1 by adaptive quadrature.
    """

    def __init__(self, params: DimerParams, two_photon: TwoPhotonInput, density: int = 1):
        self.params = params
        self.input = two_photon
        self.density = density
        breaks = energy_breaks(params, two_photon)
        self.energies, self.weights = gauss_legendre_panels(breaks, NODES_PER_PANEL * density)
        shell = shell_coefficients(params, two_photon, self.energies, density)
        self.beta = shell.value
        self.beta_error = shell.error
        self.poles = pole_parameters(params, self.energies)
        logger.debug("output state: %d energies, %d shell evaluations",
                     self.energies.size, shell.neval)

    def channel_amplitudes(self, p1: float) -> Dict[Channel, np.ndarray]:
        """a_ch(p1, E_n - p1) for every energy node, without 1/sqrt(M2)"""
        return _output_amplitudes(self.params, self.input, p1, self.energies - p1,
                                  self.beta, self.poles)

    def smeared(self, channel) -> SmearedAmplitude:
        """Normalized momentum amplitude as a function handle"""
        channel = Channel(channel)

        def value(p1: float, p2: float) -> complex:
            return output_amplitude_momentum(self.params, self.input, channel, p1, p2,
                                             density=self.density)

        return SmearedAmplitude(channel=channel, value=value, grid_size=self.energies.size,
                                error=self.beta_error)

    def line_window(self) -> Tuple[float, float, np.ndarray]:
        """Window and breakpoints for integrals over p1"""
        xi1, xi2 = self.input.xi1, self.input.xi2
        sigma_e = xi1.sigma + xi2.sigma
        offsets = _profile_pair_offsets(xi1, xi2)
        center = self.input.total_energy
        res = single_resonance_points(self.params)
        pts = np.concatenate([xi1.k0 + sigma_e * offsets, xi2.k0 + sigma_e * offsets,
                              res, center - res])
        lo, hi = float(pts.min()) - 1.0, float(pts.max()) + 1.0
        return lo, hi, clean_breaks(pts, lo, hi)

    def probabilities(self) -> ChannelProbabilities:
        n = self.energies.size
        order = (Channel.LL, Channel.LR, Channel.RR)

        def integrand(p1):
            amps = self.channel_amplitudes(p1)
            return np.concatenate([np.abs(amps[c]) ** 2 for c in order])

        lo, hi, points = self.line_window()
        result = integrate_line(integrand, lo, hi, points=points, epsrel=1e-8,
                                label="scattering probabilities")
        totals = np.real(result.value).reshape(3, n) @ self.weights
        m2 = self.input.m2
        error = result.error * float(np.sum(self.weights)) / m2
        return ChannelProbabilities(p_ll=float(totals[0] / (2 * m2)), p_lr=float(totals[1] / m2),
                                    p_rr=float(totals[2] / (2 * m2)), error=error)

    def transmitted_intensity(self, zs: Sequence[float]) -> np.ndarray:
        """int dx (|Phi_LR(x, z)|² + 2|Phi_RR(x, z)|²) for each z, without 1/M2

        Evaluated in momentum space by Parseval over the whole output line.
        """
        zs = np.atleast_1d(np.asarray(zs, dtype=float))
        phase = np.exp(1j * np.outer(zs, self.energies)) * self.weights

        def integrand(p1):
            amps = self.channel_amplitudes(p1)
            shift = np.exp(-1j * zs * p1)[:, None]
            h_lr = INV_SQRT_2PI * (shift * phase * amps[Channel.LR]).sum(axis=1)
            h_rr = INV_SQRT_2PI * (shift * phase * amps[Channel.RR]).sum(axis=1)
            return np.abs(h_lr) ** 2 + np.abs(h_rr) ** 2

        lo, hi, points = self.line_window()
        result = integrate_line(integrand, lo, hi, points=points, epsrel=1e-8,
                                label="transmitted intensity")
        return np.real(result.value)


def output_amplitude_momentum(params: DimerParams, two_photon: TwoPhotonInput, channel,
                              p1: float, p2: float, density: int = 1) -> complex:
    """Normalized output amplitude <p1, p2|out> in one channel"""
    channel = Channel(channel)
    energy = p1 + p2
    beta = shell_coefficients(params, two_photon, [energy], density).value
    poles = pole_parameters(params, np.array([energy]))
    amps = _output_amplitudes(params, two_photon, p1, np.array([p2]), beta, poles)
    return complex(amps[channel][0]) / math.sqrt(two_photon.m2)


def scattering_probabilities(params: DimerParams, two_photon: TwoPhotonInput,
                             density: int = 1) -> ChannelProbabilities:
    """P_LL, P_LR, P_RR of the scattered two-photon wavepacket"""
    return OutputState(params, two_photon, density).probabilities()


def _product_sum(params: DimerParams, two_photon: TwoPhotonInput, channel: Channel,
                 z1: float, z2: float, order: int) -> Tuple[complex, int]:
    xi1, xi2 = two_photon.xi1, two_photon.xi2
    res = single_resonance_points(params)
    q1, w1 = gauss_legendre_panels(xi1.breakpoints(res), order)
    q2, w2 = gauss_legendre_panels(xi2.breakpoints(res), order)
    a1 = w1 * xi1.amplitude(q1)
    a2 = w2 * xi2.amplitude(q2)
    rows = max(1, BATCH_SIZE // max(q2.size, 1))
    total = 0j
    for start in range(0, q1.size, rows):
        k1, k2 = np.broadcast_arrays(q1[start:start + rows, None], q2[None, :])
        psi = wavefunction2(params, channel, z1, z2, k1, k2)
        total += np.sum(a1[start:start + rows, None] * a2[None, :] * psi)
    return total, q1.size * q2.size


def smeared_wavefunction_position(params: DimerParams, two_photon: TwoPhotonInput, channel,
                                  z1: float, z2: float, density: int = 1) -> complex:
    """int dk1 dk2 xi1(k1) xi2(k2) phi_ch(z1, z2; k1, k2) on a product grid"""
    channel = Channel(channel)
    order = NODES_PER_PANEL * density
    fine, size = _product_sum(params, two_photon, channel, z1, z2, order)
    coarse, coarse_size = _product_sum(params, two_photon, channel, z1, z2, max(order // 2, 2))
    check_result(QuadratureResult(value=fine, error=abs(fine - coarse), neval=size + coarse_size),
                 f"{channel.value} position smearing", atol=1e-12)
    return complex(fine)


FLUX_FORMS = ("single", "exact")


def independent_flux(params: DimerParams, two_photon: TwoPhotonInput, zs: Sequence[float],
                     density: int = 1) -> np.ndarray:
    """Transmitted intensity of the pair scattered as two independent photons, without 1/M2"""
    linear = OutputState(params.replace(u1=0.0, u2=0.0), two_photon, density)
    return linear.transmitted_intensity(zs)


def g2_transmitted(params: DimerParams, two_photon: TwoPhotonInput, z1: float = 0.0,
                   z2: float = 0.0, density: int = 1, state: OutputState = None,
                   flux: str = "single") -> float:
    """Second-order correlation of the transmitted photons

    With flux="single" the intensities in the denominator are those of the
    photons scattered independently, so 2 g² of a Δk = 0 pair equals the
    weak coherent-pulse g². flux="exact" uses the intensity of the scattered
    two-photon state itself; `state` is reused for it when given.

    Raises:
        ContractError: for an unknown flux form
        NoSignalError: if the transmitted intensity vanishes
    """
    if flux not in FLUX_FORMS:
        raise ContractError(f"unknown flux form '{flux}', expected one of {FLUX_FORMS}")
    phi = smeared_wavefunction_position(params, two_photon, Channel.RR, z1, z2, density)
    if flux == "exact":
        if state is None:
            state = OutputState(params, two_photon, density)
        d1, d2 = state.transmitted_intensity([z1, z2])
    else:
        d1, d2 = independent_flux(params, two_photon, [z1, z2], density)
    denominator = d1 * d2 / two_photon.m2
    if not denominator > SIGNAL_FLOOR:
        raise NoSignalError("no transmitted flux")
    return float(2 * abs(phi) ** 2 / denominator)


def transmitted_field(params: DimerParams, profile: PulseProfile, z: float,
                      density: int = 1) -> complex:
    """Single-photon transmitted amplitude (1/sqrt(2pi)) int xi(k) t(k) exp(ikz) dk"""
    q, w = gauss_legendre_panels(profile.breakpoints(single_resonance_points(params)),
                                 NODES_PER_PANEL * density)
    _, t = reflection_transmission(params, q)
    return complex(INV_SQRT_2PI * np.sum(w * profile.amplitude(q) * t * np.exp(1j * q * z)))


def g2_coherent(params: DimerParams, coherent: CoherentInput, z1: float = 0.0,
                z2: float = 0.0, density: int = 1) -> float:
    """Transmitted g² for a weak coherent pulse, to lowest order in nbar

    Raises:
        ContractError: if nbar is not small
        NoSignalError: if nothing is transmitted
    """
    if coherent.nbar > MAX_COHERENT_NBAR:
        raise ContractError(f"nbar = {coherent.nbar} is outside the weak-field regime "
                            f"(<= {MAX_COHERENT_NBAR})")
    pair = TwoPhotonInput(coherent.profile, coherent.profile)
    phi_rr = smeared_wavefunction_position(params, pair, Channel.RR, z1, z2, density)
    phi_r1 = transmitted_field(params, coherent.profile, z1, density)
    phi_r2 = transmitted_field(params, coherent.profile, z2, density)
    denominator = math.exp(-coherent.nbar) * abs(phi_r1) ** 2 * abs(phi_r2) ** 2
    if not denominator > SIGNAL_FLOOR:
        raise NoSignalError("no transmitted flux")
    return float(0.5 * abs(phi_rr) ** 2 / denominator)


def bound_weight(params: DimerParams, delta: float, box: float = 8.0,
                 epsrel: float = 1e-7) -> float:
    """Integrated bound-term weight int dDk dDp |S_RR|² at total energy delta"""
    eps = single_excitation_energies(params)
    poles = pole_parameters(params, np.array([delta]))
    lam = (poles.lambda_minus[0], poles.lambda_plus[0])

    def coefficients(dk):
        k1, k2 = photon_momenta(delta, dk)
        data = bound_state_data(params, k1, k2)
        bm, bp = complex(data.b_rr_minus), complex(data.b_rr_plus)
        return np.array([abs(bm) ** 2, abs(bp) ** 2, bm * np.conj(bp)])

    def kernels(dp):
        p1, p2 = photon_momenta(delta, dp)
        gm = shell_kernel(lam[0], p1, p2, "both")
        gp = shell_kernel(lam[1], p1, p2, "both")
        return np.array([abs(gm) ** 2, abs(gp) ** 2, gm * np.conj(gp)])

    width = linewidth(params)
    dk_points = _graded([s * (2 * e - delta) for e in eps for s in (1, -1)], width)
    dp_points = _graded([s * (2 * l.real + delta) for l in lam for s in (1, -1)], width)
    h = integrate_vector(coefficients, -box, box, points=dk_points, epsrel=epsrel,
                         label="bound weight (dk)").value
    g = integrate_vector(kernels, -box, box, points=dp_points, epsrel=epsrel,
                         label="bound weight (dp)").value
    total = h[0] * g[0] + h[1] * g[1] + 2 * np.real(h[2] * g[2])
    return float(np.real(total)) / (4 * math.pi ** 2)


def bound_map(params: DimerParams, delta: float, dk_values, dp_values) -> np.ndarray:
    """|S_RR(dk, dp)|² on a grid, rows over dk and columns over dp"""
    dk, dp = np.meshgrid(np.asarray(dk_values, float), np.asarray(dp_values, float),
                         indexing="ij")
    k1, k2 = photon_momenta(delta, dk)
    p1, p2 = photon_momenta(delta, dp)
    _, s_rr, _ = s_bound(params, k1, k2, p1, p2)
    return np.abs(s_rr) ** 2


def excitation_amplitudes(params: DimerParams, delta: float, dk: float) -> Tuple[float, float, float]:
    """|e11|, |e12|, |e22| of the two-photon eigenstate at (delta, dk)"""
    k1, k2 = photon_momenta(delta, dk)
    data = bound_state_data(params, k1, k2)
    return float(abs(data.e11)), float(abs(data.e12)), float(abs(data.e22))


def eigenstate_projection(params: DimerParams, delta: float, dk: float) -> Dict[str, float]:
    """Weights |<2_s|e>|² of the cavity pair amplitudes on each two-excitation state"""
    k1, k2 = photon_momenta(delta, dk)
    data = bound_state_data(params, k1, k2)
    amps = np.array([complex(a) for a in data.cavity_amplitudes()])
    eig = two_excitation_eigensystem(params)
    return {name: float(abs(np.dot(eig.state(name)[1], amps)) ** 2)
            for name in ("minus", "zero", "plus")}
