"""
Tests for the wavepacket-smeared scattering observables
"""

import math
import unittest
import os

import numpy as np

# Add the src directory to the path so we can import our modules
import sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.errors import ContractError
from src.core.model import DimerParams, fully_resonant_dk, photon_momenta
from src.core.observables import (OutputState, bound_map, bound_weight, eigenstate_projection,
                                  excitation_amplitudes, g2_coherent, g2_transmitted,
                                  output_amplitude_momentum, scattering_probabilities,
                                  smeared_wavefunction_position, transmitted_field)
from src.core.quadrature import integrate_line
from src.core.single_photon import reflection_transmission
from src.core.two_photon import Channel
from src.core.wavepackets import CoherentInput, PulseProfile, PulseShape, TwoPhotonInput

SIGMA = 0.005
SLOW = os.environ.get("PHOTON_DIMER_SLOW_TESTS") == "1"


def pair_at(delta, dk, sigma=SIGMA, shape=PulseShape.GAUSSIAN):
    k1, k2 = photon_momenta(delta, dk)
    return TwoPhotonInput.from_momenta(k1, k2, sigma, shape)


class TestOutputAmplitude(unittest.TestCase):
    """Test cases for momentum-space output amplitudes"""

    def setUp(self):
        """Set up test fixtures"""
        self.linear = DimerParams.symmetric(vsq=0.04)
        self.kerr = DimerParams.symmetric(u=5.0, vsq=0.04)
        self.pair = pair_at(0.3, 0.02)

    def test_linear_dimer_transmits_independently(self):
        p1, p2 = self.pair.xi1.k0 + 0.001, self.pair.xi2.k0 - 0.002
        value = output_amplitude_momentum(self.linear, self.pair, "RR", p1, p2)
        _, t1 = reflection_transmission(self.linear, p1)
        _, t2 = reflection_transmission(self.linear, p2)
        xi1, xi2 = self.pair.xi1, self.pair.xi2
        product = xi1.amplitude(p1) * xi2.amplitude(p2) + xi1.amplitude(p2) * xi2.amplitude(p1)
        expected = t1 * t2 * product / math.sqrt(self.pair.m2)
        self.assertAlmostEqual(value, complex(expected), places=10)

    def test_transmitted_amplitude_is_symmetric(self):
        p1, p2 = 0.16, 0.13
        a = output_amplitude_momentum(self.kerr, self.pair, Channel.RR, p1, p2)
        b = output_amplitude_momentum(self.kerr, self.pair, Channel.RR, p2, p1)
        self.assertAlmostEqual(a, b, places=10)

    def test_amplitude_vanishes_off_the_input_energy(self):
        offset = 12 * SIGMA
        value = output_amplitude_momentum(self.kerr, self.pair, "LL",
                                          self.pair.xi1.k0 + offset, self.pair.xi2.k0 + offset)
        self.assertLess(abs(value), 1e-12)

    def test_smeared_handle(self):
        state = OutputState(self.kerr, self.pair)
        amplitude = state.smeared("LR")
        self.assertIs(amplitude.channel, Channel.LR)
        self.assertEqual(amplitude.grid_size, state.energies.size)
        p1, p2 = 0.16, 0.13
        self.assertAlmostEqual(amplitude.value(p1, p2),
                               output_amplitude_momentum(self.kerr, self.pair, "LR", p1, p2))


class TestScatteringProbabilities(unittest.TestCase):
    """Test cases for P_LL, P_LR and P_RR"""

    def single_photon_weights(self, params, profile):
        lo, hi = profile.support()

        def integrand(k):
            r, t = reflection_transmission(params, k)
            weight = abs(profile.amplitude(k)) ** 2
            return np.array([abs(r) ** 2 * weight, abs(t) ** 2 * weight])

        value = integrate_line(integrand, lo, hi, points=profile.breakpoints()).value
        return float(value[0].real), float(value[1].real)

    def test_distinguishable_photons_in_linear_dimer(self):
        """U = 0 and far-apart photons: probabilities factorize"""
        params = DimerParams.symmetric(vsq=0.04)
        pair = pair_at(0.0, 2.0)
        probs = scattering_probabilities(params, pair)
        r1, t1 = self.single_photon_weights(params, pair.xi1)
        r2, t2 = self.single_photon_weights(params, pair.xi2)
        self.assertAlmostEqual(probs.p_rr, t1 * t2, delta=1e-6)
        self.assertAlmostEqual(probs.p_ll, r1 * r2, delta=1e-6)
        self.assertAlmostEqual(probs.p_lr, r1 * t2 + t1 * r2, delta=1e-6)

    def test_probability_conservation_with_interaction(self):
        params = DimerParams.symmetric(u=1.0, vsq=0.04)
        probs = scattering_probabilities(params, pair_at(2.0, 0.0))
        self.assertAlmostEqual(probs.flux_total, 1.0, delta=1e-3)
        self.assertGreater(probs.p_rr, 0.0)

    def test_loss_removes_flux(self):
        params = DimerParams.symmetric(u=1.0, vsq=0.04, gamma_bath=0.04)
        probs = scattering_probabilities(params, pair_at(0.0, fully_resonant_dk(0.0)))
        self.assertLess(probs.flux_total, 0.999)

    @unittest.skipUnless(SLOW, "set PHOTON_DIMER_SLOW_TESTS=1 to run")
    def test_probability_conservation_grid(self):
        for u in (0.0, 1.0, 5.0):
            params = DimerParams.symmetric(u=u, vsq=0.04)
            root = math.sqrt(4 + u ** 2)
            for delta in (0.0, u - root, 2 * u, u + root):
                for dk in (0.0, fully_resonant_dk(delta)):
                    with self.subTest(u=u, delta=delta, dk=dk):
                        probs = scattering_probabilities(params, pair_at(delta, dk))
                        self.assertAlmostEqual(probs.flux_total, 1.0, delta=1e-3)

    @unittest.skipUnless(SLOW, "set PHOTON_DIMER_SLOW_TESTS=1 to run")
    def test_transmission_peak_drops_with_loss(self):
        peaks = []
        deltas = np.linspace(-2.2, 2.2, 45)
        for gamma in (0.0, 0.02, 0.04):
            params = DimerParams.symmetric(u=1.0, vsq=0.04, gamma_bath=gamma)
            values = [scattering_probabilities(params, pair_at(d, fully_resonant_dk(d))).p_rr
                      for d in deltas]
            peaks.append(max(values))
        self.assertGreater(peaks[0], peaks[1])
        self.assertGreater(peaks[1], peaks[2])


class TestCorrelations(unittest.TestCase):
    """Test cases for transmitted second-order correlations"""

    def test_linear_dimer_identical_photons(self):
        """U = 0 and dk = 0 give g² = 1/2"""
        params = DimerParams.symmetric(vsq=0.04)
        self.assertAlmostEqual(g2_transmitted(params, pair_at(0.4, 0.0)), 0.5, delta=5e-3)

    def test_linear_position_amplitude_factorizes(self):
        """U = 0: the smeared pair amplitude is a product of single-photon fields"""
        params = DimerParams.symmetric(vsq=0.04)
        pair = pair_at(0.0, 2.0)
        ratios = []
        for z in (0.0, 40.0):
            pair_value = smeared_wavefunction_position(params, pair, "RR", z, z)
            fields = (transmitted_field(params, pair.xi1, z) * transmitted_field(params, pair.xi2, z))
            ratios.append(pair_value / fields)
        self.assertAlmostEqual(abs(ratios[0] / ratios[1]), 1.0, delta=1e-6)
        self.assertEqual(smeared_wavefunction_position(params, pair, "RR", -1.0, 2.0), 0j)

    def test_coherent_input_on_linear_dimer(self):
        params = DimerParams.symmetric(vsq=0.04)
        nbar = 1e-3
        coherent = CoherentInput(PulseProfile(PulseShape.GAUSSIAN, 0.2, SIGMA), nbar)
        self.assertAlmostEqual(g2_coherent(params, coherent), math.exp(nbar), places=8)

    def test_coherent_input_must_be_weak(self):
        params = DimerParams.symmetric(vsq=0.04)
        coherent = CoherentInput(PulseProfile(PulseShape.GAUSSIAN, 0.0, SIGMA), 0.05)
        with self.assertRaises(ContractError):
            g2_coherent(params, coherent)

    def test_state_reuse(self):
        params = DimerParams.symmetric(u=1.0, vsq=0.04)
        pair = pair_at(2.0, 0.0)
        state = OutputState(params, pair)
        self.assertAlmostEqual(g2_transmitted(params, pair, state=state, flux="exact"),
                               g2_transmitted(params, pair, flux="exact"), places=10)

    def test_fock_pair_is_half_the_coherent_value(self):
        """Independent-photon flux: 2 g²(dk = 0) equals the weak coherent-pulse g²"""
        params = DimerParams.symmetric(u=1.0, vsq=0.04)
        fock = g2_transmitted(params, pair_at(2.0, 0.0))
        coherent = g2_coherent(params, CoherentInput(PulseProfile(PulseShape.GAUSSIAN, 1.0, SIGMA),
                                                     1e-3))
        self.assertLess(abs(2 * fock - coherent) / coherent, 0.01)
        self.assertAlmostEqual(fock, 0.5, delta=0.05)

    def test_flux_forms_agree_only_without_interaction(self):
        linear = DimerParams.symmetric(vsq=0.04)
        pair = pair_at(0.4, 0.0)
        self.assertAlmostEqual(g2_transmitted(linear, pair, flux="exact"),
                               g2_transmitted(linear, pair, flux="single"), places=6)
        kerr = DimerParams.symmetric(u=1.0, vsq=0.04)
        pair = pair_at(2.0, 0.0)
        self.assertGreater(g2_transmitted(kerr, pair, flux="exact"),
                           1.2 * g2_transmitted(kerr, pair, flux="single"))

    def test_unknown_flux_form(self):
        with self.assertRaises(ContractError):
            g2_transmitted(DimerParams.symmetric(vsq=0.04), pair_at(0.4, 0.0), flux="total")

    @unittest.skipUnless(SLOW, "set PHOTON_DIMER_SLOW_TESTS=1 to run")
    def test_linear_statistics_grid(self):
        params = DimerParams.symmetric(vsq=0.04)
        for delta in np.linspace(-4.0, 4.0, 25):
            with self.subTest(delta=delta):
                self.assertAlmostEqual(g2_transmitted(params, pair_at(delta, 0.0)), 0.5,
                                       delta=5e-3)

    @unittest.skipUnless(SLOW, "set PHOTON_DIMER_SLOW_TESTS=1 to run")
    def test_fock_and_coherent_differ_by_two(self):
        for u in (1.0, 5.0):
            params = DimerParams.symmetric(u=u, vsq=0.04)
            for delta in np.linspace(-4.0, 12.0, 41):
                with self.subTest(u=u, delta=delta):
                    fock = g2_transmitted(params, pair_at(delta, 0.0))
                    profile = PulseProfile(PulseShape.GAUSSIAN, 0.5 * delta, SIGMA)
                    coherent = g2_coherent(params, CoherentInput(profile, 1e-3))
                    self.assertLess(abs(2 * fock - coherent) / coherent, 0.05)

    @unittest.skipUnless(SLOW, "set PHOTON_DIMER_SLOW_TESTS=1 to run")
    def test_pulse_shape_insensitivity(self):
        params = DimerParams.symmetric(u=1.0, vsq=0.04)
        for delta in np.linspace(-4.0, 4.0, 25):
            for dk in (0.0, fully_resonant_dk(delta)):
                with self.subTest(delta=delta, dk=dk):
                    values = [g2_transmitted(params, pair_at(delta, dk, shape=shape))
                              for shape in PulseShape]
                    self.assertLess((max(values) - min(values)) / values[0], 0.02)

    @unittest.skipUnless(SLOW, "set PHOTON_DIMER_SLOW_TESTS=1 to run")
    def test_correlation_character(self):
        hits, total = 0, 0
        for u in np.linspace(2.0, 15.0, 14):
            params = DimerParams.symmetric(u=float(u), vsq=0.04)
            delta = 2 * float(u)
            resonant = g2_transmitted(params, pair_at(delta, fully_resonant_dk(delta)))
            bunched = g2_transmitted(params, pair_at(delta, 0.0))
            hits += (resonant < 1.0) + (bunched > 1.0)
            total += 2
        self.assertGreaterEqual(hits / total, 0.9)
        plateau = []
        for u in np.linspace(1.0, 8.0, 8):
            params = DimerParams.symmetric(u=float(u), vsq=0.04)
            delta = 2 * float(u)
            plateau.append(g2_transmitted(params, pair_at(delta, fully_resonant_dk(delta))))
        self.assertLess((max(plateau) - min(plateau)) / min(plateau), 0.15)


class TestBoundTerm(unittest.TestCase):
    """Test cases for the integrated bound-term weight and the cavity pair amplitudes"""

    def setUp(self):
        """Set up test fixtures"""
        self.params = DimerParams.symmetric(u=5.0, vsq=0.01)

    def test_linear_dimer_has_no_bound_weight(self):
        self.assertLess(bound_weight(DimerParams.symmetric(vsq=0.04), 0.5), 1e-20)

    def test_bound_weight_peaks_on_resonances(self):
        for delta in (0.0, 10.0):
            with self.subTest(delta=delta):
                peak = bound_weight(self.params, delta)
                self.assertGreater(peak, bound_weight(self.params, delta - 0.15))
                self.assertGreater(peak, bound_weight(self.params, delta + 0.15))

    def test_bound_map(self):
        axis = np.linspace(-4.0, 4.0, 9)
        values = bound_map(self.params, 10.0, axis, axis[:5])
        self.assertEqual(values.shape, (9, 5))
        self.assertTrue(np.all(values >= 0))
        linear = bound_map(DimerParams.symmetric(vsq=0.04), 0.0, axis, axis)
        self.assertLess(np.max(linear), 1e-20)

    def test_resonant_photons_excite_more(self):
        params = DimerParams.symmetric(u=5.0, vsq=0.04)
        delta = 10.0
        resonant = np.linalg.norm(excitation_amplitudes(params, delta, fully_resonant_dk(delta)))
        detuned = np.linalg.norm(excitation_amplitudes(params, delta, 0.0))
        self.assertGreater(resonant, detuned)

    @unittest.skipUnless(SLOW, "set PHOTON_DIMER_SLOW_TESTS=1 to run")
    def test_resonance_positions_and_widths(self):
        deltas = np.round(np.arange(-4.0, 12.0 + 1e-9, 0.05), 10)
        values = np.array([bound_weight(self.params, d) for d in deltas])
        peaks = deltas[1:-1][(values[1:-1] > values[:-2]) & (values[1:-1] > values[2:])]
        for target in (-2.0, -0.3852, 0.0, 2.0, 10.0, 10.3852):
            with self.subTest(target=target):
                self.assertLessEqual(np.min(np.abs(peaks - target)), 0.05 + 1e-9)
        broad = DimerParams.symmetric(u=5.0, vsq=0.25)
        narrow_ratio = bound_weight(self.params, 9.9) / bound_weight(self.params, 10.0)
        broad_ratio = bound_weight(broad, 9.9) / bound_weight(broad, 10.0)
        self.assertGreater(broad_ratio, narrow_ratio)

    def test_eigenstate_projection_selects_resonant_state(self):
        params = DimerParams.symmetric(u=5.0, vsq=0.04)
        weights = eigenstate_projection(params, 10.0, fully_resonant_dk(10.0))
        self.assertEqual(set(weights), {"minus", "zero", "plus"})
        self.assertGreater(weights["zero"], weights["minus"])
        self.assertGreater(weights["zero"], weights["plus"])


if __name__ == '__main__':
    unittest.main()
