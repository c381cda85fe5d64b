"""
Tests for single-photon scattering
"""

import math
import unittest
import os

import numpy as np

# Add the src directory to the path so we can import our modules
import sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.model import DimerParams
from src.core.single_photon import output_wavefunction1, reflection_transmission, scatter1


class TestSinglePhoton(unittest.TestCase):
    """Test cases for the single-photon eigenstate"""

    def setUp(self):
        """Set up test fixtures"""
        self.params = DimerParams.symmetric(vsq=0.04)
        self.energies = np.linspace(-10.0, 10.0, 2001)

    def test_unitarity_lossless(self):
        s = scatter1(self.params, self.energies)
        np.testing.assert_allclose(s.flux, 1.0, atol=1e-12)

    def test_loss_reduces_flux(self):
        lossy = DimerParams.symmetric(vsq=0.04, gamma_bath=0.04)
        near = np.linspace(-1.2, 1.2, 241)
        self.assertTrue(np.all(scatter1(lossy, near).flux < 1.0))

    def test_transmission_on_normal_modes(self):
        """|t(±J)|² = 16 / (V⁴ + 16) for identical cavities"""
        for vsq in (0.01, 0.04, 0.25, 1.0):
            params = DimerParams.symmetric(vsq=vsq)
            for energy in (-1.0, 1.0):
                _, t = reflection_transmission(params, energy)
                self.assertAlmostEqual(abs(t) ** 2, 16 / (vsq ** 2 + 16), places=12)

    def test_full_transmission(self):
        """r vanishes at E = ±sqrt(J² - V⁴/4)"""
        energy = math.sqrt(1 - 0.04 ** 2 / 4)
        for sign in (-1, 1):
            r, t = reflection_transmission(self.params, sign * energy)
            self.assertLess(abs(r), 1e-12)
            self.assertAlmostEqual(abs(t), 1.0, places=12)

    def test_far_detuned_photon_is_reflected(self):
        r, t = reflection_transmission(self.params, 1e4)
        self.assertLess(abs(t), 1e-6)
        self.assertAlmostEqual(abs(r), 1.0, places=6)

    def test_cavity_amplitudes_satisfy_input_output(self):
        """t = -i sqrt(2pi) V2 e2 and r = 1 - i sqrt(2pi) V1 e1"""
        s = scatter1(self.params, self.energies)
        root = math.sqrt(2 * math.pi)
        np.testing.assert_allclose(s.t, -1j * root * self.params.v2 * s.e2, atol=1e-12)
        np.testing.assert_allclose(s.r, 1 - 1j * root * self.params.v1 * s.e1, atol=1e-12)

    def test_output_wavefunction_sides(self):
        r, t = reflection_transmission(self.params, 0.3)
        phi_l, phi_r = output_wavefunction1(self.params, 0.3, [-1.0, 0.0, 1.0])
        scale = 1 / math.sqrt(2 * math.pi)
        self.assertAlmostEqual(phi_r[0], 0.0)
        self.assertAlmostEqual(abs(phi_l[0]), scale)
        self.assertAlmostEqual(phi_l[1], r * scale)
        self.assertAlmostEqual(phi_r[2], t * scale * np.exp(0.3j))


if __name__ == '__main__':
    unittest.main()
