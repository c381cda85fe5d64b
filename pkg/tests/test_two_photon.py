"""
Tests for the two-photon scattering eigenstate and S-matrix
"""

import math
import unittest
import os

import numpy as np

# Add the src directory to the path so we can import our modules
import sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.errors import ContractError, DegenerateParametersError, ParameterError
from src.core.model import DimerParams, validate
from src.core.single_photon import scatter1
from src.core.two_photon import (BOUND_NAMES, Channel, bound_state_data,
                                 cavity_photon_amplitude, pole_parameters, s_bound,
                                 smatrix_element, validate_channel, wavefunction2)

BELOW = -1e-300


class TestPoleParameters(unittest.TestCase):
    """Test cases for the one-photon effective Hamiltonian decomposition"""

    def test_eigen_decomposition(self):
        params = validate(DimerParams(omega2=0.3 + 0j, v1=0.3, v2=0.45, u1=1.0))
        energy = 0.4
        poles = pole_parameters(params, np.array([energy]))
        a1 = params.omega1 - energy - 0.5j * params.vsq1
        a2 = params.omega2 - energy - 0.5j * params.vsq2
        h = np.array([[a1, params.j_hop], [params.j_hop, a2]])
        for branch in ("minus", "plus"):
            lam, m = poles.branch(branch)
            vec = np.array([m[0], 1.0])
            np.testing.assert_allclose(h @ vec, lam[0] * vec, atol=1e-12)

    def test_tails_decay(self):
        poles = pole_parameters(DimerParams.symmetric(vsq=0.04), np.linspace(-5, 5, 11))
        self.assertTrue(np.all(poles.lambda_minus.imag < 0))
        self.assertTrue(np.all(poles.lambda_plus.imag < 0))

    def test_amplitude_identity(self):
        """A (M+ - M-) = sqrt(2) V1"""
        params = validate(DimerParams(omega2=-0.2 + 0j, v1=0.25, v2=0.15))
        poles = pole_parameters(params, np.array([0.0]))
        value = poles.a[0] * (poles.m_plus[0] - poles.m_minus[0])
        self.assertAlmostEqual(value, math.sqrt(2) * params.v1, places=12)

    def test_exceptional_point(self):
        """Hopping J = |V1² - V2²| / 4 makes the one-photon modes coalesce"""
        params = validate(DimerParams(v1=1.0, v2=0.5, j_hop=0.1875))
        with self.assertRaises(DegenerateParametersError):
            pole_parameters(params, np.array([0.0]))


class TestBoundStateData(unittest.TestCase):
    """Test cases for the interaction coefficients"""

    def setUp(self):
        """Set up test fixtures"""
        self.params = validate(DimerParams(omega2=0.3 + 0j, u1=1.3, u2=0.7, v1=0.3, v2=0.45))
        self.k1, self.k2 = 0.37, -0.81
        self.data = bound_state_data(self.params, self.k1, self.k2)

    def test_linear_dimer_has_no_bound_term(self):
        """U = 0: the bound coefficients vanish at random shell points"""
        params = DimerParams.symmetric(vsq=0.04)
        rng = np.random.default_rng(3)
        k1, k2, p1 = rng.uniform(-3.0, 3.0, (3, 1000))
        p2 = k1 + k2 - p1
        data = bound_state_data(params, k1, k2)
        for name in BOUND_NAMES:
            with self.subTest(coefficient=name):
                self.assertLess(np.max(np.abs(getattr(data, name))), 1e-12)
        s_ll, s_rr, s_lr = s_bound(params, k1, k2, p1, p2)
        for values in (s_ll, s_rr, s_lr):
            self.assertLess(np.max(np.abs(values)), 1e-12)

    def test_linear_cavity_pair_factorizes(self):
        """U = 0: e11 = sqrt(2) e1(k1) e1(k2)"""
        params = validate(DimerParams(omega2=0.3 + 0j, v1=0.3, v2=0.45))
        data = bound_state_data(params, self.k1, self.k2)
        e1a, e1b = scatter1(params, self.k1).e1, scatter1(params, self.k2).e1
        self.assertAlmostEqual(complex(data.e11), complex(math.sqrt(2) * e1a * e1b), places=12)

    def test_symmetric_in_input_momenta(self):
        swapped = bound_state_data(self.params, self.k2, self.k1)
        for name in ("e11", "e12", "e22", "b_ll_minus", "b_lr1_plus", "b_lr2_minus",
                     "b_rr_plus"):
            with self.subTest(name=name):
                self.assertAlmostEqual(complex(getattr(swapped, name)),
                                       complex(getattr(self.data, name)), places=12)

    def test_cavity_boundary_equations(self):
        """Pair amplitudes balance the cavity-photon values averaged across the origin"""
        d, p = self.data, self.params
        energy = self.k1 + self.k2
        root2 = math.sqrt(2)
        l1 = 0.5 * (d.f1 + d.phi_l1)
        l2 = 0.5 * (d.f2 + d.phi_l2)
        r1 = 0.5 * d.phi_r1
        r2 = 0.5 * d.phi_r2
        first = ((2 * p.omega1 + 2 * p.u1 - energy) * d.e11 + root2 * p.j_hop * d.e12
                 + root2 * p.v1 * l1)
        middle = ((p.omega1 + p.omega2 - energy) * d.e12 + root2 * p.j_hop * (d.e11 + d.e22)
                  + p.v1 * l2 + p.v2 * r1)
        last = ((2 * p.omega2 + 2 * p.u2 - energy) * d.e22 + root2 * p.j_hop * d.e12
                + root2 * p.v2 * r2)
        scale = max(abs(d.e11), abs(d.e12), abs(d.e22), abs(d.f1), abs(d.f2))
        for residual in (first, middle, last):
            self.assertLess(abs(residual), 1e-10 * scale)

    def test_cavity_photon_values_at_origin(self):
        d = self.data
        expected = {"L1": (d.f1, d.phi_l1), "L2": (d.f2, d.phi_l2),
                    "R1": (0.0, d.phi_r1), "R2": (0.0, d.phi_r2)}
        for site, (below, above) in expected.items():
            with self.subTest(site=site):
                lo = cavity_photon_amplitude(self.params, site, BELOW, self.k1, self.k2, d)
                hi = cavity_photon_amplitude(self.params, site, 0.0, self.k1, self.k2, d)
                self.assertAlmostEqual(complex(lo), complex(below), places=12)
                self.assertAlmostEqual(complex(hi), complex(above), places=10)


class TestWavefunction(unittest.TestCase):
    """Test cases for the real-space two-photon amplitudes"""

    def setUp(self):
        """Set up test fixtures"""
        self.params = validate(DimerParams(omega2=0.3 + 0j, u1=1.3, u2=0.7, v1=0.3, v2=0.45))
        self.k1, self.k2 = 0.37, -0.81
        self.data = bound_state_data(self.params, self.k1, self.k2)
        self.coords = (-1.7, -0.4, 0.6, 2.2)

    def phi(self, channel, z1, z2):
        return complex(wavefunction2(self.params, channel, z1, z2, self.k1, self.k2, self.data))

    def cavity(self, site, x):
        return complex(cavity_photon_amplitude(self.params, site, x, self.k1, self.k2,
                                               self.data))

    def test_jumps_across_coupling_points(self):
        v1, v2 = self.params.v1, self.params.v2
        root2 = math.sqrt(2)
        for x in self.coords:
            with self.subTest(x=x):
                jump = self.phi("LL", 0.0, x) - self.phi("LL", BELOW, x)
                self.assertAlmostEqual(jump, -1j * v1 / root2 * self.cavity("L1", x), places=10)
                jump = self.phi("LL", x, 0.0) - self.phi("LL", x, BELOW)
                self.assertAlmostEqual(jump, -1j * v1 / root2 * self.cavity("L1", x), places=10)
                jump = self.phi("LR", 0.0, x) - self.phi("LR", BELOW, x)
                self.assertAlmostEqual(jump, -1j * v1 * self.cavity("R1", x), places=10)
                jump = self.phi("LR", x, 0.0) - self.phi("LR", x, BELOW)
                self.assertAlmostEqual(jump, -1j * v2 * self.cavity("L2", x), places=10)
                jump = self.phi("RR", 0.0, x) - self.phi("RR", BELOW, x)
                self.assertAlmostEqual(jump, -1j * v2 / root2 * self.cavity("R2", x), places=10)

    def average(self, channel, z1, z2):
        """Value on a coupling line, the mean of both sides"""
        if z1 == 0.0:
            return 0.5 * (self.phi(channel, 0.0, z2) + self.phi(channel, BELOW, z2))
        return 0.5 * (self.phi(channel, z1, 0.0) + self.phi(channel, z1, BELOW))

    def derivative(self, site, x, h=1e-5):
        return (self.cavity(site, x + h) - self.cavity(site, x - h)) / (2 * h)

    def test_cavity_photon_equations_of_motion(self):
        p = self.params
        energy = self.k1 + self.k2
        root2 = math.sqrt(2)
        for x in self.coords:
            with self.subTest(x=x):
                l1, l2 = self.cavity("L1", x), self.cavity("L2", x)
                r1, r2 = self.cavity("R1", x), self.cavity("R2", x)
                eq_l1 = (-1j * self.derivative("L1", x) + (p.omega1 - energy) * l1
                         + p.j_hop * l2
                         + p.v1 / root2 * (self.average("LL", x, 0.0)
                                           + self.average("LL", 0.0, x)))
                eq_l2 = (-1j * self.derivative("L2", x) + (p.omega2 - energy) * l2
                         + p.j_hop * l1 + p.v2 * self.average("LR", x, 0.0))
                eq_r2 = (-1j * self.derivative("R2", x) + (p.omega2 - energy) * r2
                         + p.j_hop * r1
                         + p.v2 / root2 * (self.average("RR", x, 0.0)
                                           + self.average("RR", 0.0, x)))
                scale = max(abs(l1), abs(l2), abs(r1), abs(r2), 1e-3)
                for residual in (eq_l1, eq_l2, eq_r2):
                    self.assertLess(abs(residual), 1e-6 * scale)

    def test_no_photons_before_scattering_in_right_guide(self):
        self.assertEqual(self.phi("RR", -0.5, 1.0), 0j)
        self.assertEqual(self.phi("LR", 0.3, -0.2), 0j)
        self.assertEqual(self.cavity("R1", -0.1), 0j)

    def test_transmitted_pair_is_symmetric(self):
        self.assertAlmostEqual(self.phi("RR", 0.4, 1.9), self.phi("RR", 1.9, 0.4), places=14)


class TestSMatrix(unittest.TestCase):
    """Test cases for S-matrix elements"""

    def setUp(self):
        """Set up test fixtures"""
        self.params = DimerParams.symmetric(u=5.0, vsq=0.04)

    def test_off_shell_arguments_rejected(self):
        with self.assertRaises(ContractError):
            s_bound(self.params, 0.1, 0.2, 0.1, 0.3)
        with self.assertRaises(ContractError):
            smatrix_element(self.params, "RR", 0.1, 0.2, 0.0, 0.4)

    def test_bound_term_symmetric_in_outputs(self):
        _, s_rr, _ = s_bound(self.params, 0.4, -1.0, 0.9, -1.5)
        _, s_swap, _ = s_bound(self.params, 0.4, -1.0, -1.5, 0.9)
        self.assertAlmostEqual(complex(s_rr), complex(s_swap), places=14)
        self.assertGreater(abs(s_rr), 0.0)

    def test_element_direct_coefficients(self):
        element = smatrix_element(self.params, Channel.LR, 0.4, -1.0, 0.9, -1.5)
        data = bound_state_data(self.params, 0.4, -1.0)
        self.assertAlmostEqual(element.direct[0], complex(data.r_k1 * data.t_k2))
        self.assertAlmostEqual(element.direct[1], complex(data.r_k2 * data.t_k1))
        _, _, s_lr = s_bound(self.params, 0.4, -1.0, 0.9, -1.5)
        self.assertAlmostEqual(element.bound_value, complex(s_lr), places=14)
        with self.assertRaises(ContractError):
            element.bound(0.0, 0.0)

    def test_validate_channel(self):
        self.assertIs(validate_channel("rr"), Channel.RR)
        with self.assertRaises(ParameterError):
            validate_channel("RL")


if __name__ == '__main__':
    unittest.main()
