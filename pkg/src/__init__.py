"""
photon-dimer - few-photon scattering off a waveguide-coupled Bose-Hubbard dimer
"""

__version__ = "0.1.0"
