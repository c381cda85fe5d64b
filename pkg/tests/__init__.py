"""
Unit tests for photon-dimer
"""