"""
Core physics of photon-dimer
"""
