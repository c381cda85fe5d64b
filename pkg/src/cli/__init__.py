"""
Command-line sweeps and figure recipes
"""
