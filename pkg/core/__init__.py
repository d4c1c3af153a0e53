"""
Core package of the curved anisotropic oscillator toolkit.
"""
