"""Truncated-Fock-space simulator for photon-subtraction entanglement enhancement."""

__version__ = "0.1.0"
