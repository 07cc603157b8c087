"""
multiaccess: steady-state analysis of multi-channel multiple-access systems.

Exact product-form metrics, a brute-force oracle, a discrete-event
simulator and parameter sweeps for systems of non-persistent classes and
persistent users sharing m channels.
"""

__version__ = "0.1.0"
