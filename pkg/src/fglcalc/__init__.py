"""Exact-arithmetic calculus for formal group laws.

Core subpackages: exact coefficient rings (exactalg), truncated power series
(series), formal group laws and Lazard lattices (fgl), homology structure
constants (pontryagin), and the homomorphism solver with its obstruction
checks (homsolver).  The service module exposes everything over HTTP and the
CLI is a thin client for it.
"""

__version__ = "0.1.0"
