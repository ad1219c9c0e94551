"""Proving and disproving Rupert's property for convex polyhedra.

The exact verifier (``rupert.verifier``) depends only on the rational
kernels, the certificate format and the exact vertex data; the
floating-point builder proposes certificates for it to check.
"""

__version__ = "0.1.0"
