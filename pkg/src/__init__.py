"""
Bounded-Degree Vertex Deletion kernelization package.

This package provides d-bounded decompositions, the BDD kernelization
loop and a small exact solver for checking kernels.
"""

__version__ = '1.0.0'
