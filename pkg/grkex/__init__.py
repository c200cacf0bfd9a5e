"""
grkex - Diffie-Hellman style key exchange over matrices over Z_n[S_m]

Group ring arithmetic, matrix exponentiation, the key exchange itself and
the statistical and search tooling used to study it.

This module exposes the most used entry points of the package.
"""

__version__ = '0.1.0'
__author__ = 'grkex contributors'

# Import main components for easier access
from .algebra import GroupRingElement, MatrixGR, Permutation, RingContext, get_context
from .kex_protocol import KexParams, KexSession
from .main import main, run

# Export main function for the entry point script
__all__ = ['GroupRingElement', 'MatrixGR', 'Permutation', 'RingContext', 'get_context',
           'KexParams', 'KexSession', 'main', 'run']
