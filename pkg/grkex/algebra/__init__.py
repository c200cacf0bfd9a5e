"""
Algebra core for grkex: the symmetric group S_m, the group ring Z_n[S_m]
and k×k matrices over it.
"""

from .symmetric_group import Permutation, MultTable
from .group_ring import RingContext, GroupRingElement, get_context
from .matrix_semigroup import MatrixGR

__all__ = ['Permutation', 'MultTable', 'RingContext', 'GroupRingElement',
           'get_context', 'MatrixGR']
