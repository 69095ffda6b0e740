"""
How much measurement dependence does the sphere model need?
===========================================================

For two of Alice's settings at angle beta, the variational distance between
the hidden-variable densities is a one-dimensional integral. Its maximum over
beta sits at orthogonal settings and equals 2 sqrt 2 - 2.
"""

import math

import numpy as np

from freewill import SingletOneSided, m_sphere_pair, m_supremum

for deg in (0, 15, 30, 45, 60, 75, 90, 120, 180):
    print(f"beta = {deg:3d} deg   M = {m_sphere_pair(math.radians(deg)):.10f}")

rep = m_supremum(SingletOneSided())
print()
print(f"sup M      = {rep.m:.12f}   (2 sqrt 2 - 2 = {2 * math.sqrt(2) - 2:.12f})")
print(f"at beta    = {np.degrees(rep.argmax_pair['beta']):.8f} deg")
print(f"F = 1-M/2  = {rep.f:.12f}")
print(f"dependence {rep.dependence_percent:.1f}% (100*M/2), independence {rep.independence_percent:.1f}% (100*F)")
