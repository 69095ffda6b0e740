"""
Certifying B <= 2 + M is tight with a linear program
====================================================

Over the 16 deterministic strategies, find the pair of distributions (one per
Alice setting) with the smallest variational distance that reaches a target
CHSH value. The optimum is exactly B - 2. Fixing all four singlet correlators
at the Tsirelson point also costs exactly 2 sqrt 2 - 2, the value the sphere
model achieves.
"""

import math

from freewill import min_m_for_chsh, min_m_for_correlators
from freewill.lpopt import enumerate_strategies

for b in (2.0, 2.2, 2.5, 2 * math.sqrt(2), 3.0, 3.5, 4.0):
    sol = min_m_for_chsh(b)
    print(f"B = {b:.6f}   min M = {sol.m_star:.12f}   B - 2 = {b - 2:.12f}")

r = 1 / math.sqrt(2)
sol = min_m_for_correlators((r, r, r, -r))
print(f"\nsinglet correlators at the Tsirelson point: min M = {sol.m_star:.12f}")
strategies = enumerate_strategies()
for label, rho in (("X ", sol.rho_x), ("X'", sol.rho_xp)):
    support = {tuple(strategies[i]): round(float(w), 6) for i, w in enumerate(rho) if w > 1e-12}
    print(f"rho(.|{label}) support:", support)
