"""
Mutual information between Alice's setting and the hidden variable
===================================================================

With Alice's direction uniform on the sphere, the hidden variable is uniform
too, and the information it carries about her setting reduces to
integral |c| log2(2|c|) dc over [-1, 1], which is 1 - 1/(2 ln 2) bits.
"""

import math

from freewill import mutual_information_onesided

mi = mutual_information_onesided()
print(f"I(x : lambda) = {mi:.10f} bits")
print(f"closed form   = {1 - 1 / (2 * math.log(2)):.10f} bits")
print(f"uniform (setting-independent) density: {mutual_information_onesided(lambda c: 0.5):.1f} bits")
