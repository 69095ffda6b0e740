"""
Simulating the singlet correlation with one-sided measurement dependence
=========================================================================

The hidden variable is a unit vector drawn with density |X.lam| / (2 pi),
where X is Alice's measurement direction. Alice answers -sgn(X.lam) and Bob
answers sgn(Y.lam). Bob's distribution of lam never depends on his own
setting, yet the pair reproduces the singlet correlator -X.Y.
"""

import numpy as np

from freewill import RandomStream, SingletOneSided, estimate_correlator, estimate_joint, unit

model = SingletOneSided()
stream = RandomStream(master_seed=0)

###############################################################################
# Sweep Bob's direction through a great circle while Alice measures along z.

alice = unit(0, 0, 1)
for deg in range(0, 181, 30):
    t = np.radians(deg)
    bob = unit(np.sin(t), 0, np.cos(t))
    est = estimate_correlator(model, alice, bob, 200_000, stream.spawn(deg))
    print(f"angle {deg:3d} deg   <ab> = {est.mean:+.4f} +/- {est.std_error:.4f}   -X.Y = {-np.cos(t):+.4f}")

###############################################################################
# The joint distribution at orthogonal settings: four equally likely outcomes.

joint = estimate_joint(model, alice, unit(1, 0, 0), 200_000, stream.spawn(999))
for (a, b), p in joint.probabilities.items():
    print(f"p({a:+d},{b:+d}) = {p:.4f}")
print("P(a=+1) =", joint.marginal_alice(), " P(b=+1) =", joint.marginal_bob())
