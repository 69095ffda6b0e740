"""
A two-valued toy model: trading free will for CHSH violation
============================================================

Two hidden labels with deterministic answers. Under Alice's setting X only
lambda_2 occurs; under X' lambda_1 occurs with probability p. The CHSH value is
2 + 2p and the measurement dependence is 2p, so the relaxed bound B <= 2 + M is
met with equality for every p. At p = 1 the correlators are those of a PR box.
"""

from freewill import RandomStream, ToyTable, bound_check, m_supremum
from freewill.chsh import TOY_SETTINGS, analytic_quad, chsh_value
from freewill.estimator import estimate_quad, marginal_scan

for p in (0.0, 0.25, 0.5, 0.75, 1.0):
    toy = ToyTable(p)
    quad = analytic_quad(toy, TOY_SETTINGS)
    b = chsh_value(quad, 0)
    rep = m_supremum(toy)
    ests = estimate_quad(toy, TOY_SETTINGS, 100_000, RandomStream(3).spawn(int(100 * p)))
    b_mc = ests[0].mean + ests[1].mean + ests[2].mean - ests[3].mean
    print(f"p={p:.2f}  quad={quad.as_array().tolist()}  B={b:.2f} (MC {b_mc:.3f})  "
          f"M={rep.m:.2f}  F={rep.f:.2f}  B<=2+M: {bound_check(b, rep.m)}")

###############################################################################
# Bob's outcome functions never read Alice's setting, but his observed
# marginal does shift with her context because the lambda weights do.

scan = marginal_scan(ToyTable(0.5), ["X", "X'"], ["Y", "Y'"], 100_000, RandomStream(4))
print("\nP(b=+1) rows = Alice context X, X'; columns = Bob setting Y, Y'")
print(scan.bob)
print("variation of Bob's Y marginal across Alice's contexts:", scan.bob_variation[0])
