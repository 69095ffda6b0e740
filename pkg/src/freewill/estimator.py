"""Monte-Carlo estimation of correlators and joint outcome distributions.

Shots are split into fixed chunks of ``CHUNK`` shots. Chunk ``i`` draws from
``stream.at(i * CHUNK)``, so results are bit-identical regardless of how many
workers process the chunks. Per-chunk results are outcome-pair counts, which
merge exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import RandomStream
from .models import Model

CHUNK = 1 << 16

# count order for (a, b): (+,+), (+,-), (-,+), (-,-)
PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class CorrelatorEstimate:
    mean: float
    std_error: float
    shots: int
    total: int  # sum of a*b over shots

    @classmethod
    def from_total(cls, total: int, shots: int) -> "CorrelatorEstimate":
        mean = total / shots
        if shots < 2 or abs(total) == shots:
            se = 0.0
        else:
            # Bessel-corrected sample variance of +/-1 values
            var = (1.0 - mean * mean) * shots / (shots - 1)
            se = math.sqrt(var / shots)
        return cls(mean, se, shots, int(total))


def merge_estimates(parts) -> CorrelatorEstimate:
    parts = list(parts)
    return CorrelatorEstimate.from_total(sum(p.total for p in parts), sum(p.shots for p in parts))


@dataclass(frozen=True)
class JointDistribution:
    counts: tuple  # in PAIRS order
    shots: int

    @property
    def probabilities(self) -> dict:
        return {pair: c / self.shots for pair, c in zip(PAIRS, self.counts)}

    def p(self, a: int, b: int) -> float:
        return self.counts[PAIRS.index((a, b))] / self.shots

    @property
    def correlator(self) -> float:
        npp, npm, nmp, nmm = self.counts
        return (npp + nmm - npm - nmp) / self.shots

    def marginal_alice(self) -> float:
        """P(a = +1)."""
        return (self.counts[0] + self.counts[1]) / self.shots

    def marginal_bob(self) -> float:
        """P(b = +1)."""
        return (self.counts[0] + self.counts[2]) / self.shots


def _chunk_counts(model: Model, alice_setting, bob_setting, n: int, stream: RandomStream) -> np.ndarray:
    gen = stream.generator()
    lam = model.sample_lambdas(alice_setting, gen, n)
    a = model.outcomes_alice(alice_setting, lam)
    b = model.outcomes_bob(bob_setting, lam)
    idx = (a < 0).astype(np.int64) * 2 + (b < 0).astype(np.int64)
    return np.bincount(idx, minlength=4).astype(np.int64)


def _counts(model, alice_setting, bob_setting, shots, stream, workers) -> np.ndarray:
    if int(shots) < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    shots = int(shots)
    sizes = [CHUNK] * (shots // CHUNK)
    if shots % CHUNK:
        sizes.append(shots % CHUNK)

    def run(i):
        return _chunk_counts(model, alice_setting, bob_setting, sizes[i], stream.at(i * CHUNK))

    if workers and workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    total = np.zeros(4, dtype=np.int64)
    for part in parts:  # fixed chunk order
        total += part
    return total


def estimate_joint(model: Model, alice_setting, bob_setting, shots: int, stream: RandomStream,
                   workers: int = 1) -> JointDistribution:
    counts = _counts(model, alice_setting, bob_setting, shots, stream, workers)
    return JointDistribution(tuple(int(c) for c in counts), int(shots))


def estimate_correlator(model: Model, alice_setting, bob_setting, shots: int, stream: RandomStream,
                        workers: int = 1) -> CorrelatorEstimate:
    """Estimate <ab> from ``shots`` independent draws of lambda under Alice's setting."""
    npp, npm, nmp, nmm = _counts(model, alice_setting, bob_setting, shots, stream, workers)
    return CorrelatorEstimate.from_total(int(npp + nmm - npm - nmp), int(shots))


def estimate_quad(model: Model, settings: dict, shots: int, stream: RandomStream, workers: int = 1):
    """Estimate the four CHSH correlators.

    ``settings`` maps ``X, X', Y, Y'`` to vectors (or labels for the toy model).
    Each correlator uses its own child stream. Returns the four estimates in
    the order (XY, XY', X'Y, X'Y').
    """
    pairs = (("X", "Y"), ("X", "Y'"), ("X'", "Y"), ("X'", "Y'"))
    return [
        estimate_correlator(model, settings[x], settings[y], shots, stream.spawn(k), workers)
        for k, (x, y) in enumerate(pairs)
    ]


@dataclass
class MarginalScan:
    """Local marginals P(+1) for every (Alice setting, Bob setting) pair.

    ``alice[i, j]`` is P(a=+1 | X_i, Y_j), ``bob[i, j]`` is P(b=+1 | X_i, Y_j).
    ``alice_variation[i]`` is the spread of ``alice[i, :]`` over Bob's settings
    and ``bob_variation[j]`` the spread of ``bob[:, j]`` over Alice's settings;
    the matching ``*_sigma`` combine the standard errors of the two extremes.
    """

    alice: np.ndarray
    bob: np.ndarray
    alice_se: np.ndarray
    bob_se: np.ndarray
    alice_variation: np.ndarray
    alice_sigma: np.ndarray
    bob_variation: np.ndarray
    bob_sigma: np.ndarray


def _binomial_se(p: np.ndarray, n: int) -> np.ndarray:
    if n < 2:
        return np.zeros_like(p)
    return np.sqrt(p * (1.0 - p) / (n - 1))


def _spread(values: np.ndarray, se: np.ndarray):
    hi, lo = int(np.argmax(values)), int(np.argmin(values))
    return values[hi] - values[lo], math.hypot(se[hi], se[lo])


def marginal_scan(model: Model, alice_settings, bob_settings, shots: int, stream: RandomStream,
                  workers: int = 1) -> MarginalScan:
    if not alice_settings or not bob_settings:
        raise ValueError("marginal_scan needs at least one setting per party")
    na, nb = len(alice_settings), len(bob_settings)
    pa = np.empty((na, nb))
    pb = np.empty((na, nb))
    for i, xs in enumerate(alice_settings):
        for j, ys in enumerate(bob_settings):
            joint = estimate_joint(model, xs, ys, shots, stream.spawn(i * nb + j), workers)
            pa[i, j] = joint.marginal_alice()
            pb[i, j] = joint.marginal_bob()
    sa, sb = _binomial_se(pa, shots), _binomial_se(pb, shots)
    av, asg = zip(*(_spread(pa[i], sa[i]) for i in range(na)))
    bv, bsg = zip(*(_spread(pb[:, j], sb[:, j]) for j in range(nb)))
    return MarginalScan(pa, pb, sa, sb, np.array(av), np.array(asg), np.array(bv), np.array(bsg))
