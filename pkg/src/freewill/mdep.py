"""Measurement-dependence metrics.

M is the variational distance between hidden-variable distributions under two
of Alice's settings, F = 1 - M/2 the free-will fraction. For the sphere model
rho(lam|X) = |X.lam|/(2 pi), M depends only on the angle beta between X and X'
and reduces to

    M(beta) = 1/4 * integral_0^{2 pi} | |cos phi| - |cos(phi - beta)| | dphi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable

import numpy as np
from scipy import integrate

from .core import angle, as_vector
from .models import Model, SingletOneSided, ToyTable, UniformBaseline

GL_NODES = 32
NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class MDepReport:
    m: float
    f: float
    argmax_pair: dict
    method: str  # "exact" | "quadrature"

    @property
    def dependence_percent(self) -> float:
        """100 * M / 2: the share of measurement dependence."""
        return 100.0 * self.m / 2.0

    @property
    def independence_percent(self) -> float:
        """100 * F: the share of measurement independence."""
        return 100.0 * self.f


def _check_distribution(rho, name) -> np.ndarray:
    r = np.asarray(rho, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D probability list")
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ValueError(f"{name} has negative or non-finite entries")
    if abs(r.sum() - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"{name} sums to {r.sum()}, not 1")
    return r


def _m_exact(a, b) -> float:
    if len(a) != len(b) or not a:
        raise ValueError("distributions must be non-empty and have the same length")
    for r, name in ((a, "rho_x"), (b, "rho_xp")):
        if any(v < 0 for v in r) or sum(r) != 1:
            raise ValueError(f"{name} is not a probability distribution")
    return float(sum(abs(u - v) for u, v in zip(a, b)))


def m_discrete(rho_x, rho_xp) -> float:
    """Variational distance sum |rho_x - rho_xp| between two distributions on the same labels.

    Lists of ``Fraction``/``int`` are summed exactly; anything else in floating point.
    """
    exact = (int, Fraction)
    if (isinstance(rho_x, (list, tuple)) and isinstance(rho_xp, (list, tuple))
            and all(isinstance(v, exact) for v in (*rho_x, *rho_xp))):
        return _m_exact(list(rho_x), list(rho_xp))
    a = _check_distribution(rho_x, "rho_x")
    b = _check_distribution(rho_xp, "rho_xp")
    if a.shape != b.shape:
        raise ValueError("distributions must have the same length")
    return float(np.abs(a - b).sum())


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _piecewise_gl(f: Callable, breaks: np.ndarray) -> float:
    x, w = _gauss_legendre(GL_NODES)
    lo, hi = breaks[:-1], breaks[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * w[None, :] * f(pts)))


def m_sphere_pair(beta: float) -> float:
    """M for two sphere settings separated by angle ``beta`` in [0, pi].

    The integrand has period pi, so integrate over [0, pi] and halve the 1/4
    prefactor. It is smooth between the zeros of cos(phi), cos(phi - beta)
    and the crossings |cos phi| = |cos(phi - beta)| (phi = beta/2 + k pi/2);
    Gauss-Legendre on each smooth piece is exact to rounding.
    """
    if not (0.0 <= beta <= math.pi):
        raise ValueError(f"beta must lie in [0, pi], got {beta}")
    half_pi = 0.5 * math.pi
    kinks = np.array([half_pi, beta + half_pi, 0.5 * beta, 0.5 * beta + half_pi]) % math.pi
    breaks = np.unique(np.concatenate([[0.0, math.pi], kinks]))
    breaks = breaks[np.concatenate([[True], np.diff(breaks) > 1e-15])]

    def g(phi):
        return np.abs(np.abs(np.cos(phi)) - np.abs(np.cos(phi - beta)))

    return 0.5 * _piecewise_gl(g, breaks)


def _golden_max(f: Callable, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    x = 0.5 * (lo + hi)
    return x, f(x)


def sphere_supremum(grid_step_deg: float = 1.0, tol: float = 1e-10) -> tuple[float, float]:
    """Maximize ``m_sphere_pair`` over beta: coarse grid, then golden-section refinement.

    Returns ``(beta_star, m_star)``. Raises if the grid shows more than one
    peak, since the refinement relies on a single maximum.
    """
    n = int(round(180.0 / grid_step_deg))
    grid = np.linspace(0.0, math.pi, n + 1)
    vals = np.array([m_sphere_pair(b) for b in grid])
    k = int(np.argmax(vals))
    d = np.diff(vals)
    if np.any(d[:k] < -1e-12) or np.any(d[k:] > 1e-12):
        raise RuntimeError("M(beta) is not single-peaked on the grid")
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, n)]
    beta, m = _golden_max(m_sphere_pair, lo, hi, tol)
    if vals[k] > m:
        beta, m = grid[k], vals[k]
    return float(beta), float(m)


def free_will(m: float) -> float:
    """F = 1 - M/2."""
    if not (0.0 <= m <= 2.0):
        raise ValueError(f"measurement dependence must lie in [0, 2], got {m}")
    return 1.0 - m / 2.0


def m_supremum(model: Model) -> MDepReport:
    if isinstance(model, SingletOneSided):
        beta, m = sphere_supremum()
        m = min(m, 2.0)
        return MDepReport(m, free_will(m), {"beta": beta}, "quadrature")
    if isinstance(model, ToyTable):
        m = m_discrete(model.exact_weights("X"), model.exact_weights("X'"))
        return MDepReport(m, free_will(m), {"contexts": ["X", "X'"]}, "exact")
    if isinstance(model, UniformBaseline):
        return MDepReport(0.0, 1.0, {"beta": 0.0}, "exact")
    raise ValueError(f"no measurement-dependence rule for model kind {model.kind!r}")


def m_pair(model: Model, x, xp) -> float:
    """M between two of Alice's settings for ``model``."""
    if isinstance(model, SingletOneSided):
        return m_sphere_pair(angle(as_vector(x), as_vector(xp)))
    if isinstance(model, ToyTable):
        return m_discrete(model.exact_weights(x), model.exact_weights(xp))
    if isinstance(model, UniformBaseline):
        as_vector(x), as_vector(xp)
        return 0.0
    raise ValueError(f"no measurement-dependence rule for model kind {model.kind!r}")


def independence_check(model: Model, settings, tol: float = 1e-9) -> bool:
    """True iff the lambda distribution is the same (within ``tol``) for every pair of settings."""
    settings = list(settings)
    if len(settings) < 2:
        raise ValueError("independence_check needs at least two settings")
    return all(m_pair(model, s, t) <= tol for s, t in combinations(settings, 2))


def abs_density(c):
    return np.abs(c)


def mutual_information_onesided(density: Callable = abs_density) -> float:
    """Mutual information (bits) between Alice's direction and lambda.

    With Alice's direction uniform, lambda is uniform on the sphere and the
    information reduces to a 1-D integral over c = X.lam:

        I = integral_{-1}^{1} g(c) log2(g(c) / (1/2)) dc

    where g is the conditional density of c (|c| for the one-sided model).
    """

    def integrand(c):
        g = float(density(c))
        return 0.0 if g <= 0.0 else g * math.log2(2.0 * g)

    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
    left, _ = integrate.quad(integrand, -1.0, 0.0, **opts)
    right, _ = integrate.quad(integrand, 0.0, 1.0, **opts)
    return left + right


MI_CLOSED_FORM = 1.0 - 1.0 / (2.0 * math.log(2.0))
